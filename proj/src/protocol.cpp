#include "crb/protocol.hpp"

#include "crb/trust.hpp"

namespace crb {

namespace {

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_bytes(std::string& out, const std::string& bytes)
{
    put_u32(out, static_cast<std::uint32_t>(bytes.size()));
    out += bytes;
}

void put_signature(std::string& out, const Signature& sig)
{
    put_u32(out, static_cast<std::uint32_t>(sig.signer()));
    put_u64(out, sig.raw());
}

void put_signed_value(std::string& out, const SignedValue& sv)
{
    put_bytes(out, sv.value.bytes);
    put_signature(out, sv.source_sig);
}

} // namespace

std::uint64_t digest64(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string value_subject(const Instance& inst, const Value& v)
{
    std::string out = "crb/value";
    put_u32(out, static_cast<std::uint32_t>(inst.source));
    put_u64(out, inst.nonce);
    put_bytes(out, v.bytes);
    return out;
}

std::string echo_subject(const Instance& inst, const Value& v, ProcessId echoer)
{
    std::string out = "crb/echo";
    put_u32(out, static_cast<std::uint32_t>(inst.source));
    put_u64(out, inst.nonce);
    put_bytes(out, v.bytes);
    put_u32(out, static_cast<std::uint32_t>(echoer));
    return out;
}

bool Signature::verify(ProcessId expected_signer, const std::string& subject) const
{
    if (signer_ != expected_signer)
        return false;
    std::string bound = subject;
    put_u32(bound, static_cast<std::uint32_t>(signer_));
    return digest_ == digest64(bound);
}

Signature SigningKey::sign(const std::string& subject) const
{
    std::string bound = subject;
    put_u32(bound, static_cast<std::uint32_t>(id_));
    return Signature(id_, digest64(bound));
}

bool SignedValue::verify(const Instance& inst) const
{
    return source_sig.verify(inst.source, value_subject(inst, value));
}

bool MisbehaviorProof::valid(const Instance& inst) const
{
    return first.value != second.value && first.verify(inst) && second.verify(inst);
}

const char* kind_name(MsgKind k)
{
    switch (k) {
    case MsgKind::Send: return "SEND";
    case MsgKind::Echo: return "ECHO";
    case MsgKind::Acc: return "ACC";
    }
    return "?";
}

std::string Envelope::encode() const
{
    std::string out;
    out.push_back(static_cast<char>(kind));
    put_u32(out, static_cast<std::uint32_t>(sender));
    if (signed_value)
        put_signed_value(out, *signed_value);
    if (echo_sig)
        put_signature(out, *echo_sig);
    if (proof) {
        put_signed_value(out, proof->first);
        put_signed_value(out, proof->second);
    }
    return out;
}

Envelope Envelope::make_send(ProcessId sender, SignedValue sv)
{
    return Envelope{MsgKind::Send, sender, std::move(sv), std::nullopt, std::nullopt};
}

Envelope Envelope::make_echo(ProcessId sender, SignedValue sv, const Instance& inst,
                             const SigningKey& key)
{
    Signature counter = key.sign(echo_subject(inst, sv.value, sender));
    return Envelope{MsgKind::Echo, sender, std::move(sv), counter, std::nullopt};
}

Envelope Envelope::make_acc(ProcessId sender, MisbehaviorProof proof)
{
    return Envelope{MsgKind::Acc, sender, std::nullopt, std::nullopt, std::move(proof)};
}

ProcessState::ProcessState(ProcessId me, Instance inst, int n, std::vector<ProcSet> quorums,
                           SigningKey key)
    : me_(me), instance_(inst), n_(n), quorums_(std::move(quorums)), key_(std::move(key)),
      echoes_(static_cast<std::size_t>(n))
{
    if (key_.id() != me)
        throw InputError("signing key does not belong to this process");
    if (quorums_.empty())
        throw InputError("process needs at least one quorum");
    for (ProcSet q : quorums_)
        if (!q.contains(me))
            throw InputError("every quorum must include its owner");
}

StepResult ProcessState::broadcast(const Value& m)
{
    if (me_ != instance_.source)
        throw InputError("only the source may broadcast");
    if (broadcast_called_)
        throw InputError("broadcast already invoked for this instance");
    broadcast_called_ = true;

    StepResult r;
    SignedValue sv{m, key_.sign(value_subject(instance_, m))};
    r.outgoing.push_back(Envelope::make_send(me_, std::move(sv)));
    return r;
}

StepResult ProcessState::on_envelope(const Envelope& env)
{
    switch (env.kind) {
    case MsgKind::Send: return on_send(env);
    case MsgKind::Echo: return on_echo(env);
    case MsgKind::Acc: return on_acc(env);
    }
    ++dropped_;
    return {};
}

void ProcessState::emit_echo(const SignedValue& sv, StepResult& r)
{
    sentecho_ = true;
    r.outgoing.push_back(Envelope::make_echo(me_, sv, instance_, key_));
}

void ProcessState::raise_accusation(MisbehaviorProof proof, StepResult& r)
{
    accused_ = true;
    accusation_ = proof;
    r.outgoing.push_back(Envelope::make_acc(me_, proof));
    r.outputs.push_back(Accuse{std::move(proof)});
}

std::optional<Value> ProcessState::check_delivery() const
{
    for (ProcSet q : quorums_) {
        std::optional<Value> common;
        bool covered = true;
        q.for_each([&](ProcessId p) {
            const auto& e = echoes_[static_cast<std::size_t>(p)];
            if (!e) {
                covered = false;
            } else if (!common) {
                common = e->value;
            } else if (*common != e->value) {
                covered = false;
            }
        });
        if (covered && common)
            return common;
    }
    return std::nullopt;
}

void ProcessState::try_deliver(StepResult& r)
{
    // Accusation disables delivery; deliver-then-accuse remains possible.
    if (delivered_ || accused_)
        return;
    if (auto m = check_delivery()) {
        delivered_ = true;
        delivered_value_ = *m;
        r.outputs.push_back(Deliver{*m});
    }
}

StepResult ProcessState::on_send(const Envelope& env)
{
    StepResult r;
    if (!env.signed_value || !env.signed_value->verify(instance_)) {
        ++dropped_;
        return r;
    }
    if (!sentecho_)
        emit_echo(*env.signed_value, r);
    return r;
}

StepResult ProcessState::on_echo(const Envelope& env)
{
    StepResult r;
    if (!env.signed_value || !env.echo_sig || env.sender < 0 || env.sender >= n_ ||
        !env.signed_value->verify(instance_) ||
        !env.echo_sig->verify(env.sender,
                              echo_subject(instance_, env.signed_value->value, env.sender))) {
        ++dropped_;
        return r;
    }
    const SignedValue& sv = *env.signed_value;

    // First echo per sender wins; a later conflicting echo still feeds
    // the accusation check below but cannot erase recorded evidence.
    auto& slot = echoes_[static_cast<std::size_t>(env.sender)];
    if (!slot)
        slot = sv;

    if (!accused_) {
        for (const auto& other : echoes_) {
            if (other && other->value != sv.value) {
                raise_accusation(MisbehaviorProof{sv, *other}, r);
                break;
            }
        }
    }

    if (!sentecho_)
        emit_echo(sv, r);

    try_deliver(r);
    return r;
}

StepResult ProcessState::on_acc(const Envelope& env)
{
    StepResult r;
    if (!env.proof || !env.proof->valid(instance_)) {
        ++dropped_;
        return r;
    }
    if (!accused_)
        raise_accusation(*env.proof, r);
    return r;
}

} // namespace crb
