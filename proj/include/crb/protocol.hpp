#pragma once

#include "crb/procset.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace crb {

/// Opaque broadcast payload; equality is byte equality.
struct Value {
    std::string bytes;
    bool operator==(const Value&) const = default;
};

/// One broadcast instance: a dedicated source plus a nonce so signatures
/// from different instances never collide.
struct Instance {
    ProcessId source = 0;
    std::uint64_t nonce = 0;
    bool operator==(const Instance&) const = default;
};

std::uint64_t digest64(const std::string& bytes);

/// Subject bytes the source signs for a value, and the subject an
/// echoer countersigns. Canonical (length-prefixed, fixed order) so
/// signatures are stable across runs and implementations.
std::string value_subject(const Instance& inst, const Value& v);
std::string echo_subject(const Instance& inst, const Value& v, ProcessId echoer);

class SigningKey;

/// A signature over a subject. The only way to mint one is through
/// SigningKey::sign; holding the key for p models p's private key.
class Signature {
public:
    ProcessId signer() const { return signer_; }
    bool verify(ProcessId expected_signer, const std::string& subject) const;
    std::uint64_t raw() const { return digest_; }

private:
    friend class SigningKey;
    Signature(ProcessId s, std::uint64_t d) : signer_(s), digest_(d) {}
    ProcessId signer_;
    std::uint64_t digest_;
};

class SigningKey {
public:
    explicit SigningKey(ProcessId id) : id_(id) {}
    ProcessId id() const { return id_; }
    Signature sign(const std::string& subject) const;

private:
    ProcessId id_;
};

/// A value together with the source's signature on it.
struct SignedValue {
    Value value;
    Signature source_sig;
    bool verify(const Instance& inst) const;
};

/// Two distinct values both signed by the source: transferable evidence
/// of equivocation, checkable by any third party.
struct MisbehaviorProof {
    SignedValue first;
    SignedValue second;
    bool valid(const Instance& inst) const;
};

enum class MsgKind : std::uint8_t { Send = 1, Echo = 2, Acc = 3 };

const char* kind_name(MsgKind k);

/// A protocol message in transit. SEND and ECHO carry a source-signed
/// value; ECHO is additionally countersigned by its sender; ACC carries
/// a misbehavior proof.
struct Envelope {
    MsgKind kind;
    ProcessId sender;
    std::optional<SignedValue> signed_value; // Send, Echo
    std::optional<Signature> echo_sig;       // Echo
    std::optional<MisbehaviorProof> proof;   // Acc

    /// Canonical byte encoding: kind, sender, then length-prefixed
    /// fields in fixed order.
    std::string encode() const;

    static Envelope make_send(ProcessId sender, SignedValue sv);
    static Envelope make_echo(ProcessId sender, SignedValue sv, const Instance& inst,
                              const SigningKey& key);
    static Envelope make_acc(ProcessId sender, MisbehaviorProof proof);
};

struct Deliver {
    Value value;
};
struct Accuse {
    MisbehaviorProof proof;
};
using Output = std::variant<Deliver, Accuse>;

/// What one protocol step produced. All Algorithm-level sends are
/// broadcasts to the whole process set; the harness fans them out.
struct StepResult {
    std::vector<Envelope> outgoing;
    std::vector<Output> outputs;
};

/// Per-process state machine for the accountable one-phase broadcast.
/// Pure and deterministic: no I/O, no clocks, no randomness; identical
/// event sequences reproduce identical results.
class ProcessState {
public:
    /// quorums must be Q(me), each containing me.
    ProcessState(ProcessId me, Instance inst, int n, std::vector<ProcSet> quorums,
                 SigningKey key);

    /// Source-only entry point; one-shot per instance.
    StepResult broadcast(const Value& m);

    /// Dispatches on envelope kind. Envelopes with bad signatures or
    /// malformed proofs are dropped and counted, emitting nothing.
    StepResult on_envelope(const Envelope& env);

    /// The delivery rule on the currently recorded echoes: the first
    /// quorum (list order) fully covered by echoes of one common value.
    std::optional<Value> check_delivery() const;

    ProcessId me() const { return me_; }
    const Instance& instance() const { return instance_; }
    bool sentecho() const { return sentecho_; }
    bool delivered() const { return delivered_; }
    bool accused() const { return accused_; }
    const std::optional<Value>& delivered_value() const { return delivered_value_; }
    const std::optional<MisbehaviorProof>& accusation() const { return accusation_; }
    std::uint64_t dropped_envelopes() const { return dropped_; }
    const std::optional<SignedValue>& echo_from(ProcessId p) const
    {
        return echoes_[static_cast<std::size_t>(p)];
    }

private:
    StepResult on_send(const Envelope& env);
    StepResult on_echo(const Envelope& env);
    StepResult on_acc(const Envelope& env);
    void emit_echo(const SignedValue& sv, StepResult& r);
    void raise_accusation(MisbehaviorProof proof, StepResult& r);
    void try_deliver(StepResult& r);

    ProcessId me_;
    Instance instance_;
    int n_;
    std::vector<ProcSet> quorums_;
    SigningKey key_;

    bool broadcast_called_ = false;
    bool sentecho_ = false;
    bool delivered_ = false;
    bool accused_ = false;
    std::vector<std::optional<SignedValue>> echoes_;
    std::optional<Value> delivered_value_;
    std::optional<MisbehaviorProof> accusation_;
    std::uint64_t dropped_ = 0;
};

} // namespace crb
