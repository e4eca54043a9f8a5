#include "crb/sim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <json.hpp>
#include <random>
#include <set>

using nlohmann::json;

namespace crb {

const char* adversary_name(AdversaryKind k)
{
    switch (k) {
    case AdversaryKind::None: return "none";
    case AdversaryKind::Silent: return "silent";
    case AdversaryKind::EquivocateSplit: return "equivocate_split";
    case AdversaryKind::Crash: return "crash";
    case AdversaryKind::Scripted: return "scripted";
    case AdversaryKind::Partition: return "partition";
    }
    return "?";
}

std::optional<AdversaryKind> adversary_from_name(const std::string& name)
{
    for (AdversaryKind k :
         {AdversaryKind::None, AdversaryKind::Silent, AdversaryKind::EquivocateSplit,
          AdversaryKind::Crash, AdversaryKind::Scripted, AdversaryKind::Partition})
        if (name == adversary_name(k))
            return k;
    return std::nullopt;
}

std::string to_hex(const std::string& bytes)
{
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

namespace {

struct Emission {
    ProcessId from;
    ProcessId to;
    Envelope env;
};

/// Drives the faulty coalition. Implementations may only sign with keys
/// of faulty processes; the simulator never hands them anything else.
class Adversary {
public:
    virtual ~Adversary() = default;
    virtual void poll(std::uint64_t step, std::vector<Emission>& out) = 0;
    virtual void on_inbox(ProcessId to, const Envelope& env)
    {
        (void)to;
        (void)env;
    }
    virtual bool done() const = 0;
};

class SilentAdversary final : public Adversary {
public:
    void poll(std::uint64_t, std::vector<Emission>&) override {}
    bool done() const override { return true; }
};

class EquivocateSplitAdversary final : public Adversary {
public:
    EquivocateSplitAdversary(const Scenario& sc, const std::vector<SigningKey>& faulty_keys)
        : sc_(sc), keys_(faulty_keys)
    {
    }

    void poll(std::uint64_t, std::vector<Emission>& out) override
    {
        if (emitted_)
            return;
        emitted_ = true;
        const int n = sc_.assumptions.n;
        const SigningKey& source_key = key_for(sc_.instance.source);
        std::vector<SignedValue> signed_values;
        for (const Value& v : sc_.values)
            signed_values.push_back({v, source_key.sign(value_subject(sc_.instance, v))});

        // The source feeds partition i = (target mod #values) its value;
        // other faulty processes echo whatever their target's partition got.
        for (ProcessId to = 0; to < n; ++to) {
            const SignedValue& sv = signed_values[static_cast<std::size_t>(to) % signed_values.size()];
            out.push_back({sc_.instance.source, to, Envelope::make_send(sc_.instance.source, sv)});
        }
        sc_.faulty.for_each([&](ProcessId x) {
            if (x == sc_.instance.source)
                return;
            for (ProcessId to = 0; to < n; ++to) {
                const SignedValue& sv = signed_values[static_cast<std::size_t>(to) % signed_values.size()];
                out.push_back({x, to, Envelope::make_echo(x, sv, sc_.instance, key_for(x))});
            }
        });
    }

    bool done() const override { return emitted_; }

private:
    const SigningKey& key_for(ProcessId p) const
    {
        for (const auto& k : keys_)
            if (k.id() == p)
                return k;
        throw SimulationError("adversary holds no key for this process");
    }

    const Scenario& sc_;
    std::vector<SigningKey> keys_;
    bool emitted_ = false;
};

/// Faulty processes follow the protocol until the crash step, then stop.
class CrashAdversary final : public Adversary {
public:
    CrashAdversary(const Scenario& sc, const std::vector<SigningKey>& faulty_keys) : sc_(sc)
    {
        for (const auto& k : faulty_keys) {
            ProcessId p = k.id();
            states_.emplace(p, ProcessState(p, sc.instance, sc.assumptions.n,
                                            sc.assumptions.quorums_of(p), k));
        }
    }

    void poll(std::uint64_t step, std::vector<Emission>& out) override
    {
        if (step >= sc_.crash_step) {
            crashed_ = true;
            queue_.clear();
            return;
        }
        if (!broadcast_done_ && sc_.faulty.contains(sc_.instance.source)) {
            broadcast_done_ = true;
            auto it = states_.find(sc_.instance.source);
            fan_out(sc_.instance.source, it->second.broadcast(sc_.values.at(0)), out);
        }
        while (!queue_.empty()) {
            auto [to, env] = queue_.front();
            queue_.pop_front();
            fan_out(to, states_.at(to).on_envelope(env), out);
        }
    }

    void on_inbox(ProcessId to, const Envelope& env) override
    {
        if (!crashed_)
            queue_.emplace_back(to, env);
    }

    bool done() const override
    {
        if (crashed_)
            return true;
        bool pending_broadcast = !broadcast_done_ && sc_.faulty.contains(sc_.instance.source);
        return queue_.empty() && !pending_broadcast;
    }

private:
    void fan_out(ProcessId from, const StepResult& r, std::vector<Emission>& out)
    {
        for (const Envelope& env : r.outgoing)
            for (ProcessId to = 0; to < sc_.assumptions.n; ++to)
                out.push_back({from, to, env});
    }

    const Scenario& sc_;
    std::map<ProcessId, ProcessState> states_;
    std::deque<std::pair<ProcessId, Envelope>> queue_;
    bool broadcast_done_ = false;
    bool crashed_ = false;
};

class ScriptedAdversary final : public Adversary {
public:
    ScriptedAdversary(const Scenario& sc, const std::vector<SigningKey>& faulty_keys)
        : sc_(sc), keys_(faulty_keys)
    {
        script_ = sc.script;
        std::stable_sort(script_.begin(), script_.end(),
                         [](const ScriptItem& a, const ScriptItem& b) { return a.step < b.step; });
    }

    void poll(std::uint64_t step, std::vector<Emission>& out) override
    {
        while (next_ < script_.size() && script_[next_].step <= step) {
            const ScriptItem& item = script_[next_++];
            out.push_back({item.from, item.to, materialize(item)});
        }
    }

    bool done() const override { return next_ >= script_.size(); }

private:
    const SigningKey& key_for(ProcessId p) const
    {
        for (const auto& k : keys_)
            if (k.id() == p)
                return k;
        throw SimulationError("scripted emission from a process the adversary does not control");
    }

    // A "source signature" is minted with the real source key only when
    // the source is part of the coalition; otherwise the emitter signs in
    // its place and receivers drop the envelope as forged.
    SignedValue signed_value(int idx, ProcessId emitter) const
    {
        const Value& v = sc_.values.at(static_cast<std::size_t>(idx));
        const SigningKey& k = sc_.faulty.contains(sc_.instance.source)
                                  ? key_for(sc_.instance.source)
                                  : key_for(emitter);
        return {v, k.sign(value_subject(sc_.instance, v))};
    }

    Envelope materialize(const ScriptItem& item) const
    {
        const SigningKey& emitter_key = key_for(item.from);
        switch (item.kind) {
        case MsgKind::Send:
            return Envelope::make_send(item.from, signed_value(item.v1, item.from));
        case MsgKind::Echo:
            return Envelope::make_echo(item.from, signed_value(item.v1, item.from), sc_.instance,
                                       emitter_key);
        case MsgKind::Acc:
            return Envelope::make_acc(item.from,
                                      MisbehaviorProof{signed_value(item.v1, item.from),
                                                       signed_value(item.v2, item.from)});
        }
        throw SimulationError("unknown scripted message kind");
    }

    const Scenario& sc_;
    std::vector<SigningKey> keys_;
    std::vector<ScriptItem> script_;
    std::size_t next_ = 0;
};

/// Emits the whole attack at step zero: per partition, the source sends
/// its value into the group and the group's faulty members echo it. The
/// simulator's gate keeps the partitions isolated until every target has
/// delivered.
class PartitionAdversary final : public Adversary {
public:
    PartitionAdversary(const Scenario& sc, const std::vector<SigningKey>& faulty_keys)
        : sc_(sc), keys_(faulty_keys)
    {
    }

    void poll(std::uint64_t, std::vector<Emission>& out) override
    {
        if (emitted_)
            return;
        emitted_ = true;
        const SigningKey& source_key = key_for(sc_.instance.source);
        for (std::size_t i = 0; i < sc_.partition_targets.size(); ++i) {
            const Value& v = sc_.values.at(i);
            SignedValue sv{v, source_key.sign(value_subject(sc_.instance, v))};
            const ProcSet group = sc_.partition_groups[i];
            group.for_each([&](ProcessId to) {
                out.push_back({sc_.instance.source, to, Envelope::make_send(sc_.instance.source, sv)});
            });
            (group & sc_.faulty).for_each([&](ProcessId x) {
                Envelope echo = Envelope::make_echo(x, sv, sc_.instance, key_for(x));
                group.for_each([&](ProcessId to) {
                    if (!sc_.faulty.contains(to))
                        out.push_back({x, to, echo});
                });
            });
        }
    }

    bool done() const override { return emitted_; }

private:
    const SigningKey& key_for(ProcessId p) const
    {
        for (const auto& k : keys_)
            if (k.id() == p)
                return k;
        throw SimulationError("adversary holds no key for this process");
    }

    const Scenario& sc_;
    std::vector<SigningKey> keys_;
    bool emitted_ = false;
};

std::unique_ptr<Adversary> make_adversary(const Scenario& sc,
                                          const std::vector<SigningKey>& faulty_keys)
{
    switch (sc.adversary) {
    case AdversaryKind::None:
    case AdversaryKind::Silent:
        return std::make_unique<SilentAdversary>();
    case AdversaryKind::EquivocateSplit:
        return std::make_unique<EquivocateSplitAdversary>(sc, faulty_keys);
    case AdversaryKind::Crash:
        return std::make_unique<CrashAdversary>(sc, faulty_keys);
    case AdversaryKind::Scripted:
        return std::make_unique<ScriptedAdversary>(sc, faulty_keys);
    case AdversaryKind::Partition:
        return std::make_unique<PartitionAdversary>(sc, faulty_keys);
    }
    throw SimulationError("unknown adversary kind");
}

struct InFlight {
    std::uint64_t seq;
    ProcessId from;
    ProcessId to;
    Envelope env;
};

class Simulator {
public:
    explicit Simulator(const Scenario& sc) : sc_(sc), rng_(sc.seed)
    {
        validate_scenario();
        const int n = sc_.assumptions.n;
        for (ProcessId p = 0; p < n; ++p) {
            SigningKey key(p);
            if (sc_.faulty.contains(p)) {
                faulty_keys_.push_back(key);
            } else {
                states_.emplace(p, ProcessState(p, sc_.instance, n,
                                                sc_.assumptions.quorums_of(p), key));
            }
        }
        adversary_ = make_adversary(sc_, faulty_keys_);
    }

    Trace execute()
    {
        const ProcessId source = sc_.instance.source;
        if (!sc_.faulty.contains(source)) {
            const Value& m = sc_.values.at(0);
            trace_.broadcast_hex = to_hex(m.bytes);
            record_output_event("broadcast", source, to_hex(m.bytes));
            fan_out(source, states_.at(source).broadcast(m));
        }

        std::uint64_t& step = current_step_;
        std::vector<Emission> emissions;
        std::vector<std::size_t> deliverable;
        while (step < sc_.step_budget) {
            emissions.clear();
            adversary_->poll(step, emissions);
            for (const Emission& e : emissions)
                enqueue(e.from, e.to, e.env);

            deliverable.clear();
            for (std::size_t i = 0; i < pending_.size(); ++i)
                if (gate_allows(pending_[i]))
                    deliverable.push_back(i);

            if (deliverable.empty()) {
                if (adversary_->done()) {
                    if (pending_.empty()) {
                        trace_.quiescent = true;
                        break;
                    }
                    throw SimulationError("run wedged: messages held forever before quiescence");
                }
                ++step;
                continue;
            }

            std::size_t pick = deliverable[rng_() % deliverable.size()];
            InFlight msg = pending_[pick];
            pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
            deliver(msg);
            ++step;
        }

        if (!trace_.quiescent)
            throw SimulationError("step budget exhausted before quiescence");

        trace_.steps = step;
        finalize_summary();
        return std::move(trace_);
    }

private:
    void validate_scenario()
    {
        const auto& a = sc_.assumptions;
        if (!validate(a).empty())
            throw InputError("scenario assumptions are invalid");
        if (sc_.instance.source < 0 || sc_.instance.source >= a.n)
            throw InputError("source id out of range");
        if (!is_faulty_set(a, sc_.faulty))
            throw InputError("execution does not comply with the fault model");
        if (sc_.values.empty())
            throw InputError("scenario needs at least one value");
        if (sc_.adversary == AdversaryKind::EquivocateSplit &&
            !sc_.faulty.contains(sc_.instance.source))
            throw InputError("equivocate_split needs a faulty source");
        if (sc_.adversary == AdversaryKind::Partition) {
            if (!sc_.faulty.contains(sc_.instance.source))
                throw InputError("partition attack needs a faulty source");
            if (sc_.partition_targets.size() != sc_.partition_groups.size() ||
                sc_.partition_targets.size() > sc_.values.size())
                throw InputError("partition attack is missing its schedule");
        }
        for (const ScriptItem& item : sc_.script) {
            if (!sc_.faulty.contains(item.from))
                throw InputError("script emits from a process the adversary does not control");
            if (item.to < 0 || item.to >= a.n)
                throw InputError("script target out of range");
            if (item.v1 < 0 || item.v1 >= static_cast<int>(sc_.values.size()) || item.v2 < 0 ||
                item.v2 >= static_cast<int>(sc_.values.size()))
                throw InputError("script value index out of range");
        }
    }

    bool in_same_partition(ProcessId from, ProcessId to) const
    {
        for (std::size_t i = 0; i < sc_.partition_groups.size(); ++i) {
            ProcSet group = sc_.partition_groups[i] | ProcSet::single(sc_.instance.source);
            if (group.contains(from) && group.contains(to))
                return true;
        }
        return false;
    }

    bool gate_allows(const InFlight& m) const
    {
        if (sc_.adversary != AdversaryKind::Partition || partitions_open_)
            return true;
        return in_same_partition(m.from, m.to);
    }

    void maybe_open_partitions()
    {
        if (sc_.adversary != AdversaryKind::Partition || partitions_open_)
            return;
        for (ProcessId t : sc_.partition_targets)
            if (!states_.at(t).delivered())
                return;
        partitions_open_ = true;
    }

    void enqueue(ProcessId from, ProcessId to, const Envelope& env)
    {
        if (sc_.probe &&
            !(sc_.probe_allowed.contains(from) && sc_.probe_allowed.contains(to))) {
            TraceEntry e;
            e.event = "suppress";
            e.process = from;
            e.peer = to;
            e.kind = kind_name(env.kind);
            push(std::move(e));
            return;
        }
        std::uint64_t seq = next_seq_++;
        TraceEntry e;
        e.event = "send";
        e.process = from;
        e.peer = to;
        e.msg = seq;
        e.kind = kind_name(env.kind);
        e.payload_hex = to_hex(env.encode());
        push(std::move(e));
        pending_.push_back({seq, from, to, env});
    }

    void deliver(const InFlight& m)
    {
        TraceEntry e;
        e.event = "receive";
        e.process = m.to;
        e.peer = m.from;
        e.msg = m.seq;
        e.kind = kind_name(m.env.kind);
        push(std::move(e));

        if (sc_.faulty.contains(m.to)) {
            adversary_->on_inbox(m.to, m.env);
            return;
        }

        ProcessState& st = states_.at(m.to);
        std::uint64_t drops_before = st.dropped_envelopes();
        StepResult r = st.on_envelope(m.env);
        if (st.dropped_envelopes() != drops_before) {
            TraceEntry d;
            d.event = "drop";
            d.process = m.to;
            d.kind = kind_name(m.env.kind);
            push(std::move(d));
        }
        for (const Output& out : r.outputs) {
            if (const auto* del = std::get_if<Deliver>(&out)) {
                record_output_event("deliver", m.to, to_hex(del->value.bytes));
            } else if (const auto* acc = std::get_if<Accuse>(&out)) {
                TraceEntry t;
                t.event = "accuse";
                t.process = m.to;
                t.proof_ok = acc->proof.valid(sc_.instance);
                push(std::move(t));
            }
        }
        fan_out(m.to, r);
        maybe_open_partitions();
    }

    void fan_out(ProcessId from, const StepResult& r)
    {
        for (const Envelope& env : r.outgoing)
            for (ProcessId to = 0; to < sc_.assumptions.n; ++to)
                enqueue(from, to, env);
    }

    void record_output_event(const std::string& event, ProcessId p, std::string payload_hex)
    {
        TraceEntry e;
        e.event = event;
        e.process = p;
        e.payload_hex = std::move(payload_hex);
        push(std::move(e));
    }

    void push(TraceEntry e)
    {
        e.index = trace_.entries.size();
        e.step = current_step_;
        trace_.entries.push_back(std::move(e));
    }

    void finalize_summary()
    {
        const auto& a = sc_.assumptions;
        trace_.summary.resize(static_cast<std::size_t>(a.n));
        for (ProcessId p = 0; p < a.n; ++p) {
            ProcessSummary& s = trace_.summary[static_cast<std::size_t>(p)];
            s.faulty = sc_.faulty.contains(p);
            s.live = !s.faulty && is_live(a, p, sc_.faulty);
            if (!s.faulty) {
                const ProcessState& st = states_.at(p);
                if (st.delivered_value())
                    s.delivered_hex = to_hex(st.delivered_value()->bytes);
                s.accused = st.accused();
            }
        }
    }

    const Scenario& sc_;
    std::mt19937_64 rng_;
    std::map<ProcessId, ProcessState> states_;
    std::vector<SigningKey> faulty_keys_;
    std::unique_ptr<Adversary> adversary_;
    std::vector<InFlight> pending_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t current_step_ = 0;
    bool partitions_open_ = false;
    Trace trace_;
};

} // namespace

Trace run(const Scenario& scenario)
{
    return Simulator(scenario).execute();
}

bool verify_channels(const Trace& trace)
{
    std::map<std::uint64_t, int> outstanding;
    for (const TraceEntry& e : trace.entries) {
        if (e.event == "send")
            ++outstanding[e.msg];
        else if (e.event == "receive") {
            auto it = outstanding.find(e.msg);
            if (it == outstanding.end() || it->second <= 0)
                return false; // receive without a preceding matching send
            --it->second;
        }
    }
    for (const auto& [seq, count] : outstanding)
        if (count != 0)
            return false; // sent but never received on a quiescent trace
    return true;
}

Scenario partition_attack(const TrustAssumptions& a, ProcessId source, ProcSet f,
                          const QuorumSelection& s, ProcSet independent_set,
                          const std::vector<Value>& values, std::uint64_t seed)
{
    if (!f.contains(source))
        throw InputError("partition attack needs the source inside the faulty set");
    ExecutionGraph g = build_execution_graph(a, f, s); // validates f and s
    if (!independent_set.subset_of(g.nodes))
        throw InputError("independent set must consist of correct processes");
    const auto targets = independent_set.members();
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (g.has_edge(targets[i], targets[j]))
                throw InputError("set is not independent: quorums of " + a.name_of(targets[i]) +
                                 " and " + a.name_of(targets[j]) +
                                 " intersect outside the faulty set");
    if (values.size() != targets.size())
        throw InputError("need exactly one value per independent-set member");
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (values[i] == values[j])
                throw InputError("attack values must be pairwise distinct");

    Scenario sc;
    sc.assumptions = a;
    sc.instance.source = source;
    sc.faulty = f;
    sc.adversary = AdversaryKind::Partition;
    sc.values = values;
    sc.partition_targets = targets;
    for (ProcessId t : targets)
        sc.partition_groups.push_back(s.quorum_of(t));
    sc.seed = seed;
    return sc;
}

Trace local_progress_probe(const TrustAssumptions& a, ProcessId source, ProcessId p, ProcSet q,
                           std::uint64_t seed)
{
    bool q_of_p = false;
    for (ProcSet quorum : a.quorums_of(p))
        if (quorum == q)
            q_of_p = true;
    if (!q_of_p)
        throw InputError("probe quorum is not a quorum of " + a.name_of(p));

    Scenario sc;
    sc.assumptions = a;
    sc.instance.source = source;
    sc.adversary = AdversaryKind::None;
    sc.values = {Value{"probe"}};
    sc.probe = true;
    sc.probe_allowed = q | ProcSet::single(source);
    sc.seed = seed;
    return run(sc);
}

std::string Trace::to_jsonl() const
{
    std::string out;
    for (const TraceEntry& e : entries) {
        json line{{"i", e.index},      {"step", e.step}, {"event", e.event},
                  {"process", e.process}};
        if (e.peer >= 0)
            line["peer"] = e.peer;
        if (e.event == "send" || e.event == "receive")
            line["msg"] = e.msg;
        if (!e.kind.empty())
            line["kind"] = e.kind;
        if (!e.payload_hex.empty())
            line["payload"] = e.payload_hex;
        if (e.event == "accuse")
            line["proof_ok"] = e.proof_ok;
        out += line.dump();
        out += "\n";
    }
    json procs = json::array();
    for (const ProcessSummary& s : summary) {
        json p{{"faulty", s.faulty}, {"live", s.live}, {"accused", s.accused}};
        p["delivered"] = s.delivered_hex ? json(*s.delivered_hex) : json(nullptr);
        procs.push_back(std::move(p));
    }
    json tail{{"event", "summary"},
              {"quiescent", quiescent},
              {"steps", steps},
              {"broadcast", broadcast_hex},
              {"processes", std::move(procs)}};
    out += tail.dump();
    out += "\n";
    return out;
}

std::vector<ScriptItem> random_script(int n, ProcSet faulty, int value_count,
                                      std::size_t items, std::uint64_t seed)
{
    std::vector<ScriptItem> script;
    const auto coalition = faulty.members();
    if (coalition.empty() || value_count <= 0)
        return script;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < items; ++i) {
        ScriptItem item;
        item.step = rng() % (items + 1);
        item.from = coalition[rng() % coalition.size()];
        item.to = static_cast<ProcessId>(rng() % static_cast<std::uint64_t>(n));
        switch (rng() % 3) {
        case 0: item.kind = MsgKind::Send; break;
        case 1: item.kind = MsgKind::Echo; break;
        default: item.kind = MsgKind::Acc; break;
        }
        item.v1 = static_cast<int>(rng() % static_cast<std::uint64_t>(value_count));
        item.v2 = static_cast<int>(rng() % static_cast<std::uint64_t>(value_count));
        script.push_back(item);
    }
    return script;
}

const PropertyVerdict* OracleReport::find(const std::string& property) const
{
    for (const auto& v : verdicts)
        if (v.property == property)
            return &v;
    return nullptr;
}

std::string OracleReport::to_json() const
{
    json doc;
    doc["k_bound"] = k_bound;
    doc["distinct_delivered"] = distinct_delivered;
    doc["all_pass"] = all_pass;
    json vs = json::array();
    for (const auto& v : verdicts) {
        json e{{"property", v.property},
               {"pass", v.pass},
               {"applicable", v.applicable},
               {"detail", v.detail}};
        if (v.counterexample >= 0)
            e["counterexample"] = v.counterexample;
        vs.push_back(std::move(e));
    }
    doc["verdicts"] = std::move(vs);
    return doc.dump(2) + "\n";
}

OracleReport check_trace(const Trace& trace, const Scenario& scenario, int k_bound)
{
    if (!trace.quiescent)
        throw InputError("oracle only judges quiescent traces");

    const auto& a = scenario.assumptions;
    const ProcessId source = scenario.instance.source;
    const bool source_correct = !scenario.faulty.contains(source);

    struct Outcome {
        std::optional<std::string> delivered;
        long first_delivery = -1;
        long second_delivery = -1;
        bool accused = false;
        bool accuse_proof_ok = true;
        long accuse_index = -1;
    };
    std::vector<Outcome> out(static_cast<std::size_t>(a.n));
    std::vector<std::pair<std::string, long>> deliveries; // value-hex, entry index

    for (const TraceEntry& e : trace.entries) {
        if (scenario.faulty.contains(e.process))
            continue;
        auto& o = out[static_cast<std::size_t>(e.process)];
        if (e.event == "deliver") {
            if (!o.delivered) {
                o.delivered = e.payload_hex;
                o.first_delivery = static_cast<long>(e.index);
            } else if (o.second_delivery < 0) {
                o.second_delivery = static_cast<long>(e.index);
            }
            deliveries.emplace_back(e.payload_hex, static_cast<long>(e.index));
        } else if (e.event == "accuse") {
            if (!o.accused) {
                o.accused = true;
                o.accuse_proof_ok = e.proof_ok;
                o.accuse_index = static_cast<long>(e.index);
            }
        }
    }

    OracleReport report;
    report.k_bound = k_bound;
    auto add = [&](PropertyVerdict v) {
        if (v.applicable && !v.pass)
            report.all_pass = false;
        report.verdicts.push_back(std::move(v));
    };

    const ProcSet correct = a.universe() - scenario.faulty;

    // Validity: a correct source's value reaches every live correct process.
    {
        PropertyVerdict v;
        v.property = "Validity";
        v.applicable = source_correct;
        if (source_correct) {
            correct.for_each([&](ProcessId p) {
                if (!is_live(a, p, scenario.faulty))
                    return;
                const auto& o = out[static_cast<std::size_t>(p)];
                if (!o.delivered || *o.delivered != trace.broadcast_hex) {
                    v.pass = false;
                    v.detail = "live correct process " + a.name_of(p) +
                               " did not deliver the broadcast value";
                }
            });
        }
        add(std::move(v));
    }

    // k-Consistency: at most k distinct values delivered by correct processes.
    {
        std::set<std::string> distinct;
        PropertyVerdict v;
        v.property = "k-Consistency";
        for (const auto& [hex, idx] : deliveries) {
            distinct.insert(hex);
            if (static_cast<int>(distinct.size()) > k_bound && v.pass) {
                v.pass = false;
                v.counterexample = idx;
                v.detail = "delivery pushes distinct value count past " + std::to_string(k_bound);
            }
        }
        report.distinct_delivered = static_cast<int>(distinct.size());
        add(std::move(v));
    }

    // Integrity: one delivery each; with a correct source, only its value.
    {
        PropertyVerdict v;
        v.property = "Integrity";
        correct.for_each([&](ProcessId p) {
            const auto& o = out[static_cast<std::size_t>(p)];
            if (o.second_delivery >= 0 && v.pass) {
                v.pass = false;
                v.counterexample = o.second_delivery;
                v.detail = a.name_of(p) + " delivered twice";
            }
            if (source_correct && o.delivered && *o.delivered != trace.broadcast_hex && v.pass) {
                v.pass = false;
                v.counterexample = o.first_delivery;
                v.detail = a.name_of(p) + " delivered a value the source never broadcast";
            }
        });
        add(std::move(v));
    }

    // Weak Totality: one correct delivery obliges every live correct
    // process to deliver or accuse.
    {
        PropertyVerdict v;
        v.property = "WeakTotality";
        bool any_delivered = false;
        correct.for_each([&](ProcessId p) {
            if (out[static_cast<std::size_t>(p)].delivered)
                any_delivered = true;
        });
        v.applicable = any_delivered;
        if (any_delivered) {
            correct.for_each([&](ProcessId p) {
                if (!is_live(a, p, scenario.faulty))
                    return;
                const auto& o = out[static_cast<std::size_t>(p)];
                if (!o.delivered && !o.accused) {
                    v.pass = false;
                    v.detail = "live correct process " + a.name_of(p) +
                               " neither delivered nor accused";
                }
            });
        }
        add(std::move(v));
    }

    // Accuracy: correct processes accuse only a faulty source, with a
    // verifiable proof.
    {
        PropertyVerdict v;
        v.property = "Accuracy";
        correct.for_each([&](ProcessId p) {
            const auto& o = out[static_cast<std::size_t>(p)];
            if (!o.accused)
                return;
            if (source_correct || !o.accuse_proof_ok) {
                if (v.pass) {
                    v.pass = false;
                    v.counterexample = o.accuse_index;
                    v.detail = source_correct
                                   ? a.name_of(p) + " accused a correct source"
                                   : a.name_of(p) + " accused with an invalid proof";
                }
            }
        });
        add(std::move(v));
    }

    // Certitude: one correct accusation spreads to all correct processes.
    {
        PropertyVerdict v;
        v.property = "Certitude";
        bool any_accused = false;
        correct.for_each([&](ProcessId p) {
            if (out[static_cast<std::size_t>(p)].accused)
                any_accused = true;
        });
        v.applicable = any_accused;
        if (any_accused) {
            correct.for_each([&](ProcessId p) {
                if (!out[static_cast<std::size_t>(p)].accused) {
                    v.pass = false;
                    v.detail = "correct process " + a.name_of(p) + " never accused";
                }
            });
        }
        add(std::move(v));
    }

    // Local Progress is a scenario-level property, exercised by the
    // dedicated probe rather than judged on arbitrary traces.
    {
        PropertyVerdict v;
        v.property = "LocalProgress";
        v.applicable = false;
        v.detail = "checked by local_progress_probe";
        add(std::move(v));
    }

    return report;
}

} // namespace crb
