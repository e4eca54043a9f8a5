#pragma once

#include "crb/graph.hpp"
#include "crb/protocol.hpp"
#include "crb/trust.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crb {

/// Raised when a run exhausts its step budget or wedges before
/// quiescence.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AdversaryKind {
    None,            // faulty processes stay silent (same as Silent)
    Silent,
    EquivocateSplit, // faulty source feeds different values to process groups
    Crash,           // faulty processes behave correctly, then stop
    Scripted,        // explicit envelope emissions per step
    Partition        // staged partition attack realizing k_max deliveries
};

const char* adversary_name(AdversaryKind k);
std::optional<AdversaryKind> adversary_from_name(const std::string& name);

/// One scripted adversary emission, in terms of value indices so the
/// script stays serializable; envelopes are materialized inside the
/// simulator with the faulty coalition's keys only.
struct ScriptItem {
    std::uint64_t step = 0;
    ProcessId from = 0;
    ProcessId to = 0;
    MsgKind kind = MsgKind::Send;
    int v1 = 0;
    int v2 = 0; // second value of an ACC proof; v2 == v1 makes it invalid
};

struct Scenario {
    TrustAssumptions assumptions;
    Instance instance;                 // instance.source is the source
    ProcSet faulty;                    // must be a fault-model member
    AdversaryKind adversary = AdversaryKind::None;
    std::vector<Value> values;         // values[0] is the honest broadcast value
    std::uint64_t crash_step = 0;      // Crash: no events at steps >= this
    std::vector<ScriptItem> script;    // Scripted

    // Partition attack (filled by partition_attack):
    std::vector<ProcessId> partition_targets; // independent set, ascending
    std::vector<ProcSet> partition_groups;    // s(p_i) per target

    // Local-progress probe: only messages within this set are delivered;
    // the rest are discarded at send time.
    bool probe = false;
    ProcSet probe_allowed;

    std::uint64_t seed = 0;
    std::uint64_t step_budget = 1'000'000;
};

struct TraceEntry {
    std::uint64_t index = 0;
    std::uint64_t step = 0;
    std::string event;       // broadcast|send|receive|deliver|accuse|drop|suppress
    ProcessId process = -1;  // acting process
    ProcessId peer = -1;     // counterparty for send/receive
    std::uint64_t msg = 0;   // message sequence number (send/receive matching)
    std::string kind;        // SEND|ECHO|ACC for message events
    std::string payload_hex; // envelope or value bytes
    bool proof_ok = false;   // accuse entries: proof verified against the instance
};

struct ProcessSummary {
    bool faulty = false;
    bool live = false;
    std::optional<std::string> delivered_hex;
    bool accused = false;
};

struct Trace {
    std::vector<TraceEntry> entries;
    std::vector<ProcessSummary> summary;
    bool quiescent = false;
    std::uint64_t steps = 0;
    std::string broadcast_hex; // honest value when the source is correct

    std::string to_jsonl() const;
};

std::string to_hex(const std::string& bytes);

/// Runs the scenario to quiescence under a seeded scheduler. Identical
/// scenarios and seeds reproduce the trace byte for byte.
Trace run(const Scenario& scenario);

/// Every send between correct processes has exactly one matching
/// receive; harness self-check used by the tests.
bool verify_channels(const Trace& trace);

/// Builds the partition-attack scenario: the faulty source drives each
/// member of the independent set to deliver its own value before any
/// cross-partition message is released.
Scenario partition_attack(const TrustAssumptions& a, ProcessId source, ProcSet f,
                          const QuorumSelection& s, ProcSet independent_set,
                          const std::vector<Value>& values, std::uint64_t seed = 0);

/// Honest run where traffic outside {source} + q is discarded; local
/// progress holds if p still delivers.
Trace local_progress_probe(const TrustAssumptions& a, ProcessId source, ProcessId p,
                           ProcSet q, std::uint64_t seed = 0);

/// Seeded random adversary script: arbitrary SEND/ECHO/ACC emissions
/// from the faulty coalition, drawing on the scenario's value pool.
std::vector<ScriptItem> random_script(int n, ProcSet faulty, int value_count,
                                      std::size_t items, std::uint64_t seed);

struct PropertyVerdict {
    std::string property;
    bool pass = true;
    bool applicable = true;
    std::string detail;
    long counterexample = -1; // trace entry index
};

struct OracleReport {
    std::vector<PropertyVerdict> verdicts;
    int distinct_delivered = 0;
    int k_bound = 0;
    bool all_pass = true;

    const PropertyVerdict* find(const std::string& property) const;
    std::string to_json() const;
};

/// Evaluates Validity, k-Consistency, Integrity, Weak Totality,
/// Accuracy and Certitude on a quiescent trace.
OracleReport check_trace(const Trace& trace, const Scenario& scenario, int k_bound);

} // namespace crb
