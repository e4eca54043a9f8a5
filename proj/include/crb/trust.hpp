#pragma once

#include "crb/procset.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace crb {

/// Raised when an operation receives arguments outside its contract
/// (out-of-range process ids, non-member faulty sets, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised by config parsing on malformed input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One quorum of a process.
struct Quorum {
    ProcSet members;
};

/// Per-process quorum lists: Q maps every process to a non-empty set of
/// quorums, each containing the process itself.
struct QuorumMap {
    std::vector<std::vector<ProcSet>> quorums; // indexed by ProcessId
};

/// Inclusion-closed fault model stored as its antichain of maximal sets.
/// A set is a member iff it is contained in some maximal set; the empty
/// set is always a member.
struct FaultModel {
    std::vector<ProcSet> maximal_sets;
};

/// The trust assumptions (Q, F) over n processes. Labels are
/// presentation-only; all internal identity is the dense index.
struct TrustAssumptions {
    int n = 0;
    std::vector<std::string> labels;
    QuorumMap quorum_map;
    FaultModel fault_model;

    ProcSet universe() const { return ProcSet::full(n); }
    const std::vector<ProcSet>& quorums_of(ProcessId p) const { return quorum_map.quorums[p]; }
    std::string name_of(ProcessId p) const
    {
        return p < static_cast<int>(labels.size()) ? labels[p] : ("#" + std::to_string(p));
    }
    std::string set_name(ProcSet s) const { return set_to_string(s, labels); }
};

/// A broken invariant, reported as data rather than thrown.
struct Violation {
    std::string message;
};

/// Checks every structural invariant of (Q, F); empty result means valid.
std::vector<Violation> validate(const TrustAssumptions& a);

/// True iff s is a member of the fault model, i.e. a subset of some
/// maximal set. Throws InputError on out-of-range ids.
bool is_faulty_set(const TrustAssumptions& a, ProcSet s);

/// True iff p has a quorum disjoint from the faulty set f.
/// Requires f in the fault model and p not in f.
bool is_live(const TrustAssumptions& a, ProcessId p, ProcSet f);

/// Every member of the fault model, each exactly once, ordered by size
/// then lexicographically.
std::vector<ProcSet> enumerate_faulty_sets(const FaultModel& fm);

/// Uniform f-resilient assumptions: every process trusts all
/// (n-f)-subsets containing itself; any f processes may fail.
TrustAssumptions generate_uniform(int n, int f);

/// c disjoint clusters of the given size; each process's only quorum is
/// its own cluster. The fault model admits any single faulty process.
TrustAssumptions generate_clusters(int clusters, int cluster_size);

/// JSON config round trip. The format is the CLI contract:
///   {"processes": ["p1",...],
///    "quorums": {"p1": [["p1","p2"], ...], ...},
///    "fault_model": {"maximal_sets": [["p3"], ...]}}
TrustAssumptions parse_config(const std::string& text);
std::string serialize_config(const TrustAssumptions& a);

} // namespace crb
