#pragma once

#include "crb/mis.hpp"
#include "crb/trust.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace crb {

/// One quorum choice per correct process, built against a fixed faulty
/// set. Faulty positions carry index -1 and an empty set.
struct QuorumSelection {
    ProcSet faulty;
    std::vector<int> index;     // per ProcessId: which quorum of Q(p)
    std::vector<ProcSet> chosen; // per ProcessId: the quorum itself

    ProcSet quorum_of(ProcessId p) const { return chosen[static_cast<std::size_t>(p)]; }
};

/// The execution graph: nodes are the correct processes, an edge means
/// the two chosen quorums intersect outside the faulty set.
struct ExecutionGraph {
    ProcSet faulty;
    ProcSet nodes;
    BitGraph graph;
    QuorumSelection selection;

    bool has_edge(ProcessId p, ProcessId q) const { return graph.has_edge(p, q); }
};

/// Witness for the inconsistency number: the faulty set, selection and
/// independent set realizing k_max.
struct InconsistencyWitness {
    int k_max = 0;
    ProcSet faulty;
    QuorumSelection selection;
    ProcSet independent_set;
};

struct SearchStats {
    std::uint64_t fault_sets_total = 0;
    std::uint64_t fault_sets_pruned = 0;
    std::uint64_t selections_enumerated = 0;
    std::uint64_t selections_deduped = 0;
    std::uint64_t graphs_examined = 0;
    double seconds = 0.0;
};

struct AnalysisOptions {
    bool dedup = true;   // skip selections equal after projecting out F
    int threads = 0;     // 0 = hardware concurrency
};

struct AnalysisResult {
    InconsistencyWitness witness;
    SearchStats stats;
};

/// Builds G_{F,S}. Requires f in the fault model and s built against f.
ExecutionGraph build_execution_graph(const TrustAssumptions& a, ProcSet f,
                                     const QuorumSelection& s);

/// Maximum independent set, lexicographically smallest among maximums.
ProcSet maximum_independent_set(const ExecutionGraph& g);

int independence_number(const ExecutionGraph& g);

/// Selection with quorum `index[p]` for each correct p (helper for
/// constructing specific selections in tests and attacks).
QuorumSelection make_selection(const TrustAssumptions& a, ProcSet f,
                               const std::vector<int>& index_per_correct);

/// Streams the Cartesian product of Q(p) over correct processes in
/// deterministic (lexicographic by process, then quorum list) order.
/// With dedup, selections whose projections S(p) \ f all repeat an
/// earlier selection are skipped. Returning false stops enumeration.
void for_each_selection(const TrustAssumptions& a, ProcSet f, bool dedup,
                        const std::function<bool(const QuorumSelection&)>& fn);

/// Materialized variant, mainly for tests.
std::vector<QuorumSelection> enumerate_selections(const TrustAssumptions& a, ProcSet f,
                                                  bool dedup = false);

/// The inconsistency number k_max of (Q, F) with a deterministic witness:
/// the first faulty set (size/lex order) and lexicographically first
/// selection realizing it.
AnalysisResult inconsistency_number(const TrustAssumptions& a, AnalysisOptions opts = {});

/// Like inconsistency_number but restricted to non-empty faulty sets,
/// used to stage the partition attack (the attack needs a Byzantine
/// source, which an empty faulty set cannot provide).
std::optional<InconsistencyWitness> attackable_witness(const TrustAssumptions& a,
                                                       int required_k);

} // namespace crb
