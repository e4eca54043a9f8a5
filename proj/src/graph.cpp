#include "crb/graph.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <thread>
#include <unordered_set>

namespace crb {

namespace {

void require_member(const TrustAssumptions& a, ProcSet f)
{
    if (!is_faulty_set(a, f))
        throw InputError("faulty set " + a.set_name(f) + " is not a member of the fault model");
}

void require_selection(const TrustAssumptions& a, ProcSet f, const QuorumSelection& s)
{
    if (s.faulty != f)
        throw InputError("selection was built against a different faulty set");
    const ProcSet correct = a.universe() - f;
    if (static_cast<int>(s.chosen.size()) != a.n)
        throw InputError("selection domain does not match the process set");
    for (ProcessId p = 0; p < a.n; ++p) {
        if (!correct.contains(p))
            continue;
        const auto& qs = a.quorums_of(p);
        int idx = s.index[static_cast<std::size_t>(p)];
        if (idx < 0 || idx >= static_cast<int>(qs.size()) ||
            qs[static_cast<std::size_t>(idx)] != s.chosen[static_cast<std::size_t>(p)])
            throw InputError("selection does not pick a quorum of " + a.name_of(p));
    }
}

} // namespace

ExecutionGraph build_execution_graph(const TrustAssumptions& a, ProcSet f,
                                     const QuorumSelection& s)
{
    require_member(a, f);
    require_selection(a, f, s);

    ExecutionGraph g;
    g.faulty = f;
    g.nodes = a.universe() - f;
    g.selection = s;
    g.graph.init(g.nodes.bits());

    const auto nodes = g.nodes.members();
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            ProcSet inter = s.quorum_of(nodes[i]) & s.quorum_of(nodes[j]);
            if (!inter.subset_of(f))
                g.graph.add_edge(nodes[i], nodes[j]);
        }
    return g;
}

ProcSet maximum_independent_set(const ExecutionGraph& g)
{
    return ProcSet(mis_lex_smallest(g.graph));
}

int independence_number(const ExecutionGraph& g)
{
    return mis_size(g.graph, g.nodes.bits());
}

QuorumSelection make_selection(const TrustAssumptions& a, ProcSet f,
                               const std::vector<int>& index_per_correct)
{
    QuorumSelection s;
    s.faulty = f;
    s.index.assign(static_cast<std::size_t>(a.n), -1);
    s.chosen.assign(static_cast<std::size_t>(a.n), ProcSet{});
    const ProcSet correct = a.universe() - f;
    std::size_t at = 0;
    for (ProcessId p = 0; p < a.n; ++p) {
        if (!correct.contains(p))
            continue;
        if (at >= index_per_correct.size())
            throw InputError("selection index list is shorter than the correct process count");
        int idx = index_per_correct[at++];
        const auto& qs = a.quorums_of(p);
        if (idx < 0 || idx >= static_cast<int>(qs.size()))
            throw InputError("quorum index out of range for " + a.name_of(p));
        s.index[static_cast<std::size_t>(p)] = idx;
        s.chosen[static_cast<std::size_t>(p)] = qs[static_cast<std::size_t>(idx)];
    }
    if (at != index_per_correct.size())
        throw InputError("selection index list is longer than the correct process count");
    return s;
}

namespace {

struct ProjectionKeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& key) const
    {
        std::size_t h = 1469598103934665603ull;
        for (std::uint64_t v : key) {
            h ^= static_cast<std::size_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace

void for_each_selection(const TrustAssumptions& a, ProcSet f, bool dedup,
                        const std::function<bool(const QuorumSelection&)>& fn)
{
    require_member(a, f);
    const auto correct = (a.universe() - f).members();

    QuorumSelection s;
    s.faulty = f;
    s.index.assign(static_cast<std::size_t>(a.n), -1);
    s.chosen.assign(static_cast<std::size_t>(a.n), ProcSet{});
    for (ProcessId p : correct) {
        s.index[static_cast<std::size_t>(p)] = 0;
        s.chosen[static_cast<std::size_t>(p)] = a.quorums_of(p)[0];
    }

    std::unordered_set<std::vector<std::uint64_t>, ProjectionKeyHash> seen;
    std::vector<std::uint64_t> key(correct.size());

    while (true) {
        bool skip = false;
        if (dedup) {
            // Only quorum members outside f influence the graph.
            for (std::size_t i = 0; i < correct.size(); ++i)
                key[i] = (s.quorum_of(correct[i]) - f).bits();
            skip = !seen.insert(key).second;
        }
        if (!skip && !fn(s))
            return;

        // Odometer: last correct process cycles fastest, so selections
        // stream in lexicographic order.
        int pos = static_cast<int>(correct.size()) - 1;
        for (; pos >= 0; --pos) {
            ProcessId p = correct[static_cast<std::size_t>(pos)];
            int& idx = s.index[static_cast<std::size_t>(p)];
            if (idx + 1 < static_cast<int>(a.quorums_of(p).size())) {
                ++idx;
                s.chosen[static_cast<std::size_t>(p)] = a.quorums_of(p)[static_cast<std::size_t>(idx)];
                break;
            }
            idx = 0;
            s.chosen[static_cast<std::size_t>(p)] = a.quorums_of(p)[0];
        }
        if (pos < 0)
            return;
    }
}

std::vector<QuorumSelection> enumerate_selections(const TrustAssumptions& a, ProcSet f,
                                                  bool dedup)
{
    std::vector<QuorumSelection> out;
    for_each_selection(a, f, dedup, [&](const QuorumSelection& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

namespace {

struct RangeResult {
    int best = 0;
    std::size_t fault_pos = 0; // position of the winning faulty set
    InconsistencyWitness witness;
    SearchStats stats;
};

// Pairwise conflict possibility under f: (p,q) marked iff some quorum
// pair intersects only inside f. Any independent pair in any G_{f,S} must
// be marked, so a clique bound on this graph caps alpha over all S.
BitGraph conflict_possibility(const TrustAssumptions& a, ProcSet f)
{
    BitGraph conf;
    const ProcSet correct = a.universe() - f;
    conf.init(correct.bits());
    const auto nodes = correct.members();
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            bool possible = false;
            for (ProcSet qi : a.quorums_of(nodes[i])) {
                for (ProcSet qj : a.quorums_of(nodes[j]))
                    if ((qi & qj).subset_of(f)) {
                        possible = true;
                        break;
                    }
                if (possible)
                    break;
            }
            if (possible)
                conf.add_edge(nodes[i], nodes[j]);
        }
    return conf;
}

// Exhausts one faulty set, updating the running best/witness. Processes
// whose quorum choice cannot create a missing edge are pinned to their
// first quorum; their edges are present in every graph, so they never
// join an independent pair and the maximum is unaffected.
void search_fault_set(const TrustAssumptions& a, ProcSet f, std::size_t fault_pos,
                      bool dedup, RangeResult& r)
{
    const ProcSet correct = a.universe() - f;
    BitGraph conf = conflict_possibility(a, f);
    int bound = correct.empty() ? 0 : max_clique_size(conf, correct.bits());
    if (bound <= r.best) {
        ++r.stats.fault_sets_pruned;
        return;
    }

    std::vector<ProcessId> relevant;
    for (ProcessId p : correct.members())
        if (conf.adj[static_cast<std::size_t>(p)] != 0)
            relevant.push_back(p);

    QuorumSelection s;
    s.faulty = f;
    s.index.assign(static_cast<std::size_t>(a.n), -1);
    s.chosen.assign(static_cast<std::size_t>(a.n), ProcSet{});
    for (ProcessId p : correct.members()) {
        s.index[static_cast<std::size_t>(p)] = 0;
        s.chosen[static_cast<std::size_t>(p)] = a.quorums_of(p)[0];
    }

    std::unordered_set<std::vector<std::uint64_t>, ProjectionKeyHash> seen;
    std::vector<std::uint64_t> key(relevant.size());
    const auto nodes = correct.members();

    while (true) {
        ++r.stats.selections_enumerated;
        bool skip = false;
        if (dedup) {
            for (std::size_t i = 0; i < relevant.size(); ++i)
                key[i] = (s.quorum_of(relevant[i]) - f).bits();
            skip = !seen.insert(key).second;
            if (skip)
                ++r.stats.selections_deduped;
        }

        if (!skip) {
            BitGraph g;
            g.init(correct.bits());
            for (std::size_t i = 0; i < nodes.size(); ++i)
                for (std::size_t j = i + 1; j < nodes.size(); ++j)
                    if (!(s.quorum_of(nodes[i]) & s.quorum_of(nodes[j])).subset_of(f))
                        g.add_edge(nodes[i], nodes[j]);
            ++r.stats.graphs_examined;
            int alpha = mis_size(g, correct.bits());
            if (alpha > r.best) {
                r.best = alpha;
                r.fault_pos = fault_pos;
                r.witness.k_max = alpha;
                r.witness.faulty = f;
                r.witness.selection = s;
                r.witness.independent_set = ProcSet(mis_lex_smallest(g));
            }
            if (alpha == bound)
                return; // nothing in this faulty set can do better
        }

        int pos = static_cast<int>(relevant.size()) - 1;
        for (; pos >= 0; --pos) {
            ProcessId p = relevant[static_cast<std::size_t>(pos)];
            int& idx = s.index[static_cast<std::size_t>(p)];
            if (idx + 1 < static_cast<int>(a.quorums_of(p).size())) {
                ++idx;
                s.chosen[static_cast<std::size_t>(p)] = a.quorums_of(p)[static_cast<std::size_t>(idx)];
                break;
            }
            idx = 0;
            s.chosen[static_cast<std::size_t>(p)] = a.quorums_of(p)[0];
        }
        if (pos < 0)
            return;
    }
}

RangeResult search_range(const TrustAssumptions& a, const std::vector<ProcSet>& faulty_sets,
                         std::size_t lo, std::size_t hi, bool dedup)
{
    RangeResult r;
    for (std::size_t i = lo; i < hi; ++i)
        search_fault_set(a, faulty_sets[i], i, dedup, r);
    return r;
}

RangeResult run_search(const TrustAssumptions& a, const std::vector<ProcSet>& faulty_sets,
                       const AnalysisOptions& opts)
{
    const std::size_t total = faulty_sets.size();
    unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(total, 1)));

    RangeResult merged;
    if (threads <= 1 || total <= 1) {
        merged = search_range(a, faulty_sets, 0, total, opts.dedup);
    } else {
        // Contiguous chunks keep the reduction deterministic: the winner
        // is the highest k, ties broken by earliest faulty-set position.
        std::vector<std::future<RangeResult>> futures;
        const std::size_t chunk = (total + threads - 1) / threads;
        for (std::size_t lo = 0; lo < total; lo += chunk) {
            std::size_t hi = std::min(total, lo + chunk);
            futures.push_back(std::async(std::launch::async, [&a, &faulty_sets, lo, hi, &opts] {
                return search_range(a, faulty_sets, lo, hi, opts.dedup);
            }));
        }
        bool first = true;
        for (auto& fut : futures) {
            RangeResult part = fut.get();
            merged.stats.fault_sets_pruned += part.stats.fault_sets_pruned;
            merged.stats.selections_enumerated += part.stats.selections_enumerated;
            merged.stats.selections_deduped += part.stats.selections_deduped;
            merged.stats.graphs_examined += part.stats.graphs_examined;
            const bool wins = first || part.best > merged.best ||
                              (part.best == merged.best && part.fault_pos < merged.fault_pos);
            if (wins) {
                merged.best = part.best;
                merged.fault_pos = part.fault_pos;
                merged.witness = part.witness;
            }
            first = false;
        }
    }
    merged.stats.fault_sets_total = total;
    return merged;
}

} // namespace

AnalysisResult inconsistency_number(const TrustAssumptions& a, AnalysisOptions opts)
{
    if (!validate(a).empty())
        throw InputError("trust assumptions are invalid; run validate for details");

    const auto start = std::chrono::steady_clock::now();
    const auto faulty_sets = enumerate_faulty_sets(a.fault_model);
    RangeResult r = run_search(a, faulty_sets, opts);

    AnalysisResult res;
    res.witness = r.witness;
    res.witness.k_max = r.best;
    res.stats = r.stats;
    res.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::optional<InconsistencyWitness> attackable_witness(const TrustAssumptions& a,
                                                       int required_k)
{
    auto faulty_sets = enumerate_faulty_sets(a.fault_model);
    faulty_sets.erase(std::remove_if(faulty_sets.begin(), faulty_sets.end(),
                                     [](ProcSet f) { return f.empty(); }),
                      faulty_sets.end());
    if (faulty_sets.empty())
        return std::nullopt;
    RangeResult r = search_range(a, faulty_sets, 0, faulty_sets.size(), true);
    if (r.best != required_k)
        return std::nullopt;
    r.witness.k_max = r.best;
    return r.witness;
}

} // namespace crb
