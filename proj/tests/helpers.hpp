#pragma once

// Shared fixtures and independent brute-force oracles for the test
// suite. The oracles deliberately avoid the library's search code: they
// enumerate subsets exhaustively so library results are checked against
// first principles.

#include "crb/graph.hpp"
#include "crb/mis.hpp"
#include "crb/trust.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace test {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline crb::TrustAssumptions example1()
{
    return crb::parse_config(read_file(std::string(CONFIGS_DIR) + "/example1.json"));
}

inline crb::ProcSet set_of(std::initializer_list<int> ids)
{
    crb::ProcSet s;
    for (int id : ids)
        s.add(id);
    return s;
}

inline bool independent_in(const crb::BitGraph& g, std::uint64_t sub)
{
    for (std::uint64_t b = sub; b != 0; b &= b - 1) {
        int v = std::countr_zero(b);
        if (g.adj[static_cast<std::size_t>(v)] & sub)
            return false;
    }
    return true;
}

/// Exhaustive subset enumeration; exponential, fine up to ~20 nodes.
inline int brute_mis(const crb::BitGraph& g, std::uint64_t cand)
{
    int best = 0;
    std::uint64_t sub = cand;
    while (true) {
        if (independent_in(g, sub))
            best = std::max(best, std::popcount(sub));
        if (sub == 0)
            break;
        sub = (sub - 1) & cand;
    }
    return best;
}

/// Smallest maximum independent set under the member-list ordering,
/// found by exhaustive enumeration.
inline std::uint64_t brute_mis_lex_smallest(const crb::BitGraph& g)
{
    const int target = brute_mis(g, g.nodes);
    std::uint64_t best = 0;
    bool found = false;
    std::uint64_t sub = g.nodes;
    while (true) {
        if (std::popcount(sub) == target && independent_in(g, sub)) {
            if (!found || crb::set_order_less(crb::ProcSet(sub), crb::ProcSet(best))) {
                best = sub;
                found = true;
            }
        }
        if (sub == 0)
            break;
        sub = (sub - 1) & g.nodes;
    }
    return best;
}

/// Full-enumeration inconsistency number: every fault-model member,
/// every selection, brute-force independence number.
inline int brute_k_max(const crb::TrustAssumptions& a)
{
    int best = 0;
    for (crb::ProcSet f : crb::enumerate_faulty_sets(a.fault_model)) {
        crb::for_each_selection(a, f, false, [&](const crb::QuorumSelection& s) {
            auto g = crb::build_execution_graph(a, f, s);
            best = std::max(best, brute_mis(g.graph, g.nodes.bits()));
            return true;
        });
    }
    return best;
}

/// Random valid trust assumptions with 2..max_n processes, non-empty
/// maximal faulty sets, and at least one correct process under every
/// fault-model member.
inline crb::TrustAssumptions random_assumptions(std::mt19937_64& rng, int max_n)
{
    crb::TrustAssumptions a;
    a.n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n - 1));
    for (int i = 0; i < a.n; ++i)
        a.labels.push_back("p" + std::to_string(i + 1));
    const std::uint64_t mask = a.universe().bits();

    a.quorum_map.quorums.resize(static_cast<std::size_t>(a.n));
    for (crb::ProcessId p = 0; p < a.n; ++p) {
        auto& qs = a.quorum_map.quorums[static_cast<std::size_t>(p)];
        // A process has only 2^(n-1) distinct quorums containing itself.
        const int distinct_max = a.n >= 7 ? 64 : (1 << (a.n - 1));
        const int want = std::min(1 + static_cast<int>(rng() % 3), distinct_max);
        while (static_cast<int>(qs.size()) < want) {
            crb::ProcSet q(rng() & mask);
            q.add(p);
            if (std::find(qs.begin(), qs.end(), q) == qs.end())
                qs.push_back(q);
        }
    }

    const int want_sets = 1 + static_cast<int>(rng() % 2);
    while (static_cast<int>(a.fault_model.maximal_sets.size()) < want_sets) {
        crb::ProcSet m(rng() & mask);
        if (m.empty() || m == a.universe())
            continue;
        bool keep = true;
        auto& ms = a.fault_model.maximal_sets;
        for (auto it = ms.begin(); it != ms.end();) {
            if (m.subset_of(*it)) {
                keep = false;
                break;
            }
            if (it->subset_of(m))
                it = ms.erase(it);
            else
                ++it;
        }
        if (keep)
            ms.push_back(m);
    }
    return a;
}

} // namespace test
