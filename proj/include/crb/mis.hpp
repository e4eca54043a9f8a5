#pragma once

#include "crb/procset.hpp"

#include <cstdint>
#include <vector>

namespace crb {

/// Undirected graph on ids 0..63 as adjacency bitmasks. Only the ids in
/// `nodes` are meaningful; adjacency rows must be masked accordingly.
struct BitGraph {
    std::uint64_t nodes = 0;
    std::vector<std::uint64_t> adj; // indexed by id, adj[v] excludes v

    void init(std::uint64_t node_mask)
    {
        nodes = node_mask;
        adj.assign(64, 0);
    }
    void add_edge(int u, int v)
    {
        adj[static_cast<std::size_t>(u)] |= std::uint64_t{1} << v;
        adj[static_cast<std::size_t>(v)] |= std::uint64_t{1} << u;
    }
    bool has_edge(int u, int v) const
    {
        return (adj[static_cast<std::size_t>(u)] >> v) & 1;
    }
};

/// Size of a maximum independent set within `cand`. Exact branch and
/// bound: degree-<=1 vertices are taken greedily, branching pivots on the
/// highest-degree vertex, with a greedy clique-cover upper bound.
int mis_size(const BitGraph& g, std::uint64_t cand);

/// Lexicographically smallest maximum independent set of the graph
/// (smallest ids preferred, decided front to back).
std::uint64_t mis_lex_smallest(const BitGraph& g);

/// Largest clique size within `cand`; solved as MIS on the complement.
int max_clique_size(const BitGraph& g, std::uint64_t cand);

} // namespace crb
