#include "crb/mis.hpp"

#include <bit>

namespace crb {

namespace {

int clique_cover_bound(const BitGraph& g, std::uint64_t cand)
{
    // Greedily partition cand into cliques; the number of cliques bounds
    // the independence number from above.
    int cliques = 0;
    std::uint64_t rest = cand;
    while (rest != 0) {
        ++cliques;
        int seed = std::countr_zero(rest);
        rest &= rest - 1;
        std::uint64_t clique = std::uint64_t{1} << seed;
        std::uint64_t common = g.adj[static_cast<std::size_t>(seed)] & rest;
        while (common != 0) {
            int v = std::countr_zero(common);
            clique |= std::uint64_t{1} << v;
            rest &= ~(std::uint64_t{1} << v);
            common &= g.adj[static_cast<std::size_t>(v)];
            common &= rest;
        }
    }
    return cliques;
}

void search(const BitGraph& g, std::uint64_t cand, int size, int& best)
{
    while (true) {
        if (cand == 0) {
            if (size > best)
                best = size;
            return;
        }
        if (size + clique_cover_bound(g, cand) <= best)
            return;

        // Take isolated and degree-1 vertices outright.
        int pivot = -1, pivot_deg = -1;
        bool reduced = false;
        for (std::uint64_t b = cand; b != 0; b &= b - 1) {
            int v = std::countr_zero(b);
            std::uint64_t nb = g.adj[static_cast<std::size_t>(v)] & cand;
            int deg = std::popcount(nb);
            if (deg <= 1) {
                cand &= ~((std::uint64_t{1} << v) | nb);
                ++size;
                reduced = true;
                break;
            }
            if (deg > pivot_deg) {
                pivot_deg = deg;
                pivot = v;
            }
        }
        if (reduced)
            continue;

        // Branch on the highest-degree vertex: in or out.
        std::uint64_t closed = (std::uint64_t{1} << pivot) |
                               (g.adj[static_cast<std::size_t>(pivot)] & cand);
        search(g, cand & ~closed, size + 1, best);
        cand &= ~(std::uint64_t{1} << pivot);
    }
}

} // namespace

int mis_size(const BitGraph& g, std::uint64_t cand)
{
    int best = 0;
    search(g, cand, 0, best);
    return best;
}

std::uint64_t mis_lex_smallest(const BitGraph& g)
{
    const int target = mis_size(g, g.nodes);
    std::uint64_t chosen = 0;
    std::uint64_t cand = g.nodes;
    int have = 0;
    for (std::uint64_t b = g.nodes; b != 0; b &= b - 1) {
        int v = std::countr_zero(b);
        if (!((cand >> v) & 1))
            continue;
        std::uint64_t rest = cand & ~((std::uint64_t{1} << v) |
                                      g.adj[static_cast<std::size_t>(v)]);
        if (have + 1 + mis_size(g, rest) == target) {
            chosen |= std::uint64_t{1} << v;
            ++have;
            cand = rest;
        } else {
            cand &= ~(std::uint64_t{1} << v);
        }
    }
    return chosen;
}

int max_clique_size(const BitGraph& g, std::uint64_t cand)
{
    BitGraph comp;
    comp.init(cand);
    for (std::uint64_t b = cand; b != 0; b &= b - 1) {
        int v = std::countr_zero(b);
        comp.adj[static_cast<std::size_t>(v)] =
            cand & ~g.adj[static_cast<std::size_t>(v)] & ~(std::uint64_t{1} << v);
    }
    return mis_size(comp, cand);
}

} // namespace crb
