#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include "crb/mis.hpp"

#include <random>

using namespace crb;

namespace {

BitGraph random_graph(std::mt19937_64& rng, int n, double edge_prob)
{
    BitGraph g;
    g.init(ProcSet::full(n).bits());
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng) < edge_prob)
                g.add_edge(u, v);
    return g;
}

} // namespace

TEST_CASE("independence number on known graphs")
{
    BitGraph empty;
    empty.init(ProcSet::full(6).bits());
    CHECK(mis_size(empty, empty.nodes) == 6);

    BitGraph complete;
    complete.init(ProcSet::full(5).bits());
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v)
            complete.add_edge(u, v);
    CHECK(mis_size(complete, complete.nodes) == 1);

    BitGraph path; // 0-1-2-3-4
    path.init(ProcSet::full(5).bits());
    for (int v = 0; v + 1 < 5; ++v)
        path.add_edge(v, v + 1);
    CHECK(mis_size(path, path.nodes) == 3);
    CHECK(mis_lex_smallest(path) == test::set_of({0, 2, 4}).bits());

    BitGraph cycle = path;
    cycle.add_edge(4, 0);
    CHECK(mis_size(cycle, cycle.nodes) == 2);

    BitGraph none;
    none.init(0);
    CHECK(mis_size(none, 0) == 0);
    CHECK(mis_lex_smallest(none) == 0);
}

TEST_CASE("restricting the candidate set")
{
    BitGraph path;
    path.init(ProcSet::full(5).bits());
    for (int v = 0; v + 1 < 5; ++v)
        path.add_edge(v, v + 1);
    // Only vertices {1,2,3}: the induced path 1-2-3 has independence 2.
    CHECK(mis_size(path, test::set_of({1, 2, 3}).bits()) == 2);
    CHECK(mis_size(path, test::set_of({2}).bits()) == 1);
}

TEST_CASE("solver matches exhaustive enumeration on random graphs")
{
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 120; ++i) {
        int n = 1 + static_cast<int>(rng() % 11);
        double p = (i % 10) / 10.0;
        BitGraph g = random_graph(rng, n, p);
        CAPTURE(i);
        REQUIRE(mis_size(g, g.nodes) == test::brute_mis(g, g.nodes));
    }
}

TEST_CASE("witness extraction returns the smallest maximum set")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 60; ++i) {
        int n = 2 + static_cast<int>(rng() % 8);
        BitGraph g = random_graph(rng, n, 0.4);
        std::uint64_t w = mis_lex_smallest(g);
        CAPTURE(i);
        REQUIRE(test::independent_in(g, w));
        REQUIRE(std::popcount(w) == mis_size(g, g.nodes));
        REQUIRE(w == test::brute_mis_lex_smallest(g));
    }
}

TEST_CASE("clique size via the complement")
{
    BitGraph complete;
    complete.init(ProcSet::full(4).bits());
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v)
            complete.add_edge(u, v);
    CHECK(max_clique_size(complete, complete.nodes) == 4);

    BitGraph empty;
    empty.init(ProcSet::full(4).bits());
    CHECK(max_clique_size(empty, empty.nodes) == 1);

    BitGraph cycle5;
    cycle5.init(ProcSet::full(5).bits());
    for (int v = 0; v < 5; ++v)
        cycle5.add_edge(v, (v + 1) % 5);
    CHECK(max_clique_size(cycle5, cycle5.nodes) == 2);

    std::mt19937_64 rng(99);
    for (int i = 0; i < 40; ++i) {
        int n = 1 + static_cast<int>(rng() % 10);
        BitGraph g = random_graph(rng, n, 0.5);
        // A clique of g is an independent set of the complement.
        BitGraph comp;
        comp.init(g.nodes);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (!g.has_edge(u, v))
                    comp.add_edge(u, v);
        CAPTURE(i);
        REQUIRE(max_clique_size(g, g.nodes) == test::brute_mis(comp, comp.nodes));
    }
}
