#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include "crb/trust.hpp"

using namespace crb;
using test::example1;
using test::set_of;

TEST_CASE("shipped four-process config parses to the expected structure")
{
    TrustAssumptions a = example1();
    CHECK(a.n == 4);
    CHECK(a.labels == std::vector<std::string>{"p1", "p2", "p3", "p4"});

    CHECK(a.quorums_of(0) == std::vector<ProcSet>{set_of({0, 1, 2}), set_of({0, 2, 3})});
    CHECK(a.quorums_of(1) == std::vector<ProcSet>{set_of({0, 1, 2}), set_of({1, 2, 3})});
    CHECK(a.quorums_of(2) == std::vector<ProcSet>{set_of({0, 1, 2}), set_of({1, 2, 3})});
    CHECK(a.quorums_of(3) ==
          std::vector<ProcSet>{set_of({0, 2, 3}), set_of({1, 3}), set_of({2, 3})});

    REQUIRE(a.fault_model.maximal_sets.size() == 1);
    CHECK(a.fault_model.maximal_sets[0] == set_of({2}));

    CHECK(validate(a).empty());
}

TEST_CASE("validate reports structural violations")
{
    SUBCASE("quorum missing its owner")
    {
        TrustAssumptions a = example1();
        a.quorum_map.quorums[0][0].remove(0);
        auto v = validate(a);
        REQUIRE(v.size() == 1);
        CHECK(v[0].message.find("does not include p1") != std::string::npos);
    }
    SUBCASE("fault model not an antichain")
    {
        TrustAssumptions a = example1();
        a.fault_model.maximal_sets = {set_of({0}), set_of({0, 1})};
        auto v = validate(a);
        REQUIRE(v.size() == 1);
        CHECK(v[0].message.find("antichain") != std::string::npos);
    }
    SUBCASE("duplicate quorum in one list")
    {
        TrustAssumptions a = example1();
        a.quorum_map.quorums[1].push_back(a.quorum_map.quorums[1][0]);
        CHECK(validate(a).size() == 1);
    }
    SUBCASE("process without quorums")
    {
        TrustAssumptions a = example1();
        a.quorum_map.quorums[3].clear();
        CHECK(validate(a).size() == 1);
    }
    SUBCASE("empty system")
    {
        TrustAssumptions a;
        CHECK_FALSE(validate(a).empty());
    }
    SUBCASE("quorum referencing unknown processes")
    {
        TrustAssumptions a = example1();
        a.quorum_map.quorums[0][0].add(17);
        CHECK_FALSE(validate(a).empty());
    }
}

TEST_CASE("fault-model membership")
{
    TrustAssumptions a = example1();
    CHECK(is_faulty_set(a, set_of({2})));
    CHECK(is_faulty_set(a, ProcSet{}));
    CHECK_FALSE(is_faulty_set(a, set_of({0})));
    CHECK_FALSE(is_faulty_set(a, set_of({0, 2})));
    CHECK_THROWS_AS(is_faulty_set(a, set_of({9})), InputError);

    // Inclusion-closure: membership is monotone downward.
    TrustAssumptions u = generate_uniform(6, 2);
    for (std::uint64_t bits = 0; bits < 64; ++bits) {
        ProcSet s(bits);
        if (!is_faulty_set(u, s))
            continue;
        s.for_each([&](ProcessId p) {
            ProcSet smaller = s;
            smaller.remove(p);
            CHECK(is_faulty_set(u, smaller));
        });
    }
}

TEST_CASE("liveness against a faulty set")
{
    TrustAssumptions a = example1();
    CHECK(is_live(a, 3, set_of({2})));       // {p2,p4} avoids p3
    CHECK_FALSE(is_live(a, 0, set_of({2}))); // both quorums of p1 contain p3
    for (ProcessId p = 0; p < a.n; ++p)
        CHECK(is_live(a, p, ProcSet{}));
    CHECK_THROWS_AS(is_live(a, 2, set_of({2})), InputError); // p3 itself faulty
    CHECK_THROWS_AS(is_live(a, 0, set_of({0, 1})), InputError); // not a member
}

TEST_CASE("enumerating fault-model members")
{
    SUBCASE("single maximal set unfolds to its power set")
    {
        FaultModel fm{{set_of({0, 1})}};
        auto sets = enumerate_faulty_sets(fm);
        CHECK(sets == std::vector<ProcSet>{ProcSet{}, set_of({0}), set_of({1}), set_of({0, 1})});
    }
    SUBCASE("overlapping maximal sets deduplicate")
    {
        FaultModel fm{{set_of({0, 1}), set_of({1, 2})}};
        auto sets = enumerate_faulty_sets(fm);
        CHECK(sets == std::vector<ProcSet>{ProcSet{}, set_of({0}), set_of({1}), set_of({2}),
                                           set_of({0, 1}), set_of({1, 2})});
    }
    SUBCASE("empty fault model still contains the empty set")
    {
        auto sets = enumerate_faulty_sets(FaultModel{});
        CHECK(sets == std::vector<ProcSet>{ProcSet{}});
    }
}

TEST_CASE("uniform generator")
{
    TrustAssumptions a = generate_uniform(4, 1);
    CHECK(validate(a).empty());
    for (ProcessId p = 0; p < 4; ++p) {
        const auto& qs = a.quorums_of(p);
        CHECK(qs.size() == 3); // the 3-subsets of 4 processes containing p
        for (ProcSet q : qs) {
            CHECK(q.count() == 3);
            CHECK(q.contains(p));
        }
    }
    CHECK(a.fault_model.maximal_sets.size() == 4);
    for (ProcSet m : a.fault_model.maximal_sets)
        CHECK(m.count() == 1);

    SUBCASE("degenerate single process")
    {
        TrustAssumptions one = generate_uniform(1, 0);
        CHECK(validate(one).empty());
        CHECK(one.quorums_of(0) == std::vector<ProcSet>{set_of({0})});
        CHECK(one.fault_model.maximal_sets.empty());
    }
    SUBCASE("parameter errors")
    {
        CHECK_THROWS_AS(generate_uniform(0, 0), InputError);
        CHECK_THROWS_AS(generate_uniform(4, 4), InputError);
        CHECK_THROWS_AS(generate_uniform(65, 1), InputError);
    }
}

TEST_CASE("cluster generator")
{
    TrustAssumptions a = generate_clusters(2, 2);
    CHECK(validate(a).empty());
    CHECK(a.n == 4);
    CHECK(a.quorums_of(0) == std::vector<ProcSet>{set_of({0, 1})});
    CHECK(a.quorums_of(1) == std::vector<ProcSet>{set_of({0, 1})});
    CHECK(a.quorums_of(2) == std::vector<ProcSet>{set_of({2, 3})});
    CHECK(a.quorums_of(3) == std::vector<ProcSet>{set_of({2, 3})});
    CHECK(a.fault_model.maximal_sets.size() == 4);
    CHECK_THROWS_AS(generate_clusters(0, 3), InputError);
    CHECK_THROWS_AS(generate_clusters(9, 8), InputError);
}

TEST_CASE("config serialization round trip")
{
    TrustAssumptions a = example1();
    TrustAssumptions b = parse_config(serialize_config(a));
    CHECK(b.n == a.n);
    CHECK(b.labels == a.labels);
    for (ProcessId p = 0; p < a.n; ++p)
        CHECK(b.quorums_of(p) == a.quorums_of(p));
    CHECK(b.fault_model.maximal_sets == a.fault_model.maximal_sets);
}

TEST_CASE("config parse errors")
{
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[]"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"processes": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"processes": ["a", "a"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"processes": ["a"], "quorums": {"b": [["a"]]}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"processes": ["a"], "quorums": {"a": [["zzz"]]}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"processes": ["a"], "fault_model": {}})"), ConfigError);

    // Semantic problems are validate's job, not the parser's.
    TrustAssumptions sparse = parse_config(R"({"processes": ["a", "b"]})");
    CHECK_FALSE(validate(sparse).empty());
}
