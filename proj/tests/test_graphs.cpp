#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "exclusion/graphs.hpp"
#include "exclusion/rng.hpp"
#include "oracles.hpp"

using namespace excl;

namespace {
const char* kPrismEdges =
    "6 3\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n0 3\n1 4\n2 5\n";

RegularGraph prism() {
    std::istringstream is(kPrismEdges);
    return graph_from_edge_list(is, "prism");
}

RegularGraph mobius_ladder12() {
    std::ostringstream os;
    os << "12 3\n";
    for (int i = 0; i < 12; ++i) os << i << " " << (i + 1) % 12 << "\n";
    for (int i = 0; i < 6; ++i) os << i << " " << i + 6 << "\n";
    std::istringstream is(os.str());
    return graph_from_edge_list(is, "mobius12");
}
}  // namespace

TEST_CASE("graph constructors") {
    const RegularGraph q3 = make_hypercube(3);
    CHECK(q3.n == 8);
    CHECK(q3.degree == 3);
    CHECK(q3.edge_count() == 12);
    CHECK(q3.closed_neighborhoods[0] == 0b10111ULL);

    const RegularGraph c4 = make_cycle(4);
    CHECK(c4.n == 4);
    CHECK(c4.degree == 2);
    CHECK(c4.edge_count() == 4);

    const RegularGraph t = make_discrete_torus(2, 4);
    CHECK(t.n == 16);
    CHECK(t.degree == 4);

    const RegularGraph h = make_disjoint_kdd(3, 2);
    CHECK(h.n == 12);
    CHECK(h.degree == 3);
    CHECK(h.edge_count() == 18);

    CHECK_THROWS_AS(make_cycle(2), std::invalid_argument);
    CHECK_THROWS_AS(make_discrete_torus(2, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_discrete_torus(2, 2), std::invalid_argument);

    CHECK(build_graph("hypercube:3").n == 8);
    CHECK(build_graph("torus:2:4").degree == 4);
    CHECK_THROWS_AS(build_graph("petersen"), std::invalid_argument);
}

TEST_CASE("edge list parsing and validation") {
    {
        std::istringstream is("4 2\n0 1\n1 2\n2 3\n3 0\n");
        const RegularGraph g = graph_from_edge_list(is);
        CHECK(g.n == 4);
        CHECK(g.degree == 2);
    }
    {
        std::istringstream is("4 2\n0 1\n1 2\n2 3\n");  // vertex 0 and 3 underfull
        CHECK_THROWS_WITH(graph_from_edge_list(is), Catch::Matchers::ContainsSubstring("degree"));
    }
    {
        std::istringstream is("3 2\n0 0\n1 2\n");
        CHECK_THROWS_WITH(graph_from_edge_list(is), Catch::Matchers::ContainsSubstring("self-loop"));
    }
    {
        std::istringstream is("3 2\n0 1\n0 1\n1 2\n2 0\n");
        CHECK_THROWS_WITH(graph_from_edge_list(is), Catch::Matchers::ContainsSubstring("duplicate"));
    }
    {
        std::istringstream is("3 2\n0 7\n");
        CHECK_THROWS_WITH(graph_from_edge_list(is), Catch::Matchers::ContainsSubstring("out of range"));
    }
}

TEST_CASE("count tables on the hand-checked graphs") {
    const auto q3_is = count_by_size(make_hypercube(3), CountMode::IndependentSets);
    const std::vector<BigInt> expect{1, 8, 16, 8, 2, 0, 0, 0, 0};
    CHECK(q3_is.counts == expect);
    CHECK(q3_is.p == BigRat(1, 2));

    const auto c4_is = count_by_size(make_cycle(4), CountMode::IndependentSets);
    CHECK(c4_is.counts[2] == 2);

    const auto q3_m = count_by_size(make_hypercube(3), CountMode::Matchings);
    CHECK(q3_m.counts[1] == 12);
    CHECK(q3_m.counts[2] == 42);
    CHECK(q3_m.counts[3] == 44);
    CHECK(q3_m.counts[4] == 9);  // perfect matchings of Q_3
    CHECK(q3_m.counts[5] == 0);
    CHECK(q3_m.p == BigRat(5, 12));
}

TEST_CASE("enumeration matches the power-set oracle") {
    for (const RegularGraph& g :
         {make_cycle(4), make_cycle(6), make_hypercube(3), make_disjoint_kdd(2, 2), prism()}) {
        const auto ours = enumerate_graph(g, CountMode::IndependentSets);
        const auto brute = oracle::powerset_profile(g.closed_neighborhoods);
        INFO(g.label);
        for (std::size_t k = 0; k <= g.n; ++k) {
            REQUIRE(ours.profile.counts[k] == brute.counts[k]);
            REQUIRE(ours.profile.cover_sums[k] == brute.cover_sums[k]);
        }
    }
    for (const RegularGraph& g : {make_cycle(6), make_hypercube(3), make_cycle(20)}) {
        const auto ours = enumerate_graph(g, CountMode::Matchings);
        const auto brute = oracle::powerset_profile(oracle::line_conflicts(g.edge_list()));
        INFO(g.label << " matchings");
        for (std::size_t k = 0; k <= g.edge_count(); ++k) {
            REQUIRE(ours.profile.counts[k] == brute.counts[k]);
            REQUIRE(ours.profile.cover_sums[k] == brute.cover_sums[k]);
        }
    }
}

TEST_CASE("enumeration is thread-count independent") {
    const RegularGraph g = make_cycle(20);
    const auto one = enumerate_graph(g, CountMode::IndependentSets, {}, 1);
    const auto eight = enumerate_graph(g, CountMode::IndependentSets, {}, 8);
    CHECK(one.profile.counts == eight.profile.counts);
    CHECK(one.profile.cover_sums == eight.profile.cover_sums);
}

TEST_CASE("matching counts satisfy the edge-deletion recurrence") {
    // M_G(k) = M_{G-e}(k) + M_{G-{u,v}}(k-1) on random small graphs
    auto rng = make_stream(62, 0);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 6 + uniform_index(rng, 4);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v = u + 1; v < n; ++v)
                if (uniform01(rng) < 0.4) edges.emplace_back(u, v);
        if (edges.empty()) continue;
        const auto all = enumerate_conflict_sets(oracle::line_conflicts(edges));

        const std::size_t pick = uniform_index(rng, edges.size());
        const auto [eu, ev] = edges[pick];
        std::vector<std::pair<std::uint32_t, std::uint32_t>> minus_e, minus_uv;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (i != pick) minus_e.push_back(edges[i]);
            const auto [a, b] = edges[i];
            if (a != eu && a != ev && b != eu && b != ev) minus_uv.push_back(edges[i]);
        }
        const auto del_e = enumerate_conflict_sets(oracle::line_conflicts(minus_e));
        const auto del_uv = enumerate_conflict_sets(oracle::line_conflicts(minus_uv));
        for (std::size_t k = 1; k <= edges.size(); ++k) {
            const BigInt lhs = all.counts[k];
            BigInt rhs = k < del_e.counts.size() ? del_e.counts[k] : BigInt(0);
            if (k - 1 < del_uv.counts.size()) rhs += del_uv.counts[k - 1];
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("exact conditional coverage on Q_3") {
    const auto s = enumerate_graph(make_hypercube(3), CountMode::IndependentSets);
    CHECK(exact_conditional_coverage(s, 1) == BigRat(1, 2));        // (d+1)/n
    CHECK(exact_conditional_coverage(s, 2) == BigRat(104, 128));    // = 13/16
    CHECK(exact_conditional_coverage(s, 3) == BigRat(7, 8));
    CHECK(exact_conditional_coverage(s, 4) == BigRat(1));
    CHECK_THROWS_AS(exact_conditional_coverage(s, 5), std::domain_error);
}

TEST_CASE("birthday check") {
    const auto q3 = enumerate_graph(make_hypercube(3), CountMode::IndependentSets);
    // k = 2 is the equality case in every model
    const auto eq = birthday_check(q3, 2);
    CHECK(eq.lhs == eq.rhs);
    CHECK(eq.lhs == BigRat(1, 2));
    CHECK(eq.holds);

    const auto k3 = birthday_check(q3, 3);
    CHECK(k3.lhs == BigRat(48, 512));
    CHECK(k3.rhs == BigRat(1, 8));
    CHECK(k3.holds);
    CHECK(k3.slack > 0.0);

    const auto q3m = enumerate_graph(make_hypercube(3), CountMode::Matchings);
    const auto m2 = birthday_check(q3m, 2);
    CHECK(m2.lhs == m2.rhs);
    CHECK(m2.lhs == BigRat(7, 12));
    const auto m4 = birthday_check(q3m, 4);
    CHECK(m4.lhs == BigRat(24 * 9, 20736));
    CHECK(m4.rhs == BigRat(117649, 2985984));  // (7/12)^6
    CHECK(m4.holds);
}

TEST_CASE("repulsion check") {
    const auto q3 = enumerate_graph(make_hypercube(3), CountMode::IndependentSets);
    const auto k1 = repulsion_check(q3, 1);
    CHECK(k1.lhs == k1.rhs);
    CHECK(k1.holds);

    const auto k2 = repulsion_check(q3, 2);
    CHECK(k2.lhs == BigRat(13, 16));
    CHECK(k2.rhs == BigRat(3, 4));
    CHECK(k2.holds);

    const auto k3 = repulsion_check(q3, 3);
    CHECK(k3.lhs == k3.rhs);  // 7/8 on both sides
    CHECK(k3.holds);
}

TEST_CASE("conditional-coverage estimate check (bipest)") {
    const auto q3 = enumerate_graph(make_hypercube(3), CountMode::IndependentSets);
    const auto k1 = bipest_check(q3, 1);
    CHECK(k1.lhs == k1.rhs);  // rhs = (d+1)/n at k = 1
    CHECK(k1.holds);
    CHECK_THROWS_AS(bipest_check(q3, 2), std::domain_error);  // kp = 1

    const auto c20 = enumerate_graph(make_cycle(20), CountMode::IndependentSets);
    CHECK(bipest_check(c20, 3).holds);  // kp = 0.45

    const auto t44 = enumerate_graph(make_discrete_torus(2, 4), CountMode::IndependentSets);
    CHECK(bipest_check(t44, 2).holds);  // p = 5/16

    const auto q3m = enumerate_graph(make_hypercube(3), CountMode::Matchings);
    CHECK_THROWS_AS(bipest_check(q3m, 1), std::invalid_argument);
}

TEST_CASE("conjecture 2 comparator") {
    // H_{d,n} against itself: equality at every feasible k
    const RegularGraph h = make_disjoint_kdd(2, 2);
    for (std::size_t k = 1; k <= 4; ++k) {
        const auto c = conjecture2_compare(h, k);
        CHECK(c.value_g == c.value_h);
        CHECK(c.consistent);
    }

    const auto c8 = conjecture2_compare(make_cycle(8), 3);
    CHECK(c8.value_g == BigRat(15, 16));
    CHECK(c8.value_h == BigRat(7, 8));
    CHECK(c8.consistent);

    const RegularGraph ml = mobius_ladder12();
    for (std::size_t k = 1; k <= 5; ++k) {
        INFO("k=" << k);
        CHECK(conjecture2_compare(ml, k).consistent);
    }

    CHECK_THROWS_AS(conjecture2_compare(make_cycle(6), 2), std::invalid_argument);  // 4 does not divide 6
}

TEST_CASE("triangle-count identity for the pair event") {
    // (1/n) sum_v Pr[A_v | E_2] = (n C(d,2) - 3 T) / ((C(n,2) - nd/2) n)
    for (const RegularGraph& g : {make_cycle(6), make_hypercube(3), make_discrete_torus(2, 4),
                                  make_disjoint_kdd(3, 2), prism(), mobius_ladder12()}) {
        const auto n = static_cast<unsigned long long>(g.n);
        const auto d = static_cast<unsigned long long>(g.degree);
        const unsigned long long e2_pairs = n * (n - 1) / 2 - n * d / 2;
        REQUIRE(e2_pairs > 0);
        BigInt favorable = 0;  // over all vertices v and non-adjacent pairs both adjacent to v
        for (std::uint32_t v = 0; v < g.n; ++v)
            for (std::size_t i = 0; i < g.adjacency[v].size(); ++i)
                for (std::size_t j = i + 1; j < g.adjacency[v].size(); ++j)
                    if (!g.has_edge(g.adjacency[v][i], g.adjacency[v][j])) favorable += 1;
        const BigRat direct(favorable, BigInt(e2_pairs) * BigInt(n));
        const auto triangles = static_cast<unsigned long long>(count_triangles(g));
        const BigRat formula(BigInt(n * (d * (d - 1) / 2)) - BigInt(3 * triangles),
                             BigInt(e2_pairs) * BigInt(n));
        INFO(g.label << " triangles=" << triangles);
        REQUIRE(direct == formula);
    }
    CHECK(count_triangles(prism()) == 2);
    CHECK(count_triangles(make_hypercube(4)) == 0);
}

TEST_CASE("enumeration budget is enforced") {
    CHECK_THROWS_AS(enumerate_graph(make_hypercube(7), CountMode::IndependentSets),
                    std::invalid_argument);
    CHECK_THROWS_AS(enumerate_graph(make_discrete_torus(2, 6), CountMode::Matchings),
                    std::invalid_argument);  // 72 edges > 60
    // 36 vertices fits the default budget of 40
    CHECK_NOTHROW(enumerate_graph(make_discrete_torus(2, 6), CountMode::IndependentSets));
    EnumerationBudget tight;
    tight.max_vertices = 20;
    CHECK_THROWS_AS(enumerate_graph(make_discrete_torus(2, 6), CountMode::IndependentSets, tight),
                    std::invalid_argument);
}
