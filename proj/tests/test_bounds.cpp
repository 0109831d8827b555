#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "exclusion/bounds.hpp"
#include "exclusion/graphs.hpp"
#include "oracles.hpp"

using namespace excl;

TEST_CASE("sphere birthday free-energy bound") {
    CHECK(sphere_birthday_fe(0.0, 7) == 0.0);
    CHECK(sphere_birthday_fe(0.5, 1) == 0.5);
    CHECK_THAT(sphere_birthday_fe(0.001929, 24), Catch::Matchers::WithinRel(16181.624832, 1e-13));
    CHECK_THROWS_AS(sphere_birthday_fe(-0.1, 2), std::invalid_argument);
}

TEST_CASE("cell-model free-energy bound") {
    // alpha -> 0 with rho = 1 tends to 1
    CHECK_THAT(cell_model_fe(1e-300, 1.0, 3), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(cell_model_fe(0.001929 * std::pow(0.79, 24), 0.001929, 24),
               Catch::Matchers::WithinRel(44.706299503410586, 1e-12));
    CHECK_THAT(cell_model_fe(0.5, 1.0, 6), Catch::Matchers::WithinRel(14.292871820866176, 1e-12));
    CHECK_THROWS_AS(cell_model_fe(0.5, 0.4, 6), std::domain_error);   // alpha >= rho
    CHECK_THROWS_AS(cell_model_fe(0.0, 1.0, 6), std::domain_error);
}

TEST_CASE("leech gap values") {
    // 50-digit evaluation, frozen via an independent high-precision oracle
    CHECK_THAT(leech_gap(0.79), Catch::Matchers::WithinAbs(11.796806113599058, 1e-9));
    CHECK_THAT(leech_gap(0.5), Catch::Matchers::WithinAbs(-23.885321378497232, 1e-9));
    CHECK_THROWS_AS(leech_gap(0.0), std::invalid_argument);
    CHECK_THROWS_AS(leech_gap(1.0), std::invalid_argument);
}

TEST_CASE("leech gap is increasing past the crossing") {
    for (double t : {0.80, 0.90, 0.99}) {
        const double d = oracle::central_difference([](double x) { return leech_gap(x); }, t, 1e-6);
        INFO("t=" << t);
        CHECK(d > 0.0);
    }
}

TEST_CASE("leech gap is positive across the certified interval") {
    for (int i = 0; i < 200; ++i) {
        const double t = 0.79 + (1.0 - 1e-6 - 0.79) * (i + 0.5) / 200.0;
        REQUIRE(leech_gap(t) > 0.0);
    }
    // interval endpoints of the certificate
    const BoundReport rep = sphere24_certificate();
    REQUIRE(rep.failure_interval.has_value());
    CHECK_THAT(rep.failure_interval->lo, Catch::Matchers::WithinRel(6.7356950780164771e-06, 1e-9));
    CHECK(rep.failure_interval->hi == kRho24);
}

TEST_CASE("leech lattice density constant") {
    CHECK_THAT(leech_lattice_density(), Catch::Matchers::WithinRel(0.0019295743094039230, 1e-12));
    // the default rho sits just below it
    CHECK(leech_lattice_density() - kRho24 > 0.0);
    CHECK(leech_lattice_density() - kRho24 < 1e-6);
}

TEST_CASE("square failure intervals") {
    CHECK_FALSE(square_failure_interval(5).has_value());
    CHECK_FALSE(square_failure_interval(1).has_value());

    const auto d6 = square_failure_interval(6);
    REQUIRE(d6.has_value());
    CHECK_THAT(d6->lo, Catch::Matchers::WithinRel(0.395694585052, 1e-6));
    CHECK_THAT(d6->hi, Catch::Matchers::WithinRel(0.9579272026386, 1e-6));
    CHECK(d6->lo <= 0.40);
    CHECK(d6->hi >= 0.95);

    const auto d30 = square_failure_interval(30);
    REQUIRE(d30.has_value());
    CHECK_THAT(d30->lo, Catch::Matchers::WithinRel(4.910800939e-8, 1e-5));
}

TEST_CASE("square upper endpoint climbs to 1") {
    double prev_hi = 0.0;
    for (unsigned d = 6; d <= 12; ++d) {
        const auto iv = square_failure_interval(d);
        REQUIRE(iv.has_value());
        INFO("d=" << d);
        CHECK(iv->hi >= prev_hi);
        CHECK(iv->lo < iv->hi);
        prev_hi = iv->hi;
    }
    CHECK(prev_hi > 1.0 - 1e-9);
}

TEST_CASE("hardcore bounds at the boundary and in the bulk") {
    const HardcoreBounds half = hardcore_bounds(0.5, 6);
    CHECK(half.parity_lower == 0.0);  // (1/2) H(1) with 0 log 0 := 0
    CHECK_THAT(half.birthday_upper, Catch::Matchers::WithinRel(-0.028426409720027345, 1e-12));
    CHECK_THAT(half.cgt_third, Catch::Matchers::WithinRel(0.34657359027997264, 1e-12));
    CHECK(half.parity_lower > half.birthday_upper);  // failure at alpha = 1/2, d = 6

    // near 0 both vanish and the birthday bound sits above the parity bound
    const HardcoreBounds tiny = hardcore_bounds(1e-10, 6);
    CHECK(std::abs(tiny.parity_lower) < 1e-8);
    CHECK(std::abs(tiny.birthday_upper) < 1e-8);
    CHECK(tiny.birthday_upper > tiny.parity_lower);

    // inside the proven repulsion regime alpha = (d+1)^{-2}
    const HardcoreBounds reg = hardcore_bounds(1.0 / 121.0, 10);
    CHECK(reg.birthday_upper > reg.parity_lower);

    CHECK_THROWS_AS(hardcore_bounds(0.0, 6), std::invalid_argument);
    CHECK_THROWS_AS(hardcore_bounds(0.6, 6), std::invalid_argument);
}

TEST_CASE("hardcore crossing point") {
    CHECK_THROWS_WITH(hardcore_crossing(5), Catch::Matchers::ContainsSubstring("not falsified"));

    const double a6 = hardcore_crossing(6);
    CHECK_THAT(a6, Catch::Matchers::WithinRel(0.319065574824, 1e-6));
    for (int i = 0; i < 100; ++i) {
        const double a = a6 + (0.5 - a6) * i / 99.0;
        const HardcoreBounds b = hardcore_bounds(a, 6);
        REQUIRE(b.parity_lower >= b.birthday_upper);
    }

    CHECK_THAT(hardcore_crossing(100) * 100.0 / (2.0 * std::log(2.0)),
               Catch::Matchers::WithinRel(1.010294295, 1e-6));
    CHECK_THAT(hardcore_crossing(200) * 200.0 / (2.0 * std::log(2.0)),
               Catch::Matchers::WithinRel(1.00507237, 1e-6));
}

TEST_CASE("matching bounds and their crossing") {
    const MatchingBounds lo = matching_bounds(0.05, 3);
    CHECK_THAT(lo.birthday, Catch::Matchers::WithinRel(0.25263389, 1e-7));
    CHECK_THAT(lo.ilinca_kahn, Catch::Matchers::WithinRel(0.80148063, 1e-7));
    CHECK(lo.birthday < lo.ilinca_kahn);
    CHECK(lo.min == lo.birthday);

    const MatchingBounds hi = matching_bounds(0.9, 3);
    CHECK_THAT(hi.birthday, Catch::Matchers::WithinRel(1.3085755, 1e-7));
    CHECK_THAT(hi.ilinca_kahn, Catch::Matchers::WithinRel(1.1933987, 1e-7));
    CHECK(hi.ilinca_kahn < hi.birthday);

    // shared leading terms: birthday - (a log d - a log a + a) -> 0
    const double a = 1e-8;
    const MatchingBounds near0 = matching_bounds(a, 5);
    const double lead = a * std::log(5.0) - a * std::log(a) + a;
    CHECK(std::abs(near0.birthday - lead) < 1e-15);

    CHECK_THAT(matching_crossing(10), Catch::Matchers::WithinRel(0.7372984806, 1e-6));
    CHECK_THAT(matching_crossing(100), Catch::Matchers::WithinRel(0.4678448897, 1e-6));
    CHECK_THAT(matching_crossing(1000), Catch::Matchers::WithinRel(0.2614030878, 1e-6));
}

TEST_CASE("finite-n birthday bound dominates exact counts") {
    // k! IS(k) <= n^k (1-p)^C(k,2) exactly, and the per-site log form agrees
    for (const RegularGraph& g : {make_cycle(6), make_cycle(20), make_hypercube(3),
                                  make_hypercube(4), make_disjoint_kdd(3, 2)}) {
        const auto s = enumerate_graph(g, CountMode::IndependentSets);
        for (std::size_t k = 0; k < s.profile.counts.size(); ++k) {
            if (s.profile.counts[k] == 0) continue;
            INFO(g.label << " k=" << k);
            REQUIRE(birthday_check(s, k).holds);
            if (k == 0) continue;
            const double log_count = std::log(s.profile.counts[k].convert_to<double>());
            const double per_site = hardcore_finite_birthday_per_site(
                static_cast<double>(g.n), static_cast<double>(k), static_cast<unsigned>(g.degree));
            REQUIRE(log_count / static_cast<double>(g.n) <= per_site + 1e-12);
        }
    }
}

TEST_CASE("finite-n bound converges to the density form at the Stirling rate") {
    // (1/n)[k log n - log k! + C(k,2) log(1-(d+1)/n)] with k = alpha n differs
    // from alpha - alpha log alpha - alpha^2 (d+1)/2 by a log(n)/n-order term;
    // pin the first-order envelope rather than a bare power of n.
    const double alpha = 0.02;
    const unsigned d = 5;
    const double limit = alpha - alpha * std::log(alpha) - 0.5 * alpha * alpha * (d + 1);
    double prev_err = 1e9;
    for (double n : {1e2, 1e4, 1e6}) {
        const double err = std::abs(hardcore_finite_birthday_per_site(n, alpha * n, d) - limit);
        const double envelope =
            (0.5 * std::log(2.0 * M_PI * alpha * n) + alpha * (d + 1) + 1.0) / n;
        INFO("n=" << n);
        REQUIRE(err <= envelope);
        REQUIRE(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("certificates assemble the right reports") {
    const BoundReport sq5 = square_certificate(5);
    CHECK_FALSE(sq5.failure_interval.has_value());
    CHECK_FALSE(sq5.asymptotic_ratio.has_value());

    const BoundReport sq6 = square_certificate(6);
    REQUIRE(sq6.failure_interval.has_value());
    REQUIRE(sq6.asymptotic_ratio.has_value());
    CHECK(sq6.curve.size() == 99);
    CHECK(!sq6.witnesses.empty());

    const BoundReport hc5 = hardcore_certificate(5);
    CHECK_FALSE(hc5.failure_interval.has_value());
    const BoundReport hc6 = hardcore_certificate(6);
    REQUIRE(hc6.failure_interval.has_value());
    CHECK(hc6.failure_interval->hi == 0.5);

    const BoundReport m = matching_report(10);
    REQUIRE(m.asymptotic_ratio.has_value());
    CHECK_THAT(*m.asymptotic_ratio, Catch::Matchers::WithinRel(1.2029238, 1e-6));
}
