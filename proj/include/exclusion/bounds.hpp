#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace excl {

using HighPrec = boost::multiprecision::cpp_bin_float_50;

// Packing density used for the d = 24 counterexample; a hair below the Leech
// lattice density pi^12/12!, which is also exposed for sensitivity runs.
inline constexpr double kRho24 = 0.001929;

inline double leech_lattice_density() {
    const HighPrec pi = 4 * boost::multiprecision::atan(HighPrec(1));
    HighPrec v = boost::multiprecision::pow(pi, 12);
    for (int i = 2; i <= 12; ++i) v /= i;
    return v.convert_to<double>();
}

// Birthday lower bound on the sphere free energy: F_d(alpha) >= 2^{d-1} alpha.
inline double sphere_birthday_fe(double alpha, unsigned d) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("sphere_birthday_fe: alpha in [0, 1]");
    if (d == 0) throw std::invalid_argument("sphere_birthday_fe: d >= 1");
    return std::ldexp(alpha, static_cast<int>(d) - 1);
}

// Cell-model upper bound on -(1/n) log Pr[empty] in the n -> infinity limit:
// 1 - d log(1 - (alpha/rho)^{1/d}) - log rho, one center per shrunken cell of
// a reference packing of density rho.
inline double cell_model_fe(double alpha, double rho, unsigned d) {
    if (d == 0) throw std::invalid_argument("cell_model_fe: d >= 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("cell_model_fe: rho in (0, 1]");
    if (!(alpha > 0.0 && alpha < rho))
        throw std::domain_error("cell_model_fe: requires 0 < alpha < rho (shrink factor t < 1)");
    // 1 - t computed as -expm1(log(alpha/rho)/d): exact to the last bit even
    // when t is within 1e-16 of 1
    const double one_minus_t = -std::expm1(std::log(alpha / rho) / static_cast<double>(d));
    return 1.0 - static_cast<double>(d) * std::log(one_minus_t) - std::log(rho);
}

// Birthday-minus-cell-model gap of the d = 24 sphere model along the shrink
// parameter t, alpha = t^24 rho:
//   F(t) = (rho/2)(2t)^24 - 1 + 24 log(1-t) + log(rho).
// Positivity certifies failure of the birthday inequality at that density.
// Evaluated in 50-digit arithmetic; the (2t)^24 term is ~5e4 while the result
// is ~1e1.
inline double leech_gap(double t, double rho = kRho24) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("leech_gap: t in (0, 1)");
    const HighPrec T(t), R(rho);
    const HighPrec f = R / 2 * boost::multiprecision::pow(2 * T, 24) - 1 +
                       24 * boost::multiprecision::log(1 - T) + boost::multiprecision::log(R);
    return f.convert_to<double>();
}

struct Interval {
    double lo = 0.0, hi = 0.0;
};

namespace detail {

// Bisection on a sign change of f over [lo, hi] (f(lo) and f(hi) of opposite
// sign). Works in log space when the bracket spans orders of magnitude, so
// endpoints near 1e-8 resolve to full relative precision.
inline double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi) {
    const bool logspace = lo > 0.0 && hi / lo > 16.0;
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = logspace ? std::exp(0.5 * (std::log(lo) + std::log(hi))) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Maximal density interval on which the hard square (Linf, rho = 1) birthday
// bound strictly exceeds the cell-model bound, i.e. where the birthday
// inequality provably fails. Log-spaced bracket scan plus bisection; absent
// when no crossing exists (d <= 5). For d >= 10 the upper endpoint is within
// one double ulp of 1 and is reported as 1.
inline std::optional<Interval> square_failure_interval(unsigned d) {
    if (d == 0) throw std::invalid_argument("square_failure_interval: d >= 1");
    const auto gap = [d](double alpha) {
        return sphere_birthday_fe(alpha, d) - cell_model_fe(alpha, 1.0, d);
    };
    const double alpha_min = 1e-15;
    const double alpha_max = std::nextafter(1.0, 0.0);
    const int grid = 10000;
    const double step = (std::log(alpha_max) - std::log(alpha_min)) / grid;

    double lo = 0.0, hi = 0.0;
    bool inside = false, found = false;
    double prev_alpha = alpha_min;
    double prev_gap = gap(prev_alpha);
    for (int i = 1; i <= grid; ++i) {
        const double a = i == grid ? alpha_max : std::exp(std::log(alpha_min) + step * i);
        const double ga = gap(a);
        if (!inside && prev_gap <= 0.0 && ga > 0.0) {
            lo = detail::bisect_sign_change(gap, prev_alpha, a);
            inside = true;
            found = true;
        } else if (inside && prev_gap > 0.0 && ga <= 0.0) {
            hi = detail::bisect_sign_change(gap, prev_alpha, a);
            inside = false;
        }
        prev_alpha = a;
        prev_gap = ga;
    }
    if (!found) return std::nullopt;
    if (inside) hi = 1.0;  // still failing at the last double below 1
    return Interval{lo, hi};
}

inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

struct HardcoreBounds {
    double birthday_upper = 0.0;  // alpha - alpha log alpha - alpha^2 (d+1)/2
    double parity_lower = 0.0;    // -alpha log(2 alpha) - (1/2 - alpha) log(1 - 2 alpha)
    double cgt_third = 0.0;       // -alpha log alpha - (1/2 - alpha) log(1 - 2 alpha)
};

// Free-energy bounds for the fixed-density hard-core model on d-regular
// bipartite graphs, natural logs, 0 log 0 := 0 at the alpha = 1/2 boundary.
inline HardcoreBounds hardcore_bounds_unchecked(double alpha, unsigned d) {
    const double tail = alpha == 0.5 ? 0.0 : (0.5 - alpha) * std::log1p(-2.0 * alpha);
    HardcoreBounds b;
    b.birthday_upper = alpha - xlogx(alpha) - 0.5 * alpha * alpha * static_cast<double>(d + 1);
    b.parity_lower = -(alpha == 0.0 ? 0.0 : alpha * std::log(2.0 * alpha)) - tail;
    b.cgt_third = -xlogx(alpha) - tail;
    return b;
}

inline HardcoreBounds hardcore_bounds(double alpha, unsigned d) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw std::invalid_argument("hardcore_bounds: alpha in (0, 1/2]");
    if (d == 0) throw std::invalid_argument("hardcore_bounds: d >= 1");
    return hardcore_bounds_unchecked(alpha, d);
}

// Smallest alpha in (0, 1/2] where the parity lower bound reaches the
// birthday upper bound; the birthday inequality fails on [alpha_d^l, 1/2].
// Returns the upper end of the final bisection bracket, so the inequality
// holds at the returned point. Throws when no crossing exists (d <= 5).
inline double hardcore_crossing(unsigned d) {
    if (d == 0) throw std::invalid_argument("hardcore_crossing: d >= 1");
    const auto diff = [d](double a) {
        const HardcoreBounds b = hardcore_bounds_unchecked(a, d);
        return b.parity_lower - b.birthday_upper;
    };
    const int grid = 10000;
    double prev = 0.5 * 1.0 / grid;
    double fprev = diff(prev);
    for (int i = 2; i <= grid; ++i) {
        const double a = 0.5 * static_cast<double>(i) / grid;
        const double fa = diff(a);
        if (fprev < 0.0 && fa >= 0.0) {
            double lo = prev, hi = a;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (diff(mid) < 0.0 ? lo : hi) = mid;
            }
            return hi;
        }
        prev = a;
        fprev = fa;
    }
    throw std::domain_error("hardcore_crossing: birthday bound not falsified by parity bound at degree " +
                            std::to_string(d));
}

struct MatchingBounds {
    double birthday = 0.0;     // alpha log d - alpha log alpha + alpha - (alpha^2/2)(2d-1)/d
    double ilinca_kahn = 0.0;  // alpha log d - alpha log alpha - 2(1-alpha)log(1-alpha) - alpha + log d/(d-1)
    double min = 0.0;
};

// Upper bounds on (2/n) log M(alpha n / 2) for matchings of d-regular graphs.
inline MatchingBounds matching_bounds(double alpha, unsigned d) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("matching_bounds: alpha in (0, 1)");
    if (d < 2) throw std::invalid_argument("matching_bounds: d >= 2");
    const double logd = std::log(static_cast<double>(d));
    MatchingBounds b;
    b.birthday = alpha * logd - xlogx(alpha) + alpha -
                 0.5 * alpha * alpha * static_cast<double>(2 * d - 1) / static_cast<double>(d);
    b.ilinca_kahn = alpha * logd - xlogx(alpha) - 2.0 * (1.0 - alpha) * std::log1p(-alpha) - alpha +
                    logd / static_cast<double>(d - 1);
    b.min = std::min(b.birthday, b.ilinca_kahn);
    return b;
}

// The unique alpha where the two matching bounds cross (birthday is the
// stronger bound below it, Ilinca-Kahn above).
inline double matching_crossing(unsigned d) {
    if (d < 2) throw std::invalid_argument("matching_crossing: d >= 2");
    const auto diff = [d](double a) {
        const MatchingBounds b = matching_bounds(a, d);
        return b.birthday - b.ilinca_kahn;
    };
    const double lo = 1e-12, hi = 1.0 - 1e-12;
    if (!(diff(lo) < 0.0 && diff(hi) > 0.0))
        throw std::domain_error("matching_crossing: no bracket at degree " + std::to_string(d));
    return detail::bisect_sign_change(diff, lo, hi);
}

// Finite-n birthday bound on independent-set counts, per site:
// (1/n)[k log n - log k! + C(k,2) log(1 - (d+1)/n)]; converges to
// alpha - alpha log alpha - alpha^2 (d+1)/2 with k = alpha n.
inline double hardcore_finite_birthday_per_site(double n, double k, unsigned d) {
    if (!(n > 0.0 && k >= 0.0 && k <= n)) throw std::invalid_argument("finite birthday bound: 0 <= k <= n");
    return (k * std::log(n) - std::lgamma(k + 1.0) +
            0.5 * k * (k - 1.0) * std::log1p(-static_cast<double>(d + 1) / n)) /
           n;
}

struct CurvePoint {
    double alpha = 0.0;
    double birthday = 0.0;
    double comparison = 0.0;
};

struct BoundReport {
    std::string model;
    unsigned d = 0;
    double rho = 0.0;
    std::vector<CurvePoint> curve;
    std::optional<Interval> failure_interval;
    std::optional<double> asymptotic_ratio;
    std::vector<CurvePoint> witnesses;
};

// d = 24 counterexample certificate: verifies F(t_check) > 0 and reports the
// certified failure interval (t_check^24 rho, rho).
inline BoundReport sphere24_certificate(double t_check = 0.79, double rho = kRho24) {
    BoundReport rep;
    rep.model = "sphere";
    rep.d = 24;
    rep.rho = rho;
    for (int i = 1; i <= 100; ++i) {
        const double t = static_cast<double>(i) / 101.0;
        const double alpha = std::pow(t, 24) * rho;
        rep.curve.push_back({alpha, sphere_birthday_fe(alpha, 24), cell_model_fe(alpha, rho, 24)});
    }
    const double f = leech_gap(t_check, rho);
    for (double t : {t_check, 0.85, 0.90, 0.95, 0.99}) {
        const double alpha = std::pow(t, 24) * rho;
        rep.witnesses.push_back({alpha, sphere_birthday_fe(alpha, 24), cell_model_fe(alpha, rho, 24)});
    }
    if (f > 0.0) rep.failure_interval = Interval{std::pow(t_check, 24) * rho, rho};
    return rep;
}

inline BoundReport square_certificate(unsigned d) {
    BoundReport rep;
    rep.model = "square";
    rep.d = d;
    rep.rho = 1.0;
    for (int i = 1; i < 100; ++i) {
        const double alpha = std::exp(std::log(1e-10) * (1.0 - i / 100.0) + std::log(0.999) * (i / 100.0));
        rep.curve.push_back({alpha, sphere_birthday_fe(alpha, d), cell_model_fe(alpha, 1.0, d)});
    }
    rep.failure_interval = square_failure_interval(d);
    if (rep.failure_interval) {
        const Interval iv = *rep.failure_interval;
        rep.asymptotic_ratio = iv.lo * std::ldexp(1.0, static_cast<int>(d) - 1) /
                               (static_cast<double>(d) * std::log(2.0));
        const double mid = std::sqrt(iv.lo * std::max(iv.hi, iv.lo));
        for (double a : {iv.lo, mid, std::min(iv.hi, 0.999999)})
            rep.witnesses.push_back({a, sphere_birthday_fe(a, d), cell_model_fe(a, 1.0, d)});
    }
    return rep;
}

inline BoundReport hardcore_certificate(unsigned d) {
    BoundReport rep;
    rep.model = "hardcore";
    rep.d = d;
    rep.rho = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double alpha = 0.5 * i / 100.0;
        const HardcoreBounds b = hardcore_bounds_unchecked(alpha, d);
        rep.curve.push_back({alpha, b.birthday_upper, b.parity_lower});
    }
    try {
        const double al = hardcore_crossing(d);
        rep.failure_interval = Interval{al, 0.5};
        rep.asymptotic_ratio = al * static_cast<double>(d) / (2.0 * std::log(2.0));
        for (double a : {al, 0.5 * (al + 0.5), 0.5}) {
            const HardcoreBounds b = hardcore_bounds_unchecked(a, d);
            rep.witnesses.push_back({a, b.birthday_upper, b.parity_lower});
        }
    } catch (const std::domain_error&) {
        // no crossing: the parity bound never falsifies the birthday bound
    }
    return rep;
}

inline BoundReport matching_report(unsigned d) {
    BoundReport rep;
    rep.model = "matching";
    rep.d = d;
    rep.rho = 0.0;
    for (int i = 1; i < 100; ++i) {
        const double alpha = static_cast<double>(i) / 100.0;
        const MatchingBounds b = matching_bounds(alpha, d);
        rep.curve.push_back({alpha, b.birthday, b.ilinca_kahn});
    }
    const double cross = matching_crossing(d);
    rep.asymptotic_ratio =
        cross / std::cbrt(std::log(static_cast<double>(d)) / static_cast<double>(d));
    const MatchingBounds b = matching_bounds(cross, d);
    rep.witnesses.push_back({cross, b.birthday, b.ilinca_kahn});
    return rep;
}

}  // namespace excl
