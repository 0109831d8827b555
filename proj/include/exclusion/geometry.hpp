#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace excl {

// Linf is the hard square variant: balls are axis-parallel cubes.
enum class Metric { L2, Linf };

inline const char* metric_name(Metric m) { return m == Metric::L2 ? "l2" : "linf"; }

inline Metric parse_metric(const std::string& s) {
    if (s == "l2" || s == "L2" || s == "euclidean") return Metric::L2;
    if (s == "linf" || s == "Linf" || s == "chebyshev") return Metric::Linf;
    throw std::invalid_argument("unknown metric '" + s + "' (expected l2 or linf)");
}

// Reduce a coordinate to [0,1). x - floor(x) can round to 1.0 for tiny
// negative x, so clamp that case back to 0.
inline double wrap_unit(double x) {
    const double y = x - std::floor(x);
    return y >= 1.0 ? 0.0 : y;
}

// A point on the unit torus. Coordinates are reduced modulo 1 on
// construction so the distance loops stay branch-light.
struct TorusPoint {
    std::vector<double> coords;

    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {
        for (double& x : coords) x = wrap_unit(x);
    }
    std::size_t dim() const { return coords.size(); }
};

// Shortest displacement along one axis; assumes both inputs lie in [0,1).
inline double axis_gap(double a, double b) {
    const double delta = a < b ? b - a : a - b;
    return delta > 0.5 ? 1.0 - delta : delta;
}

inline double torus_distance(std::span<const double> x, std::span<const double> y, Metric m) {
    if (x.size() != y.size())
        throw std::invalid_argument("torus_distance: dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    if (m == Metric::L2) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double g = axis_gap(x[i], y[i]);
            s += g * g;
        }
        return std::sqrt(s);
    }
    double mx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx = std::max(mx, axis_gap(x[i], y[i]));
    return mx;
}

inline double torus_distance(const TorusPoint& x, const TorusPoint& y, Metric m) {
    return torus_distance(std::span<const double>(x.coords), std::span<const double>(y.coords), m);
}

// Collision predicate for the hot loops: torus distance <= r, no sqrt.
// Ties at exactly r count as collisions.
inline bool within_distance(const double* x, const double* y, std::size_t d, Metric m, double r) {
    if (m == Metric::L2) {
        const double r2 = r * r;
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double g = axis_gap(x[i], y[i]);
            s += g * g;
            if (s > r2) return false;
        }
        return true;
    }
    for (std::size_t i = 0; i < d; ++i)
        if (axis_gap(x[i], y[i]) > r) return false;
    return true;
}

// log v_d with v_d = pi^{d/2} / Gamma(d/2 + 1); log domain so large d neither
// overflows nor underflows.
inline double log_unit_ball_volume(std::size_t d) {
    const double dd = static_cast<double>(d);
    return 0.5 * dd * std::log(M_PI) - std::lgamma(0.5 * dd + 1.0);
}

// Volume of the metric ball of radius r on the unit torus; equals the
// pair-collision probability p. Exact only for r <= 1/2, hence the hard cap.
inline double ball_volume(std::size_t d, double r, Metric m) {
    if (d == 0) throw std::invalid_argument("ball_volume: dimension must be >= 1");
    if (r < 0.0) throw std::invalid_argument("ball_volume: negative radius");
    if (r > 0.5)
        throw std::domain_error("ball_volume: r = " + std::to_string(r) +
                                " > 1/2; the volume formula is exact on the unit torus only for r <= 1/2");
    if (r == 0.0) return 0.0;
    if (m == Metric::Linf) return std::pow(2.0 * r, static_cast<double>(d));
    return std::exp(log_unit_ball_volume(d) + static_cast<double>(d) * std::log(r));
}

// One parameter point of the hard sphere / hard square model. The three
// density parameterizations are linked by p = v_d r^d (L2) or (2r)^d (Linf)
// and alpha = n p / 2^d.
struct ModelParams {
    std::size_t n = 0;
    std::size_t d = 1;
    Metric metric = Metric::L2;
    double r = 0.0;
    double p = 0.0;
    double alpha = 0.0;
};

struct PartialParams {
    std::size_t n = 0;
    std::size_t d = 1;
    Metric metric = Metric::L2;
    std::optional<double> r;
    std::optional<double> p;
    std::optional<double> alpha;
};

inline double radius_from_p(std::size_t d, double p, Metric m) {
    if (p == 0.0) return 0.0;
    if (m == Metric::Linf) return 0.5 * std::pow(p, 1.0 / static_cast<double>(d));
    return std::exp((std::log(p) - log_unit_ball_volume(d)) / static_cast<double>(d));
}

// Completes (r, p, alpha) from whichever single one was supplied.
// Round trips are identities to ~1e-15 relative.
inline ModelParams convert_params(const PartialParams& in) {
    const int given = int(in.r.has_value()) + int(in.p.has_value()) + int(in.alpha.has_value());
    if (given != 1)
        throw std::invalid_argument("convert_params: exactly one of {r, p, alpha} must be supplied");
    if (in.d == 0) throw std::invalid_argument("convert_params: dimension must be >= 1");

    ModelParams out;
    out.n = in.n;
    out.d = in.d;
    out.metric = in.metric;
    const int d = static_cast<int>(in.d);

    if (in.r) {
        if (*in.r < 0.0) throw std::invalid_argument("convert_params: negative r");
        out.r = *in.r;
        out.p = ball_volume(in.d, out.r, in.metric);
        out.alpha = std::ldexp(static_cast<double>(in.n) * out.p, -d);
    } else if (in.p) {
        if (*in.p < 0.0 || *in.p > 1.0)
            throw std::invalid_argument("convert_params: p must lie in [0, 1]");
        out.p = *in.p;
        out.r = radius_from_p(in.d, out.p, in.metric);
        out.alpha = std::ldexp(static_cast<double>(in.n) * out.p, -d);
    } else {
        if (*in.alpha < 0.0 || *in.alpha > 1.0)
            throw std::invalid_argument("convert_params: alpha must lie in [0, 1]");
        out.alpha = *in.alpha;
        if (out.alpha > 0.0 && in.n == 0)
            throw std::invalid_argument("convert_params: n must be positive to derive p from alpha");
        out.p = out.alpha == 0.0 ? 0.0 : std::ldexp(out.alpha, d) / static_cast<double>(in.n);
        if (out.p > 1.0)
            throw std::domain_error("convert_params: derived p = " + std::to_string(out.p) + " exceeds 1");
        out.r = radius_from_p(in.d, out.p, in.metric);
    }

    if (out.r > 0.5 * (1.0 + 1e-12))
        throw std::domain_error("convert_params: derived r = " + std::to_string(out.r) +
                                " exceeds 1/2; the p and alpha formulas are exact only for r <= 1/2");
    out.r = std::min(out.r, 0.5);
    if (out.alpha > 1.0 + 1e-12)
        throw std::domain_error("convert_params: derived alpha = " + std::to_string(out.alpha) + " exceeds 1");
    out.alpha = std::min(out.alpha, 1.0);
    return out;
}

}  // namespace excl
