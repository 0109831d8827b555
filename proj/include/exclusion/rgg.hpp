#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "exclusion/geometry.hpp"
#include "exclusion/rng.hpp"

namespace excl {

// A configuration of centers on the unit torus, stored as one flat array for
// the pairwise-distance loops. All points share params.d and params.metric;
// count() is at most params.n.
struct TorusConfiguration {
    ModelParams params;
    std::vector<double> coords;

    std::size_t count() const { return params.d == 0 ? 0 : coords.size() / params.d; }
    const double* point(std::size_t i) const { return coords.data() + i * params.d; }
    std::span<const double> point_span(std::size_t i) const { return {point(i), params.d}; }

    void push_point(const TorusPoint& pt) {
        if (pt.dim() != params.d)
            throw std::invalid_argument("push_point: point dimension does not match configuration");
        coords.insert(coords.end(), pt.coords.begin(), pt.coords.end());
    }
};

namespace detail {
inline void fill_uniform(TorusConfiguration& c, std::size_t k, std::mt19937_64& g) {
    c.coords.resize(k * c.params.d);
    for (double& x : c.coords) x = uniform01(g);
}
}  // namespace detail

// n i.i.d. uniform points on [0,1)^d. Identical seed => bit-identical output.
inline TorusConfiguration sample_uniform(std::size_t n, std::size_t d, Metric m, std::uint64_t seed) {
    if (d == 0) throw std::invalid_argument("sample_uniform: dimension must be >= 1");
    TorusConfiguration c;
    c.params.n = n;
    c.params.d = d;
    c.params.metric = m;
    auto g = make_stream(seed, 0);
    detail::fill_uniform(c, n, g);
    return c;
}

namespace detail {

inline bool empty_graph_bruteforce(const TorusConfiguration& c) {
    const std::size_t k = c.count(), d = c.params.d;
    const double r = c.params.r;
    const Metric m = c.params.metric;
    for (std::size_t i = 0; i + 1 < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (within_distance(c.point(i), c.point(j), d, m, r)) return false;
    return true;
}

// Uniform bucket grid with cell side >= r: a collision partner can only sit
// in the 3^d cells around a point's own cell (true for L2 and Linf alike).
inline bool empty_graph_grid(const TorusConfiguration& c, std::size_t cells_per_dim) {
    const std::size_t k = c.count(), d = c.params.d;
    const double r = c.params.r;
    const Metric m = c.params.metric;
    const std::size_t C = cells_per_dim;

    std::size_t total_cells = 1;
    for (std::size_t ax = 0; ax < d; ++ax) total_cells *= C;
    std::vector<std::vector<std::uint32_t>> buckets(total_cells);

    std::vector<std::size_t> cell_idx(d);
    std::vector<long> offset(d, -1);
    for (std::size_t i = 0; i < k; ++i) {
        const double* pt = c.point(i);
        for (std::size_t ax = 0; ax < d; ++ax)
            cell_idx[ax] = std::min<std::size_t>(C - 1, static_cast<std::size_t>(pt[ax] * static_cast<double>(C)));

        // scan the 3^d neighborhood (with wraparound) for earlier points
        std::fill(offset.begin(), offset.end(), -1L);
        for (;;) {
            std::size_t flat = 0;
            for (std::size_t ax = 0; ax < d; ++ax) {
                long q = static_cast<long>(cell_idx[ax]) + offset[ax];
                if (q < 0) q += static_cast<long>(C);
                if (q >= static_cast<long>(C)) q -= static_cast<long>(C);
                flat = flat * C + static_cast<std::size_t>(q);
            }
            for (std::uint32_t j : buckets[flat])
                if (within_distance(pt, c.point(j), d, m, r)) return false;
            std::size_t ax = 0;
            while (ax < d && offset[ax] == 1) offset[ax++] = -1;
            if (ax == d) break;
            ++offset[ax];
        }

        std::size_t own = 0;
        for (std::size_t ax = 0; ax < d; ++ax) own = own * C + cell_idx[ax];
        buckets[own].push_back(static_cast<std::uint32_t>(i));
    }
    return true;
}

}  // namespace detail

// True iff every pair of centers is at torus distance strictly greater than
// params.r (the event E_k).
inline bool is_empty_graph(const TorusConfiguration& c) {
    const std::size_t k = c.count();
    if (k < 2) return true;
    const double r = c.params.r;
    if (r > 0.0 && k > 64 && c.params.d <= 6) {
        // cap the grid resolution at ~one point per cell; 1/r can exceed any
        // integer type for tiny radii, so compare in floating point first
        const double inv_r = 1.0 / r;
        const double by_count =
            std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(c.params.d)));
        const double wanted = std::max(by_count, 3.0);
        if (inv_r >= 3.0) {
            const std::size_t cells = static_cast<std::size_t>(std::min(inv_r, wanted));
            if (cells >= 3) return detail::empty_graph_grid(c, cells);
        }
    }
    return detail::empty_graph_bruteforce(c);
}

enum class CoverageMethod { Exact1d, MonteCarlo, Grid };

inline const char* coverage_method_name(CoverageMethod m) {
    switch (m) {
        case CoverageMethod::Exact1d: return "exact-1d";
        case CoverageMethod::MonteCarlo: return "monte-carlo";
        default: return "grid";
    }
}

struct CoverageResult {
    double value = 0.0;
    CoverageMethod method = CoverageMethod::MonteCarlo;
    double std_err = 0.0;
};

// Exact length of the union of circular arcs [c - r, c + r] on the unit
// circle: the uncovered mass between consecutive sorted centers is
// max(0, gap - 2r).
inline double arc_union_length_1d(std::vector<double> centers, double radius) {
    if (centers.empty()) return 0.0;
    std::sort(centers.begin(), centers.end());
    double uncovered = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double next = i + 1 < centers.size() ? centers[i + 1] : centers.front() + 1.0;
        uncovered += std::max(0.0, (next - centers[i]) - 2.0 * radius);
    }
    return std::clamp(1.0 - uncovered, 0.0, 1.0);
}

namespace detail {
// Binomial standard error; rule-of-succession smoothing keeps it nonzero in
// the all-hit / no-hit corners of an estimated (non-exact) result.
inline double probe_stderr(std::size_t hits, std::size_t n) {
    double v = static_cast<double>(hits) / static_cast<double>(n);
    if (hits == 0 || hits == n) v = (static_cast<double>(hits) + 1.0) / (static_cast<double>(n) + 2.0);
    return std::sqrt(v * (1.0 - v) / static_cast<double>(n));
}

inline bool probe_hits(const TorusConfiguration& c, const double* probe) {
    const std::size_t k = c.count(), d = c.params.d;
    for (std::size_t i = 0; i < k; ++i)
        if (within_distance(probe, c.point(i), d, c.params.metric, c.params.r)) return true;
    return false;
}
}  // namespace detail

// Covered volume fraction V_k of the union of radius-r balls around the
// centers. d = 1 is exact (arc union); higher dimensions use test_points
// uniform probes (or a regular lattice with method = Grid). The probe stream
// depends only on the seed, so estimates with a shared seed are monotone
// under adding centers.
inline CoverageResult covered_fraction(const TorusConfiguration& c, std::size_t test_points,
                                       std::uint64_t seed,
                                       CoverageMethod method = CoverageMethod::MonteCarlo) {
    const std::size_t k = c.count(), d = c.params.d;
    if (c.params.r > 0.5)
        throw std::domain_error("covered_fraction: requires r <= 1/2");
    if (k == 0) return {0.0, CoverageMethod::Exact1d, 0.0};
    if (d == 1) {
        std::vector<double> centers(c.coords);
        return {arc_union_length_1d(std::move(centers), c.params.r), CoverageMethod::Exact1d, 0.0};
    }
    if (test_points == 0)
        throw std::invalid_argument("covered_fraction: test_points must be positive for d > 1");

    if (method == CoverageMethod::Grid) {
        std::size_t per_dim = static_cast<std::size_t>(
            std::round(std::pow(static_cast<double>(test_points), 1.0 / static_cast<double>(d))));
        per_dim = std::max<std::size_t>(per_dim, 1);
        std::size_t total = 1;
        for (std::size_t ax = 0; ax < d; ++ax) total *= per_dim;
        std::vector<double> probe(d);
        std::vector<std::size_t> idx(d, 0);
        std::size_t hits = 0;
        for (std::size_t t = 0; t < total; ++t) {
            std::size_t rest = t;
            for (std::size_t ax = 0; ax < d; ++ax) {
                idx[ax] = rest % per_dim;
                rest /= per_dim;
                probe[ax] = (static_cast<double>(idx[ax]) + 0.5) / static_cast<double>(per_dim);
            }
            if (detail::probe_hits(c, probe.data())) ++hits;
        }
        return {static_cast<double>(hits) / static_cast<double>(total), CoverageMethod::Grid,
                detail::probe_stderr(hits, total)};
    }

    auto g = make_stream(seed, 0);
    std::vector<double> probe(d);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < test_points; ++t) {
        for (double& x : probe) x = uniform01(g);
        if (detail::probe_hits(c, probe.data())) ++hits;
    }
    return {static_cast<double>(hits) / static_cast<double>(test_points), CoverageMethod::MonteCarlo,
            detail::probe_stderr(hits, test_points)};
}

// One row per point, columns x_1..x_d; numbers carry full precision.
inline void write_configuration_csv(const TorusConfiguration& c, std::ostream& os) {
    const std::size_t d = c.params.d;
    for (std::size_t ax = 0; ax < d; ++ax) os << (ax ? "," : "") << "x_" << (ax + 1);
    os << "\n";
    char buf[40];
    for (std::size_t i = 0; i < c.count(); ++i) {
        const double* pt = c.point(i);
        for (std::size_t ax = 0; ax < d; ++ax) {
            std::snprintf(buf, sizeof buf, "%.17g", pt[ax]);
            os << (ax ? "," : "") << buf;
        }
        os << "\n";
    }
}

}  // namespace excl
