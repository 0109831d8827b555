#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "exclusion/parallel.hpp"

namespace excl {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt big_factorial(std::size_t k) {
    BigInt f = 1;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<unsigned>(i);
    return f;
}

inline BigInt big_pow(const BigInt& base, std::size_t e) {
    return boost::multiprecision::pow(base, static_cast<unsigned>(e));
}

inline BigRat rational_pow(const BigRat& q, std::size_t e) {
    return BigRat(big_pow(boost::multiprecision::numerator(q), e),
                  big_pow(boost::multiprecision::denominator(q), e));
}

inline double to_double(const BigRat& q) { return q.convert_to<double>(); }

inline std::string rational_string(const BigRat& q) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
    return os.str();
}

// A validated simple d-regular graph. closed_neighborhoods holds the bitset
// N[v] = {v} union N(v) when n <= 64 (the enumeration word size).
struct RegularGraph {
    std::size_t n = 0;
    std::size_t degree = 0;
    std::vector<std::vector<std::uint32_t>> adjacency;
    std::vector<std::uint64_t> closed_neighborhoods;
    std::string label;

    std::size_t edge_count() const { return n * degree / 2; }

    bool has_edge(std::uint32_t u, std::uint32_t v) const {
        const auto& row = adjacency[u];
        return std::binary_search(row.begin(), row.end(), v);
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list() const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        out.reserve(edge_count());
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v : adjacency[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }
};

namespace detail {

inline RegularGraph finalize_graph(std::size_t n, std::vector<std::set<std::uint32_t>> neighbor_sets,
                                   std::string label) {
    RegularGraph g;
    g.n = n;
    g.label = std::move(label);
    g.adjacency.resize(n);
    if (n == 0) throw std::invalid_argument(g.label + ": empty vertex set");
    std::size_t degree = neighbor_sets[0].size();
    for (std::uint32_t v = 0; v < n; ++v) {
        if (neighbor_sets[v].count(v))
            throw std::invalid_argument(g.label + ": self-loop at vertex " + std::to_string(v));
        if (neighbor_sets[v].size() != degree)
            throw std::invalid_argument(g.label + ": vertex " + std::to_string(v) + " has degree " +
                                        std::to_string(neighbor_sets[v].size()) + ", expected " +
                                        std::to_string(degree));
        for (std::uint32_t u : neighbor_sets[v])
            if (u >= n || !neighbor_sets[u].count(v))
                throw std::invalid_argument(g.label + ": asymmetric or out-of-range edge at vertex " +
                                            std::to_string(v));
        g.adjacency[v].assign(neighbor_sets[v].begin(), neighbor_sets[v].end());
    }
    g.degree = degree;
    if (n * degree % 2 != 0)
        throw std::invalid_argument(g.label + ": n * d must be even");
    if (n <= 64) {
        g.closed_neighborhoods.resize(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            std::uint64_t mask = 1ULL << v;
            for (std::uint32_t u : g.adjacency[v]) mask |= 1ULL << u;
            g.closed_neighborhoods[v] = mask;
        }
    }
    return g;
}

inline void add_edge(std::vector<std::set<std::uint32_t>>& forward, std::uint32_t u, std::uint32_t v) {
    forward[u].insert(v);
    forward[v].insert(u);
}

}  // namespace detail

inline RegularGraph make_cycle(std::size_t n) {
    if (n < 3) throw std::invalid_argument("cycle: need at least 3 vertices");
    std::vector<std::set<std::uint32_t>> nb(n);
    for (std::uint32_t v = 0; v < n; ++v)
        detail::add_edge(nb, v, static_cast<std::uint32_t>((v + 1) % n));
    return detail::finalize_graph(n, std::move(nb), "cycle(" + std::to_string(n) + ")");
}

inline RegularGraph make_hypercube(std::size_t d) {
    if (d == 0 || d > 30) throw std::invalid_argument("hypercube: dimension must be in [1, 30]");
    const std::size_t n = std::size_t{1} << d;
    std::vector<std::set<std::uint32_t>> nb(n);
    for (std::uint32_t v = 0; v < n; ++v)
        for (std::size_t b = 0; b < d; ++b)
            detail::add_edge(nb, v, v ^ (std::uint32_t{1} << b));
    return detail::finalize_graph(n, std::move(nb), "hypercube(" + std::to_string(d) + ")");
}

// d-dimensional discrete torus of even side length; degree 2d. Side 2 would
// collapse the +1 and -1 neighbors into parallel edges, hence side >= 4.
inline RegularGraph make_discrete_torus(std::size_t d, std::size_t side) {
    if (d == 0) throw std::invalid_argument("discrete_torus: dimension must be >= 1");
    if (side < 4 || side % 2 != 0)
        throw std::invalid_argument("discrete_torus: side must be an even integer >= 4");
    std::size_t n = 1;
    for (std::size_t ax = 0; ax < d; ++ax) {
        n *= side;
        if (n > (std::size_t{1} << 32)) throw std::invalid_argument("discrete_torus: too many vertices");
    }
    std::vector<std::set<std::uint32_t>> nb(n);
    std::vector<std::size_t> digits(d);
    for (std::uint32_t v = 0; v < n; ++v) {
        std::size_t rest = v;
        for (std::size_t ax = 0; ax < d; ++ax) {
            digits[ax] = rest % side;
            rest /= side;
        }
        for (std::size_t ax = 0; ax < d; ++ax) {
            std::size_t stride = 1;
            for (std::size_t a2 = 0; a2 < ax; ++a2) stride *= side;
            const std::size_t up = (digits[ax] + 1) % side;
            const std::uint32_t u =
                static_cast<std::uint32_t>(v - digits[ax] * stride + up * stride);
            detail::add_edge(nb, v, u);
        }
    }
    return detail::finalize_graph(
        n, std::move(nb), "discrete_torus(" + std::to_string(d) + "," + std::to_string(side) + ")");
}

// H_{d,n}: disjoint copies of K_{d,d}, the conjectured extremal d-regular graph.
inline RegularGraph make_disjoint_kdd(std::size_t d, std::size_t copies) {
    if (d == 0 || copies == 0) throw std::invalid_argument("disjoint_kdd: d and copies must be >= 1");
    const std::size_t n = 2 * d * copies;
    std::vector<std::set<std::uint32_t>> nb(n);
    for (std::size_t c = 0; c < copies; ++c) {
        const std::uint32_t base = static_cast<std::uint32_t>(2 * d * c);
        for (std::uint32_t i = 0; i < d; ++i)
            for (std::uint32_t j = 0; j < d; ++j)
                detail::add_edge(nb, base + i, base + static_cast<std::uint32_t>(d) + j);
    }
    return detail::finalize_graph(
        n, std::move(nb), "disjoint_kdd(" + std::to_string(d) + "," + std::to_string(copies) + ")");
}

// Edge-list format: first line "n d", then one 0-indexed "u v" pair per line.
inline RegularGraph graph_from_edge_list(std::istream& is, const std::string& label = "edge-list") {
    std::size_t n = 0, d = 0;
    if (!(is >> n >> d)) throw std::invalid_argument(label + ": expected header line 'n d'");
    std::vector<std::set<std::uint32_t>> nb(n);
    long long u, v;
    while (is >> u >> v) {
        if (u < 0 || v < 0 || u >= static_cast<long long>(n) || v >= static_cast<long long>(n))
            throw std::invalid_argument(label + ": vertex " + std::to_string(u < 0 || u >= (long long)n ? u : v) +
                                        " out of range [0, " + std::to_string(n) + ")");
        if (u == v) throw std::invalid_argument(label + ": self-loop at vertex " + std::to_string(u));
        if (nb[static_cast<std::size_t>(u)].count(static_cast<std::uint32_t>(v)))
            throw std::invalid_argument(label + ": duplicate edge " + std::to_string(u) + " " + std::to_string(v));
        detail::add_edge(nb, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
    RegularGraph g = detail::finalize_graph(n, std::move(nb), label);
    if (g.degree != d)
        throw std::invalid_argument(label + ": header declares degree " + std::to_string(d) +
                                    " but vertex 0 has degree " + std::to_string(g.degree));
    return g;
}

// Textual constructor specs: hypercube:D, cycle:N, discrete_torus:D:SIDE
// (alias torus), disjoint_kdd:D:COPIES (alias kdd).
inline RegularGraph build_graph(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    const auto arg = [&](std::size_t i) -> std::size_t {
        if (i >= parts.size()) throw std::invalid_argument("build_graph: missing argument in '" + spec + "'");
        return static_cast<std::size_t>(std::stoull(parts[i]));
    };
    const std::string& name = parts[0];
    if (name == "hypercube") return make_hypercube(arg(1));
    if (name == "cycle") return make_cycle(arg(1));
    if (name == "discrete_torus" || name == "torus") return make_discrete_torus(arg(1), arg(2));
    if (name == "disjoint_kdd" || name == "kdd") return make_disjoint_kdd(arg(1), arg(2));
    throw std::invalid_argument("build_graph: unknown graph spec '" + spec + "'");
}

inline std::size_t count_triangles(const RegularGraph& g) {
    std::size_t triple = 0;  // sum over edges of common neighbors = 3 * #triangles
    for (std::uint32_t u = 0; u < g.n; ++u)
        for (std::uint32_t v : g.adjacency[u]) {
            if (v <= u) continue;
            const auto& a = g.adjacency[u];
            const auto& b = g.adjacency[v];
            std::size_t i = 0, j = 0;
            while (i < a.size() && j < b.size()) {
                if (a[i] == b[j]) ++triple, ++i, ++j;
                else if (a[i] < b[j]) ++i;
                else ++j;
            }
        }
    return triple / 3;
}

enum class CountMode { IndependentSets, Matchings };

inline const char* count_mode_name(CountMode m) {
    return m == CountMode::IndependentSets ? "independent-sets" : "matchings";
}

struct EnumerationBudget {
    std::size_t max_vertices = 40;  // IS mode
    std::size_t max_edges = 60;     // matching mode
};

// counts[k]  = number of conflict-free k-subsets
// cover_sums[k] = sum over those subsets S of |union of closed neighborhoods of S|
struct SizeProfile {
    std::vector<BigInt> counts;
    std::vector<BigInt> cover_sums;
};

namespace detail {

struct WideCounts {
    std::vector<unsigned __int128> counts, covers;
    explicit WideCounts(std::size_t n) : counts(n + 1, 0), covers(n + 1, 0) {}
};

// Ordered branch enumeration: take the lowest-index remaining element and
// either include it (masking out its closed neighborhood) or pass over it.
// Every conflict-free subset is produced exactly once, in O(1) bitset work
// per subset visited.
inline void enumerate_rec(const std::vector<std::uint64_t>& closed, std::uint64_t cands,
                          unsigned size, std::uint64_t cover, WideCounts& acc) {
    while (cands) {
        const unsigned v = static_cast<unsigned>(std::countr_zero(cands));
        cands &= cands - 1;
        const std::uint64_t c2 = cover | closed[v];
        acc.counts[size + 1] += 1;
        acc.covers[size + 1] += static_cast<unsigned>(std::popcount(c2));
        enumerate_rec(closed, cands & ~closed[v], size + 1, c2, acc);
    }
}

inline BigInt from_wide(unsigned __int128 x) {
    BigInt hi = static_cast<std::uint64_t>(x >> 64);
    return (hi << 64) + static_cast<std::uint64_t>(x);
}

}  // namespace detail

// Exact per-size counts and coverage sums of all conflict-free subsets of a
// structure given by closed-neighborhood bitsets (vertex sets of a graph, or
// edge sets via the line graph). Top-level branches parallelize; partial
// counts merge by exact integer addition, so results are thread-count
// independent.
inline SizeProfile enumerate_conflict_sets(const std::vector<std::uint64_t>& closed,
                                           unsigned threads = 1) {
    const std::size_t n = closed.size();
    if (n > 64) throw std::invalid_argument("enumerate_conflict_sets: more than 64 elements");
    const std::uint64_t full = n == 64 ? ~0ULL : (1ULL << n) - 1;

    std::vector<detail::WideCounts> partial(n, detail::WideCounts(n));
    parallel_chunks(n, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t v = b; v < e; ++v) {
            const std::uint64_t higher = v + 1 >= 64 ? 0ULL : full & ~((2ULL << v) - 1);
            detail::WideCounts& acc = partial[v];
            const std::uint64_t c2 = closed[v];
            acc.counts[1] += 1;
            acc.covers[1] += static_cast<unsigned>(std::popcount(c2));
            detail::enumerate_rec(closed, higher & ~closed[v], 1, c2, acc);
        }
    });

    SizeProfile out;
    out.counts.assign(n + 1, 0);
    out.cover_sums.assign(n + 1, 0);
    out.counts[0] = 1;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t k = 1; k <= n; ++k) {
            if (partial[v].counts[k] != 0) out.counts[k] += detail::from_wide(partial[v].counts[k]);
            if (partial[v].covers[k] != 0) out.cover_sums[k] += detail::from_wide(partial[v].covers[k]);
        }
    return out;
}

// Conflict bitsets for the requested mode: IS mode uses the graph itself;
// matching mode uses the line graph (edges conflict when they share a vertex,
// and an edge covers its closed line-graph neighborhood).
inline std::vector<std::uint64_t> conflict_masks(const RegularGraph& g, CountMode mode) {
    if (mode == CountMode::IndependentSets) {
        if (g.n > 64) throw std::invalid_argument("conflict_masks: graph has more than 64 vertices");
        return g.closed_neighborhoods;
    }
    const auto edges = g.edge_list();
    const std::size_t m = edges.size();
    if (m > 64) throw std::invalid_argument("conflict_masks: graph has more than 64 edges");
    std::vector<std::uint64_t> masks(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t mask = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const bool share = edges[i].first == edges[j].first || edges[i].first == edges[j].second ||
                               edges[i].second == edges[j].first || edges[i].second == edges[j].second;
            if (share) mask |= 1ULL << j;
        }
        masks[i] = mask;
    }
    return masks;
}

struct CountTable {
    CountMode mode = CountMode::IndependentSets;
    std::vector<BigInt> counts;  // index k
    BigRat p;                    // (d+1)/n for vertices, (2d-1)/m for edges
};

// Everything the exact checks need from one enumeration pass.
struct ExactSummary {
    CountMode mode = CountMode::IndependentSets;
    std::size_t n_vertices = 0;
    std::size_t degree = 0;
    std::size_t base = 0;  // n in IS mode, m in matching mode
    BigRat p;
    SizeProfile profile;
};

inline BigRat collision_probability(const RegularGraph& g, CountMode mode) {
    if (mode == CountMode::IndependentSets)
        return BigRat(static_cast<unsigned long long>(g.degree + 1), static_cast<unsigned long long>(g.n));
    return BigRat(static_cast<unsigned long long>(2 * g.degree - 1),
                  static_cast<unsigned long long>(g.edge_count()));
}

inline ExactSummary enumerate_graph(const RegularGraph& g, CountMode mode,
                                    const EnumerationBudget& budget = {}, unsigned threads = 1) {
    if (mode == CountMode::IndependentSets && g.n > budget.max_vertices)
        throw std::invalid_argument("enumerate_graph: " + std::to_string(g.n) +
                                    " vertices exceeds the enumeration budget of " +
                                    std::to_string(budget.max_vertices));
    if (mode == CountMode::Matchings && g.edge_count() > budget.max_edges)
        throw std::invalid_argument("enumerate_graph: " + std::to_string(g.edge_count()) +
                                    " edges exceeds the enumeration budget of " +
                                    std::to_string(budget.max_edges));
    ExactSummary s;
    s.mode = mode;
    s.n_vertices = g.n;
    s.degree = g.degree;
    s.base = mode == CountMode::IndependentSets ? g.n : g.edge_count();
    s.p = collision_probability(g, mode);
    s.profile = enumerate_conflict_sets(conflict_masks(g, mode), threads);
    return s;
}

inline CountTable count_by_size(const RegularGraph& g, CountMode mode,
                                const EnumerationBudget& budget = {}, unsigned threads = 1) {
    ExactSummary s = enumerate_graph(g, mode, budget, threads);
    return {mode, std::move(s.profile.counts), std::move(s.p)};
}

// E[V_k | E_k]: average covered fraction over all conflict-free sets of size
// k, exact. Identical picks count as collisions (with-replacement
// convention), so this is the uniform law on size-k sets.
inline BigRat exact_conditional_coverage(const ExactSummary& s, std::size_t k) {
    if (k >= s.profile.counts.size() || s.profile.counts[k] == 0)
        throw std::domain_error("exact_conditional_coverage: no sets of size " + std::to_string(k) +
                                " (event E_k is empty)");
    if (k == 0) return BigRat(0);
    return BigRat(s.profile.cover_sums[k],
                  s.profile.counts[k] * BigInt(static_cast<unsigned long long>(s.base)));
}

inline BigRat exact_conditional_coverage(const RegularGraph& g, std::size_t k, CountMode mode,
                                         const EnumerationBudget& budget = {}, unsigned threads = 1) {
    return exact_conditional_coverage(enumerate_graph(g, mode, budget, threads), k);
}

// slack >= 0 iff the inequality holds: birthday uses slack = rhs - lhs,
// repulsion and the conditional-coverage estimate use slack = lhs - rhs.
struct ExactCheck {
    std::size_t k = 0;
    BigRat lhs, rhs;
    bool holds = false;
    double slack = 0.0;
};

// Pr[E_k] <= (1-p)^C(k,2), both sides exact rationals.
inline ExactCheck birthday_check(const ExactSummary& s, std::size_t k) {
    ExactCheck c;
    c.k = k;
    const BigInt count = k < s.profile.counts.size() ? s.profile.counts[k] : BigInt(0);
    c.lhs = BigRat(big_factorial(k) * count, big_pow(BigInt(static_cast<unsigned long long>(s.base)), k));
    c.rhs = rational_pow(BigRat(1) - s.p, k * (k - 1) / 2);
    c.holds = c.lhs <= c.rhs;
    c.slack = to_double(BigRat(c.rhs - c.lhs));
    return c;
}

// E[V_k | E_k] >= 1 - (1-p)^k, both sides exact rationals.
inline ExactCheck repulsion_check(const ExactSummary& s, std::size_t k) {
    ExactCheck c;
    c.k = k;
    c.lhs = exact_conditional_coverage(s, k);
    c.rhs = BigRat(1) - rational_pow(BigRat(1) - s.p, k);
    c.holds = c.lhs >= c.rhs;
    c.slack = to_double(BigRat(c.lhs - c.rhs));
    return c;
}

// E[V_k | E_k] >= k(d+1)/n - C(k,2) d(d-1) / (n^2 (1-kp)^2), exact rationals;
// vertex (IS) mode only, needs kp < 1.
inline ExactCheck bipest_check(const ExactSummary& s, std::size_t k) {
    if (s.mode != CountMode::IndependentSets)
        throw std::invalid_argument("bipest_check: defined for independent-set mode only");
    const BigRat kp = BigRat(static_cast<unsigned long long>(k)) * s.p;
    if (kp >= 1)
        throw std::domain_error("bipest_check: inapplicable, k p >= 1 at k = " + std::to_string(k));
    ExactCheck c;
    c.k = k;
    c.lhs = exact_conditional_coverage(s, k);
    const auto n = static_cast<unsigned long long>(s.n_vertices);
    const auto d = static_cast<unsigned long long>(s.degree);
    const BigRat one_minus_kp = BigRat(1) - kp;
    c.rhs = BigRat(static_cast<unsigned long long>(k) * (d + 1), n) -
            BigRat(static_cast<unsigned long long>(k) * (k - 1) / 2) *
                BigRat(d * (d - 1)) / (BigRat(n) * BigRat(n) * one_minus_kp * one_minus_kp);
    c.holds = c.lhs >= c.rhs;
    c.slack = to_double(BigRat(c.lhs - c.rhs));
    return c;
}

inline ExactCheck birthday_check(const RegularGraph& g, std::size_t k, CountMode mode,
                                 const EnumerationBudget& budget = {}, unsigned threads = 1) {
    return birthday_check(enumerate_graph(g, mode, budget, threads), k);
}
inline ExactCheck repulsion_check(const RegularGraph& g, std::size_t k, CountMode mode,
                                  const EnumerationBudget& budget = {}, unsigned threads = 1) {
    return repulsion_check(enumerate_graph(g, mode, budget, threads), k);
}
inline ExactCheck bipest_check(const RegularGraph& g, std::size_t k,
                               const EnumerationBudget& budget = {}, unsigned threads = 1) {
    return bipest_check(enumerate_graph(g, CountMode::IndependentSets, budget, threads), k);
}

struct ComparisonResult {
    BigRat value_g, value_h;
    bool consistent = false;  // E_H[V_k|E_k] <= E_G[V_k|E_k]
};

// Compares E[V_k | E_k] on G against the conjectured minimizer H_{d,n}
// (disjoint copies of K_{d,d}). Violations are reported, never suppressed.
inline ComparisonResult conjecture2_compare(const RegularGraph& g, std::size_t k,
                                            const EnumerationBudget& budget = {},
                                            unsigned threads = 1) {
    if (g.degree == 0 || g.n % (2 * g.degree) != 0)
        throw std::invalid_argument("conjecture2_compare: 2d = " + std::to_string(2 * g.degree) +
                                    " does not divide n = " + std::to_string(g.n));
    const RegularGraph h = make_disjoint_kdd(g.degree, g.n / (2 * g.degree));
    ComparisonResult out;
    out.value_g = exact_conditional_coverage(g, k, CountMode::IndependentSets, budget, threads);
    out.value_h = exact_conditional_coverage(h, k, CountMode::IndependentSets, budget, threads);
    out.consistent = out.value_h <= out.value_g;
    return out;
}

}  // namespace excl
