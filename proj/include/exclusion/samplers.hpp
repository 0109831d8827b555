#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "exclusion/parallel.hpp"
#include "exclusion/rgg.hpp"

namespace excl {

// Shared confidence radius for every statistical pass/fail check
// (two-sided false-alarm rate ~6e-5 per check).
inline constexpr double kConfidenceSigmas = 4.0;

enum class EstimateMethod { NaiveMc, Telescoping, Exact };

inline const char* method_name(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::NaiveMc: return "naive-mc";
        case EstimateMethod::Telescoping: return "telescoping";
        default: return "exact";
    }
}

struct Estimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    EstimateMethod method = EstimateMethod::NaiveMc;
};

enum class SamplerBackend { Auto, Rejection, Mcmc };

inline const char* backend_name(SamplerBackend b) {
    switch (b) {
        case SamplerBackend::Auto: return "auto";
        case SamplerBackend::Rejection: return "rejection";
        default: return "mcmc";
    }
}

namespace detail {
// Stream ids: tag in the top byte, (k, replica) below. Keeps every RNG
// stream in a run distinct without any shared state.
inline std::uint64_t stream_id(unsigned tag, std::uint64_t k = 0, std::uint64_t replica = 0) {
    return (static_cast<std::uint64_t>(tag) << 56) ^ (k << 32) ^ replica;
}
inline constexpr unsigned kTagReplica = 1;
inline constexpr unsigned kTagProbe = 2;
inline constexpr unsigned kTagPilot = 3;
inline constexpr unsigned kTagChain = 4;

inline bool fill_conditional_attempt(TorusConfiguration& c, std::size_t k, std::mt19937_64& g) {
    fill_uniform(c, k, g);
    return is_empty_graph(c);
}
}  // namespace detail

struct RejectionSample {
    TorusConfiguration config;
    std::uint64_t attempts = 0;
};

// Exact sampling from the conditional law on E_k: resample i.i.d. uniform
// configurations until one has all pairwise distances > r.
inline RejectionSample rejection_sample_Ek(std::size_t k, const ModelParams& params,
                                           std::uint64_t seed,
                                           std::uint64_t max_attempts = 1000000) {
    RejectionSample out;
    out.config.params = params;
    auto g = make_stream(seed, 0);
    for (std::uint64_t a = 1; a <= max_attempts; ++a) {
        if (detail::fill_conditional_attempt(out.config, k, g)) {
            out.attempts = a;
            return out;
        }
    }
    throw std::runtime_error("rejection_sample_Ek: no valid configuration of " + std::to_string(k) +
                             " centers in " + std::to_string(max_attempts) +
                             " attempts; use the MCMC backend at this density");
}

struct ChainState {
    TorusConfiguration config;  // always satisfies E_k
    std::uint64_t steps_taken = 0;
    std::uint64_t accepts = 0;
};

// Deterministic valid starting state: the first k sites of the m^d lattice
// with m = ceil(k^(1/d)); distinct sites are at torus distance >= 1/m in
// both metrics.
inline ChainState make_lattice_state(std::size_t k, const ModelParams& params) {
    ChainState st;
    st.config.params = params;
    const std::size_t d = params.d;
    if (d == 0) throw std::invalid_argument("make_lattice_state: dimension must be >= 1");
    const auto capacity = [d, k](std::size_t mm) {
        std::size_t c = 1;
        for (std::size_t ax = 0; ax < d; ++ax) {
            c *= mm;
            if (c >= k) break;
        }
        return c;
    };
    std::size_t m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(d)))));
    while (capacity(m) < k) ++m;
    while (m > 1 && capacity(m - 1) >= k) --m;
    if (k >= 2 && 1.0 / static_cast<double>(m) <= params.r)
        throw std::runtime_error("make_lattice_state: no valid lattice start for k = " + std::to_string(k) +
                                 " at r = " + std::to_string(params.r));
    st.config.coords.resize(k * d);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t rest = i;
        for (std::size_t ax = 0; ax < d; ++ax) {
            st.config.coords[i * d + ax] = static_cast<double>(rest % m) / static_cast<double>(m);
            rest /= m;
        }
    }
    return st;
}

namespace detail {
inline bool move_is_valid(const TorusConfiguration& c, std::size_t moved, const double* proposal) {
    const std::size_t k = c.count(), d = c.params.d;
    for (std::size_t j = 0; j < k; ++j) {
        if (j == moved) continue;
        if (within_distance(proposal, c.point(j), d, c.params.metric, c.params.r)) return false;
    }
    return true;
}
}  // namespace detail

// Single-particle global-move dynamics: pick a uniform particle, propose a
// uniform new position, accept iff the hard constraint stays satisfied.
// The stream is derived from (seed, steps_taken), so consecutive segments of
// one chain under a fixed seed never reuse randomness.
inline ChainState mcmc_run(ChainState state, std::uint64_t steps, std::uint64_t seed) {
    if (!is_empty_graph(state.config))
        throw std::invalid_argument("mcmc_run: input configuration violates the hard constraint");
    const std::size_t k = state.config.count(), d = state.config.params.d;
    auto g = make_stream(seed, state.steps_taken);
    std::vector<double> proposal(d);
    for (std::uint64_t s = 0; s < steps; ++s) {
        if (k == 0) break;
        const std::size_t i = static_cast<std::size_t>(uniform_index(g, k));
        for (double& x : proposal) x = uniform01(g);
        if (detail::move_is_valid(state.config, i, proposal.data())) {
            std::copy(proposal.begin(), proposal.end(), state.config.coords.begin() + i * d);
            ++state.accepts;
        }
    }
    state.steps_taken += steps;
    return state;
}

inline std::uint64_t chain_burn_in(std::size_t k) {
    return static_cast<std::uint64_t>(std::ceil(100.0 * static_cast<double>(k) *
                                                std::log(static_cast<double>(k) + 1.0)));
}

// Pilot: rejection attempts on a dedicated stream until either 4 acceptances
// (keep rejection) or 4000 attempts without them (switch to the chain);
// 4/4000 realizes the 1e-3 acceptance threshold. Pure function of
// (k, params, seed), never of thread timing.
inline SamplerBackend choose_backend(std::size_t k, const ModelParams& params, std::uint64_t seed) {
    if (k <= 1) return SamplerBackend::Rejection;
    auto g = make_stream(seed, detail::stream_id(detail::kTagPilot, k));
    TorusConfiguration scratch;
    scratch.params = params;
    unsigned accepted = 0;
    for (unsigned a = 0; a < 4000; ++a)
        if (detail::fill_conditional_attempt(scratch, k, g) && ++accepted >= 4)
            return SamplerBackend::Rejection;
    return SamplerBackend::Mcmc;
}

namespace detail {

// Visits `replicas` conditional samples on E_k, fn(replica, config), possibly
// concurrently. Rejection samples are independent per replica; the chain
// backend runs 8 independent chains over contiguous replica blocks with
// burn-in 100 k ln(k+1) and k-step thinning. Either way, sample i depends
// only on (seed, i), so reductions in replica order are thread-count
// independent.
template <typename Fn>
SamplerBackend for_each_conditional_sample(std::size_t k, const ModelParams& params,
                                           std::uint64_t replicas, std::uint64_t seed,
                                           SamplerBackend backend, unsigned threads,
                                           std::uint64_t max_attempts, Fn&& fn) {
    if (backend == SamplerBackend::Auto) backend = choose_backend(k, params, seed);
    if (backend == SamplerBackend::Rejection) {
        parallel_chunks(replicas, threads, [&](std::size_t b, std::size_t e) {
            TorusConfiguration c;
            c.params = params;
            for (std::size_t i = b; i < e; ++i) {
                auto g = make_stream(seed, stream_id(kTagReplica, k, i));
                bool ok = false;
                for (std::uint64_t a = 0; a < max_attempts && !ok; ++a)
                    ok = fill_conditional_attempt(c, k, g);
                if (!ok)
                    throw std::runtime_error("conditional sampling: rejection budget exhausted at k = " +
                                             std::to_string(k) + "; rerun with the MCMC backend");
                fn(i, c);
            }
        });
        return backend;
    }

    constexpr std::uint64_t kChains = 8;
    const std::uint64_t per_chain = (replicas + kChains - 1) / kChains;
    const std::uint64_t burn = chain_burn_in(k);
    parallel_chunks(kChains, threads, [&](std::size_t cb, std::size_t ce) {
        for (std::size_t chain = cb; chain < ce; ++chain) {
            const std::uint64_t b = chain * per_chain;
            const std::uint64_t e = std::min<std::uint64_t>(replicas, b + per_chain);
            if (b >= e) continue;
            const std::uint64_t chain_seed = derive_seed(seed, stream_id(kTagChain, k, chain));
            ChainState st = mcmc_run(make_lattice_state(k, params), burn, chain_seed);
            for (std::uint64_t i = b; i < e; ++i) {
                st = mcmc_run(std::move(st), k, chain_seed);  // k-step thinning
                fn(i, st.config);
            }
        }
    });
    return backend;
}

// Per-sample covered fraction: exact arcs in d = 1, probe estimate otherwise.
inline double coverage_value(const TorusConfiguration& c, std::size_t probes, std::uint64_t probe_seed) {
    return covered_fraction(c, probes, probe_seed).value;
}

inline double plain_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Standard error of the mean. For chain output, batch means over 32
// consecutive batches absorb the autocorrelation left after thinning.
inline double mean_stderr(const std::vector<double>& v, bool batched) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    if (batched && n >= 64) {
        const std::size_t nb = 32, per = n / nb;
        std::vector<double> bm(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            double s = 0.0;
            for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += v[i];
            bm[b] = s / static_cast<double>(per);
        }
        return mean_stderr(bm, false);
    }
    const double m = plain_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

}  // namespace detail

struct EstimatorOptions {
    std::uint64_t replicas = 100000;
    std::uint64_t seed = 0;
    EstimateMethod method = EstimateMethod::NaiveMc;
    SamplerBackend backend = SamplerBackend::Auto;
    std::uint64_t probes = 10000;  // coverage probes per conditional sample, d >= 2
    unsigned threads = 0;          // 0 = all cores
    std::uint64_t max_attempts = 1000000;
};

// Pr[E_n] = Z_d(n, r). naive-mc counts empty i.i.d. configurations;
// telescoping multiplies per-k estimates of E[1 - V_k | E_k] with the
// standard error propagated in the log domain (delta method).
inline Estimate estimate_prob_empty(const ModelParams& params, const EstimatorOptions& opt) {
    if (params.n <= 1) return {1.0, 0.0, 0, opt.seed, EstimateMethod::Exact};
    if (opt.replicas < 100)
        throw std::invalid_argument("estimate_prob_empty: at least 100 replicas required");

    if (opt.method == EstimateMethod::NaiveMc) {
        const std::uint64_t R = opt.replicas;
        std::vector<std::uint8_t> empty(R);
        parallel_chunks(R, opt.threads, [&](std::size_t b, std::size_t e) {
            TorusConfiguration c;
            c.params = params;
            for (std::size_t i = b; i < e; ++i) {
                auto g = make_stream(opt.seed, detail::stream_id(detail::kTagReplica, 0, i));
                empty[i] = detail::fill_conditional_attempt(c, params.n, g) ? 1 : 0;
            }
        });
        std::uint64_t hits = 0;
        for (std::uint8_t b : empty) hits += b;
        const double mean = static_cast<double>(hits) / static_cast<double>(R);
        const double se = std::sqrt(std::max(mean * (1.0 - mean), 0.0) / static_cast<double>(R));
        return {mean, se, R, opt.seed, EstimateMethod::NaiveMc};
    }
    if (opt.method != EstimateMethod::Telescoping)
        throw std::invalid_argument("estimate_prob_empty: method must be naive-mc or telescoping");

    // Pr[E_n] = prod_{k=1}^{n-1} E[1 - V_k | E_k]; V_1 = p deterministically,
    // so n = 2 needs no sampling at all.
    double product = 1.0 - params.p;
    if (params.n == 2) return {product, 0.0, 0, opt.seed, EstimateMethod::Exact};
    double rel_var = 0.0;
    std::vector<double> vals(opt.replicas);
    for (std::size_t k = 2; k < params.n; ++k) {
        const SamplerBackend used = detail::for_each_conditional_sample(
            k, params, opt.replicas, opt.seed, opt.backend, opt.threads, opt.max_attempts,
            [&](std::size_t i, const TorusConfiguration& c) {
                vals[i] = 1.0 - detail::coverage_value(
                                    c, opt.probes,
                                    derive_seed(opt.seed, detail::stream_id(detail::kTagProbe, k, i)));
            });
        const double f = detail::plain_mean(vals);
        const double se = detail::mean_stderr(vals, used == SamplerBackend::Mcmc);
        if (f <= 0.0)
            throw std::runtime_error("estimate_prob_empty: telescoping factor estimate <= 0 at k = " +
                                     std::to_string(k) + "; sample size too small at this density");
        product *= f;
        rel_var += (se / f) * (se / f);
    }
    return {product, product * std::sqrt(rel_var), opt.replicas, opt.seed, EstimateMethod::Telescoping};
}

struct RepulsionGap {
    Estimate conditional;              // E[V_k | E_k]
    double unconditional = 0.0;        // 1 - (1-p)^k, exact
    Estimate gap;                      // conditional - unconditional
    double sphere_est_rhs = std::numeric_limits<double>::quiet_NaN();
    bool sphere_est_applicable = false;  // needs kp < 1
    SamplerBackend backend_used = SamplerBackend::Rejection;
};

// Monte Carlo estimate of the repulsion gap E[V_k | E_k] - E[V_k], plus the
// closed-form lower bound kp - C(k,2) p^2 (1 - 4^{-d}) / (1 - kp)^2 on the
// conditional expectation.
inline RepulsionGap repulsion_gap(std::size_t k, const ModelParams& params, const EstimatorOptions& opt) {
    if (k == 0) throw std::invalid_argument("repulsion_gap: k >= 1 required");
    if (opt.replicas == 0) throw std::invalid_argument("repulsion_gap: replicas >= 1 required");
    const double p = params.p;
    RepulsionGap out;
    out.unconditional = 1.0 - std::pow(1.0 - p, static_cast<double>(k));
    const double kp = static_cast<double>(k) * p;
    if (kp < 1.0) {
        out.sphere_est_applicable = true;
        const double pairs = 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
        out.sphere_est_rhs = kp - pairs * p * p *
                                      (1.0 - std::pow(4.0, -static_cast<double>(params.d))) /
                                      ((1.0 - kp) * (1.0 - kp));
    }
    if (k == 1) {
        // E_1 is the whole space and V_1 = p exactly
        out.conditional = {p, 0.0, 0, opt.seed, EstimateMethod::Exact};
        out.gap = {0.0, 0.0, 0, opt.seed, EstimateMethod::Exact};
        return out;
    }

    std::vector<double> vals(opt.replicas);
    out.backend_used = detail::for_each_conditional_sample(
        k, params, opt.replicas, opt.seed, opt.backend, opt.threads, opt.max_attempts,
        [&](std::size_t i, const TorusConfiguration& c) {
            vals[i] = detail::coverage_value(
                c, opt.probes, derive_seed(opt.seed, detail::stream_id(detail::kTagProbe, k, i)));
        });
    const double mean = detail::plain_mean(vals);
    const double se = detail::mean_stderr(vals, out.backend_used == SamplerBackend::Mcmc);
    out.conditional = {mean, se, opt.replicas, opt.seed, EstimateMethod::NaiveMc};
    out.gap = {mean - out.unconditional, se, opt.replicas, opt.seed, EstimateMethod::NaiveMc};
    return out;
}

}  // namespace excl
