#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rag/design_space.hpp"
#include "rag/forest.hpp"
#include "rag/likelihood.hpp"
#include "rag/models.hpp"
#include "rag/parallel.hpp"
#include "rag/requirements.hpp"
#include "rag/rng.hpp"

namespace rag {

/// Raised when no positive-likelihood design can be found: the probe scan
/// came up empty and chain initialization ran out of tries. Signals the
/// requirement is unachievable under the trained model.
struct AllZeroLikelihood : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplerConfig {
    double c0 = 0.25;        // step-scale of the proposal spread
    int n_samples = 30;      // candidates emitted per chain
    int burn_in = 1000;
    int thin = 10;
    int n_chains = 4;
    int max_init_tries = 100;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(c0 > 0.0)) throw std::invalid_argument("SamplerConfig: c0 must be > 0");
        if (n_samples < 0 || burn_in < 0 || max_init_tries < 0)
            throw std::invalid_argument("SamplerConfig: counts must be >= 0");
        if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
        if (n_chains < 1) throw std::invalid_argument("SamplerConfig: n_chains must be >= 1");
    }
};

struct DesignCandidate {
    DesignVector design;
    double likelihood = 0.0;
    std::vector<std::uint8_t> votes;
    int chain_id = 0;
    int step_index = 0;  // MH step within the chain, burn-in included
};

/// Per-dimension proposal spread sigma_j = c0 * d_x^(-1/2) * (u_j - l_j).
inline std::vector<double> proposal_sigmas(const DesignSpace& space, double c0) {
    const double scale = c0 / std::sqrt(static_cast<double>(space.dim()));
    std::vector<double> s(space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j)
        s[j] = scale * (space.dims[j].upper - space.dims[j].lower);
    return s;
}

namespace detail {

/// Folds v into [lo, hi] by mirroring at the walls; the image of a symmetric
/// step stays symmetric, which keeps the simplified acceptance ratio valid.
inline double reflect(double v, double lo, double hi) {
    const double w = hi - lo;
    double t = std::fmod(v - lo, 2.0 * w);
    if (t < 0.0) t += 2.0 * w;
    return t <= w ? lo + t : hi - (t - w);
}

}  // namespace detail

/// Gaussian random-walk proposal reflected into the box. Integer dimensions
/// round the perturbed value first; with integral bounds the reflection then
/// preserves integrality.
inline DesignVector propose(const DesignVector& x, const DesignSpace& space,
                            const std::vector<double>& sigmas, SplitMix64& rng) {
    DesignVector next(space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j) {
        const VariableSpec& dim = space.dims[j];
        double v = x[j] + sigmas[j] * rng.normal();
        if (dim.kind == VarKind::Integer) v = std::round(v);
        next[j] = detail::reflect(v, dim.lower, dim.upper);
    }
    return next;
}

inline DesignVector propose(const DesignVector& x, const DesignSpace& space, double c0,
                            SplitMix64& rng) {
    return propose(x, space, proposal_sigmas(space, c0), rng);
}

/// Acceptance rule alpha = min(1, L_next / L_current), extended to the dead
/// zone: both zero accepts (blind walk out of the region), zero to positive
/// accepts, positive to zero rejects. u is the uniform draw in [0, 1).
inline bool mh_accept(double l_current, double l_next, double u) {
    if (l_next >= l_current) return true;
    return u < l_next / l_current;  // here l_current > 0
}

struct FeasibilityScan {
    double max_likelihood = 0.0;
    DesignVector argmax;
};

/// Latin-hypercube probe of the likelihood surface; the argmax seeds chains
/// whose own initialization fails, and a zero maximum is the all-zero signal.
inline FeasibilityScan feasibility_scan(const Forest& forest, const Requirement& req,
                                        const DesignSpace& space, std::size_t n_probe,
                                        std::uint64_t seed) {
    if (n_probe < 1) throw std::invalid_argument("feasibility_scan: n_probe must be >= 1");
    FeasibilityScan scan;
    auto probes = latin_hypercube(space, n_probe, derive_seed(seed, "feasibility", 0));
    scan.argmax = probes.front();
    for (auto& x : probes) {
        double v = likelihood(forest, x, req).value;
        if (v > scan.max_likelihood) {
            scan.max_likelihood = v;
            scan.argmax = x;
        }
    }
    return scan;
}

namespace detail {

inline DesignVector uniform_design(const DesignSpace& space, SplitMix64& rng) {
    DesignVector x(space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j) {
        const VariableSpec& dim = space.dims[j];
        if (dim.kind == VarKind::Integer) {
            auto span = static_cast<std::uint64_t>(dim.upper - dim.lower);
            x[j] = dim.lower + static_cast<double>(rng.below(span + 1));
        } else {
            x[j] = dim.lower + rng.unit() * (dim.upper - dim.lower);
        }
    }
    return x;
}

}  // namespace detail

/// Metropolis-Hastings over the likelihood surface. Each chain owns the RNG
/// stream derive_seed(cfg.seed, "chain", id), starts from a uniform in-bounds
/// draw re-drawn until its likelihood is positive (falling back to init_hint,
/// usually the feasibility-scan argmax), then emits every thin-th state after
/// burn-in. Chains are independent; results are merged in chain-id order, so
/// the output is identical for any worker count.
inline std::vector<DesignCandidate> mh_sample(const Forest& forest, const Requirement& req,
                                              const SamplerConfig& cfg,
                                              const std::optional<DesignVector>& init_hint = {},
                                              int threads = 1) {
    cfg.validate();
    const DesignSpace& space = forest.space;
    validate_requirement(req, forest.grid);
    if (init_hint) space.require_point(*init_hint);
    const auto sigmas = proposal_sigmas(space, cfg.c0);
    std::vector<std::vector<DesignCandidate>> per_chain(
        static_cast<std::size_t>(cfg.n_chains));
    unsigned workers = resolve_threads(threads);
    parallel_for(per_chain.size(), workers, [&](std::size_t chain) {
        SplitMix64 rng(derive_seed(cfg.seed, "chain", chain));
        DesignVector x;
        LikelihoodResult lx;
        bool started = false;
        for (int attempt = 0; attempt < cfg.max_init_tries && !started; ++attempt) {
            x = detail::uniform_design(space, rng);
            lx = likelihood(forest, x, req);
            started = lx.value > 0.0;
        }
        if (!started) {
            if (init_hint) {
                lx = likelihood(forest, *init_hint, req);
                started = lx.value > 0.0;
                x = *init_hint;
            }
            if (!started)
                throw AllZeroLikelihood(
                    "chain " + std::to_string(chain) + " found no positive likelihood in " +
                    std::to_string(cfg.max_init_tries) + " tries for requirement '" + req.name +
                    "'");
        }
        auto& out = per_chain[chain];
        out.reserve(static_cast<std::size_t>(cfg.n_samples));
        int step = 0;
        while (static_cast<int>(out.size()) < cfg.n_samples) {
            ++step;
            DesignVector xp = propose(x, space, sigmas, rng);
            LikelihoodResult lp = likelihood(forest, xp, req);
            double u = rng.unit();
            if (mh_accept(lx.value, lp.value, u)) {
                x = std::move(xp);
                lx = std::move(lp);
            }
            if (step > cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0)
                out.push_back({x, lx.value, lx.votes, static_cast<int>(chain), step});
        }
    });
    std::vector<DesignCandidate> merged;
    merged.reserve(static_cast<std::size_t>(cfg.n_chains) *
                   static_cast<std::size_t>(cfg.n_samples));
    for (auto& chain : per_chain)
        for (auto& c : chain) merged.push_back(std::move(c));
    return merged;
}

}  // namespace rag
