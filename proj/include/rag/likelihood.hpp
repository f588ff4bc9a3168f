#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rag/design_space.hpp"
#include "rag/forest.hpp"
#include "rag/requirements.hpp"

namespace rag {

struct LikelihoodResult {
    double value = 0.0;              // exact multiple of 1/N
    std::vector<std::uint8_t> votes; // vote of tree n, in training order

    std::size_t count() const {
        std::size_t c = 0;
        for (auto v : votes) c += v;
        return c;
    }
};

/// Requirement-conditioned likelihood: the fraction of trees whose own full
/// discrete response satisfies the requirement. Pure and deterministic for a
/// fixed forest.
inline LikelihoodResult likelihood(const Forest& forest, const DesignVector& x,
                                   const Requirement& req) {
    auto rows = forest.per_tree_response(x);
    LikelihoodResult r;
    r.votes.resize(rows.size());
    std::size_t c = 0;
    for (std::size_t n = 0; n < rows.size(); ++n) {
        bool ok = is_satisfied(req, rows[n], forest.grid);
        r.votes[n] = ok ? 1 : 0;
        c += ok;
    }
    r.value = static_cast<double>(c) / static_cast<double>(rows.size());
    return r;
}

/// Element-wise likelihood over a probe set; output order matches input order.
inline std::vector<std::pair<DesignVector, double>> likelihood_map(
    const Forest& forest, const Requirement& req, const std::vector<DesignVector>& probes) {
    std::vector<std::pair<DesignVector, double>> out;
    out.reserve(probes.size());
    for (const auto& x : probes) out.emplace_back(x, likelihood(forest, x, req).value);
    return out;
}

}  // namespace rag
