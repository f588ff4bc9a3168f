#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rag/query_grid.hpp"
#include "rag/requirements.hpp"
#include "rag/sampler.hpp"

namespace rag {

/// Mean squared error (1/d_y) * sum (y_i - yhat_i)^2.
inline double mse(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("mse: length mismatch or empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = y[i] - yhat[i];
        s += d * d;
    }
    return s / static_cast<double>(y.size());
}

struct MapeResult {
    double percent = 0.0;
    std::size_t excluded = 0;  // zero-target components skipped
};

/// Mean absolute percentage error over components with nonzero targets.
/// Zero-target components cannot be scored relatively and are excluded with a
/// count; throws when nothing remains.
inline MapeResult mape(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("mape: length mismatch or empty input");
    MapeResult r;
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) {
            ++r.excluded;
            continue;
        }
        s += std::fabs((y[i] - yhat[i]) / y[i]);
        ++n;
    }
    if (n == 0) throw std::invalid_argument("mape: every component has a zero target");
    r.percent = 100.0 * s / static_cast<double>(n);
    return r;
}

struct DatasetErrors {
    double mse = 0.0;
    double mape_percent = 0.0;
    std::size_t mape_excluded = 0;
};

/// Pooled prediction error of a forest over a whole dataset, averaging across
/// every (sample, grid point) rather than per curve.
inline DatasetErrors dataset_errors(const Forest& forest, const Dataset& ds) {
    if (ds.samples.empty()) throw std::invalid_argument("dataset_errors: empty dataset");
    std::vector<double> truth, pred;
    truth.reserve(ds.size() * ds.grid.dy());
    pred.reserve(ds.size() * ds.grid.dy());
    for (const auto& s : ds.samples) {
        auto p = forest.predict_response(s.x);
        truth.insert(truth.end(), s.y.begin(), s.y.end());
        pred.insert(pred.end(), p.mean.begin(), p.mean.end());
    }
    DatasetErrors e;
    e.mse = mse(truth, pred);
    MapeResult m = mape(truth, pred);
    e.mape_percent = m.percent;
    e.mape_excluded = m.excluded;
    return e;
}

using TruthFn = std::function<std::vector<double>(const DesignVector&)>;

struct CandidateEvaluation {
    std::vector<std::uint8_t> satisfied;  // per candidate, by true response
    std::vector<double> overlap;          // per candidate
    double satisfaction_rate = 0.0;
    double mean_overlap = 0.0;
};

/// Scores candidates against ground truth: the truth function supplies each
/// design's real response on the grid. mean_overlap >= satisfaction_rate by
/// construction (overlap is 1 whenever satisfied).
inline CandidateEvaluation evaluate_candidates(const std::vector<DesignCandidate>& candidates,
                                               const TruthFn& truth, const QueryGrid& grid,
                                               const Requirement& req) {
    if (candidates.empty()) throw std::invalid_argument("evaluate_candidates: no candidates");
    CandidateEvaluation ev;
    ev.satisfied.reserve(candidates.size());
    ev.overlap.reserve(candidates.size());
    for (const auto& c : candidates) {
        std::vector<double> y = truth(c.design);
        if (y.size() != grid.dy())
            throw std::invalid_argument("evaluate_candidates: truth response length mismatch");
        bool ok = is_satisfied(req, y, grid);
        ev.satisfied.push_back(ok ? 1 : 0);
        ev.overlap.push_back(overlap_rate(req, y, grid));
        ev.satisfaction_rate += ok;
        ev.mean_overlap += ev.overlap.back();
    }
    ev.satisfaction_rate /= static_cast<double>(candidates.size());
    ev.mean_overlap /= static_cast<double>(candidates.size());
    if (ev.mean_overlap < ev.satisfaction_rate - 1e-12)
        throw std::logic_error("evaluate_candidates: overlap fell below satisfaction");
    return ev;
}

struct ThresholdSweep {
    std::vector<double> thresholds;
    std::vector<double> selection_rate;
    // absent (not 0) when no candidate clears the threshold
    std::vector<std::optional<double>> satisfaction_rate;
    std::vector<std::optional<double>> overlap_rate;
};

/// Filtering statistics at each likelihood threshold: how many candidates
/// survive, and how good the survivors are by ground truth.
inline ThresholdSweep threshold_sweep(const std::vector<double>& likelihoods,
                                      const std::vector<std::uint8_t>& satisfied,
                                      const std::vector<double>& overlap,
                                      std::vector<double> thresholds) {
    if (likelihoods.size() != satisfied.size() || likelihoods.size() != overlap.size() ||
        likelihoods.empty())
        throw std::invalid_argument("threshold_sweep: per-candidate vectors disagree");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw std::invalid_argument("threshold_sweep: thresholds must be sorted ascending");
    ThresholdSweep sw;
    sw.thresholds = std::move(thresholds);
    for (double t : sw.thresholds) {
        std::size_t sel = 0, sat = 0;
        double ov = 0.0;
        for (std::size_t i = 0; i < likelihoods.size(); ++i) {
            if (likelihoods[i] < t) continue;
            ++sel;
            sat += satisfied[i];
            ov += overlap[i];
        }
        sw.selection_rate.push_back(static_cast<double>(sel) /
                                    static_cast<double>(likelihoods.size()));
        if (sel == 0) {
            sw.satisfaction_rate.emplace_back(std::nullopt);
            sw.overlap_rate.emplace_back(std::nullopt);
        } else {
            sw.satisfaction_rate.emplace_back(static_cast<double>(sat) /
                                              static_cast<double>(sel));
            sw.overlap_rate.emplace_back(ov / static_cast<double>(sel));
        }
    }
    return sw;
}

/// Spearman rank correlation with average ranks on ties; defined as 0 when
/// either sequence is constant (no ordering information).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: needs two equal-length sequences");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    auto ra = ranks(a), rb = ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0.0 || db == 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

}  // namespace rag
