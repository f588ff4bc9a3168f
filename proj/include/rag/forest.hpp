#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rag/dataset.hpp"
#include "rag/design_space.hpp"
#include "rag/parallel.hpp"
#include "rag/query_grid.hpp"
#include "rag/rng.hpp"

namespace rag {

struct ForestParams {
    int n_trees = 100;
    int max_depth = 20;            // <= 0 means unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    int features_per_split = 0;    // 0 means round(sqrt(d_x + d_a))
    bool bootstrap = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_trees < 1) throw std::invalid_argument("ForestParams: n_trees must be >= 1");
        if (min_samples_split < 2)
            throw std::invalid_argument("ForestParams: min_samples_split must be >= 2");
        if (min_samples_leaf < 1)
            throw std::invalid_argument("ForestParams: min_samples_leaf must be >= 1");
        if (features_per_split < 0)
            throw std::invalid_argument("ForestParams: features_per_split must be >= 0");
    }
};

/// Internal nodes carry (feature, threshold); leaves carry value and left < 0.
/// Routing sends feature values <= threshold to the left child.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const double* features) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].left >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = features[n.feature] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }

    double predict(const std::vector<double>& features) const { return predict(features.data()); }
};

/// Identifies the training data a model came from without storing it.
struct TrainingFingerprint {
    std::uint64_t dataset_hash = 0;
    std::size_t pair_count = 0;
};

struct ResponsePrediction {
    std::vector<double> mean;
    std::vector<double> variance;  // population form, denominator = tree count
};

struct Forest {
    ForestParams params;
    DesignSpace space;
    QueryGrid grid;
    TrainingFingerprint fingerprint;
    std::vector<Tree> trees;

    std::size_t n_trees() const { return trees.size(); }

    std::vector<double> assemble_features(const DesignVector& x,
                                          const std::vector<double>& a) const {
        if (x.size() != space.dim()) throw std::invalid_argument("Forest: design dimension mismatch");
        if (a.size() != grid.da()) throw std::invalid_argument("Forest: query dimension mismatch");
        std::vector<double> f(x.size() + a.size());
        std::copy(x.begin(), x.end(), f.begin());
        std::copy(a.begin(), a.end(), f.begin() + static_cast<std::ptrdiff_t>(x.size()));
        return f;
    }

    /// Ensemble mean at one (design, query point) input.
    double predict_point(const DesignVector& x, const std::vector<double>& a) const {
        std::vector<double> f = assemble_features(x, a);
        double sum = 0.0;
        for (const auto& t : trees) sum += t.predict(f.data());
        return sum / static_cast<double>(trees.size());
    }

    /// Full discrete response of every tree, row t in training order.
    std::vector<std::vector<double>> per_tree_response(const DesignVector& x) const {
        if (x.size() != space.dim()) throw std::invalid_argument("Forest: design dimension mismatch");
        const std::size_t dx = space.dim();
        const std::size_t dy = grid.dy();
        std::vector<std::vector<double>> out(trees.size(), std::vector<double>(dy));
        std::vector<double> f(dx + grid.da());
        std::copy(x.begin(), x.end(), f.begin());
        for (std::size_t q = 0; q < dy; ++q) {
            const auto& a = grid.flat[q];
            std::copy(a.begin(), a.end(), f.begin() + static_cast<std::ptrdiff_t>(dx));
            for (std::size_t t = 0; t < trees.size(); ++t) out[t][q] = trees[t].predict(f.data());
        }
        return out;
    }

    /// Pointwise ensemble mean and spread over the whole query grid. The mean
    /// equals the average of per_tree_response rows exactly; the variance uses
    /// the population denominator, so a single tree reports zero spread.
    ResponsePrediction predict_response(const DesignVector& x) const {
        auto rows = per_tree_response(x);
        const std::size_t dy = grid.dy();
        const double n = static_cast<double>(rows.size());
        ResponsePrediction p;
        p.mean.assign(dy, 0.0);
        p.variance.assign(dy, 0.0);
        for (const auto& row : rows)
            for (std::size_t q = 0; q < dy; ++q) p.mean[q] += row[q];
        for (std::size_t q = 0; q < dy; ++q) p.mean[q] /= n;
        for (const auto& row : rows)
            for (std::size_t q = 0; q < dy; ++q) {
                double d = row[q] - p.mean[q];
                p.variance[q] += d * d;
            }
        for (std::size_t q = 0; q < dy; ++q) {
            p.variance[q] /= n;
            if (p.variance[q] < 0.0) p.variance[q] = 0.0;
        }
        return p;
    }
};

namespace detail {

/// Grows one tree over pairs[row_indices]. Split quality is the drop in the
/// sum of squared deviations from the node mean; candidate thresholds sit
/// midway between consecutive distinct sorted values. Ties go to the lowest
/// feature index, then the smallest threshold. Every node draws its feature
/// subset from a seed derived from the root seed and the branch path, so a
/// depth-capped tree agrees with a deeper one down to the cap.
class TreeBuilder {
  public:
    TreeBuilder(const std::vector<TrainingPair>& pairs, const ForestParams& params,
                std::size_t n_features)
        : pairs_(pairs), params_(params), d_(n_features) {
        n_subset_ = params.features_per_split > 0
                        ? static_cast<std::size_t>(params.features_per_split)
                        : static_cast<std::size_t>(
                              std::lround(std::sqrt(static_cast<double>(d_))));
        if (n_subset_ < 1) n_subset_ = 1;
        if (n_subset_ > d_) n_subset_ = d_;
        all_features_.resize(d_);
        for (std::size_t j = 0; j < d_; ++j) all_features_[j] = j;
    }

    Tree build(std::vector<std::size_t> rows, std::uint64_t root_seed) {
        Tree tree;
        rows_ = std::move(rows);
        if (rows_.empty()) throw std::invalid_argument("TreeBuilder: no training rows");
        scratch_.resize(rows_.size());
        struct Pending {
            std::size_t begin, end;
            int depth;
            std::uint64_t seed;
            int slot;  // node index to fill
        };
        std::vector<Pending> stack;
        tree.nodes.emplace_back();
        stack.push_back({0, rows_.size(), 0, root_seed, 0});
        while (!stack.empty()) {
            Pending p = stack.back();
            stack.pop_back();
            grow(tree, p.begin, p.end, p.depth, p.seed, p.slot, stack);
        }
        return tree;
    }

  private:
    struct Split {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double children_sse = 0.0;
    };

    template <typename Stack>
    void grow(Tree& tree, std::size_t begin, std::size_t end, int depth, std::uint64_t seed,
              int slot, Stack& stack) {
        const std::size_t n = end - begin;
        double sum = 0.0, lo = pairs_[rows_[begin]].target, hi = lo;
        for (std::size_t i = begin; i < end; ++i) {
            double t = pairs_[rows_[i]].target;
            sum += t;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
        if (lo == hi || depth_capped || n < static_cast<std::size_t>(params_.min_samples_split) ||
            n < 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
            make_leaf(tree, slot, n, sum, lo, hi);
            return;
        }
        Split best = find_split(begin, end, sum, seed);
        if (!best.found) {
            make_leaf(tree, slot, n, sum, lo, hi);
            return;
        }
        std::size_t mid = partition(begin, end, best.feature, best.threshold);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(slot)];
        node.feature = static_cast<int>(best.feature);
        node.threshold = best.threshold;
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        int left_slot = tree.nodes[static_cast<std::size_t>(slot)].left;
        stack.push_back({mid, end, depth + 1, child_node_seed(seed, true), left_slot + 1});
        stack.push_back({begin, mid, depth + 1, child_node_seed(seed, false), left_slot});
    }

    void make_leaf(Tree& tree, int slot, std::size_t n, double sum, double lo, double hi) {
        TreeNode& node = tree.nodes[static_cast<std::size_t>(slot)];
        node.left = node.right = -1;
        node.value = lo == hi ? lo : sum / static_cast<double>(n);
    }

    Split find_split(std::size_t begin, std::size_t end, double sum, std::uint64_t seed) {
        const std::size_t n = end - begin;
        const std::size_t msl = static_cast<std::size_t>(params_.min_samples_leaf);
        SplitMix64 rng(seed);
        const auto& candidates = sample_features(rng);
        Split best;
        for (std::size_t f : candidates) {
            for (std::size_t i = begin; i < end; ++i) {
                const TrainingPair& p = pairs_[rows_[i]];
                scratch_[i - begin] = {p.features[f], p.target};
            }
            std::sort(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(n),
                      [](const ValueTarget& a, const ValueTarget& b) { return a.value < b.value; });
            double lsum = 0.0, lsum2 = 0.0;
            double tsum2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) tsum2 += scratch_[i].target * scratch_[i].target;
            for (std::size_t i = 1; i < n; ++i) {
                lsum += scratch_[i - 1].target;
                lsum2 += scratch_[i - 1].target * scratch_[i - 1].target;
                if (scratch_[i - 1].value >= scratch_[i].value) continue;
                if (i < msl || n - i < msl) continue;
                double mid = scratch_[i - 1].value +
                             (scratch_[i].value - scratch_[i - 1].value) / 2.0;
                if (!(scratch_[i - 1].value < mid && mid < scratch_[i].value)) continue;
                double nl = static_cast<double>(i), nr = static_cast<double>(n - i);
                double rsum = sum - lsum;
                double left_sse = lsum2 - lsum * lsum / nl;
                double right_sse = (tsum2 - lsum2) - rsum * rsum / nr;
                double children = left_sse + right_sse;
                if (!best.found || children < best.children_sse) {
                    // strict improvement keeps the earliest (lowest feature,
                    // smallest threshold) candidate on ties
                    best.found = true;
                    best.feature = f;
                    best.threshold = mid;
                    best.children_sse = children;
                }
            }
        }
        return best;
    }

    /// Without-replacement draw of the split candidate features, ascending.
    const std::vector<std::size_t>& sample_features(SplitMix64& rng) {
        if (n_subset_ == d_) return all_features_;
        subset_pool_ = all_features_;
        for (std::size_t j = 0; j < n_subset_; ++j) {
            std::size_t k = j + static_cast<std::size_t>(rng.below(subset_pool_.size() - j));
            std::swap(subset_pool_[j], subset_pool_[k]);
        }
        subset_.assign(subset_pool_.begin(),
                       subset_pool_.begin() + static_cast<std::ptrdiff_t>(n_subset_));
        std::sort(subset_.begin(), subset_.end());
        return subset_;
    }

    std::size_t partition(std::size_t begin, std::size_t end, std::size_t feature,
                          double threshold) {
        std::size_t i = begin;
        for (std::size_t j = begin; j < end; ++j) {
            if (pairs_[rows_[j]].features[feature] <= threshold) {
                std::swap(rows_[i], rows_[j]);
                ++i;
            }
        }
        if (i == begin || i == end) throw std::logic_error("TreeBuilder: degenerate partition");
        return i;
    }

    struct ValueTarget {
        double value;
        double target;
    };

    const std::vector<TrainingPair>& pairs_;
    const ForestParams& params_;
    std::size_t d_;
    std::size_t n_subset_;
    std::vector<std::size_t> all_features_;
    std::vector<std::size_t> subset_pool_;
    std::vector<std::size_t> subset_;
    std::vector<std::size_t> rows_;
    std::vector<ValueTarget> scratch_;
};

}  // namespace detail

/// Fits the bagged ensemble on flattened pairs. Each tree resamples the rows
/// with replacement (same count) from its own stream, then grows on the
/// resample; with bootstrap off every tree sees all rows. Tree t is seeded by
/// derive_seed(params.seed, "tree", t), so the forest is reproducible for a
/// fixed seed and any worker count.
inline Forest fit_forest(const std::vector<TrainingPair>& pairs, const ForestParams& params,
                         const DesignSpace& space, const QueryGrid& grid,
                         TrainingFingerprint fingerprint, int threads = 1) {
    params.validate();
    space.validate();
    if (pairs.empty()) throw std::invalid_argument("fit_forest: no training pairs");
    const std::size_t d = space.dim() + grid.da();
    if (params.features_per_split > static_cast<int>(d))
        throw std::invalid_argument("fit_forest: features_per_split exceeds the feature count");
    for (const auto& p : pairs)
        if (p.features.size() != d)
            throw std::invalid_argument("fit_forest: training pair feature width mismatch");
    Forest forest;
    forest.params = params;
    forest.space = space;
    forest.grid = grid;
    forest.fingerprint = fingerprint;
    forest.trees.resize(static_cast<std::size_t>(params.n_trees));
    const std::size_t m = pairs.size();
    unsigned workers = resolve_threads(threads);
    parallel_for(forest.trees.size(), workers, [&](std::size_t t) {
        std::uint64_t tree_seed = derive_seed(params.seed, "tree", t);
        std::vector<std::size_t> rows(m);
        if (params.bootstrap) {
            SplitMix64 boot(derive_seed(tree_seed, "bootstrap", 0));
            for (std::size_t i = 0; i < m; ++i)
                rows[i] = static_cast<std::size_t>(boot.below(m));
        } else {
            for (std::size_t i = 0; i < m; ++i) rows[i] = i;
        }
        detail::TreeBuilder builder(pairs, params, d);
        forest.trees[t] = builder.build(std::move(rows), derive_seed(tree_seed, "root", 0));
    });
    return forest;
}

inline Forest fit_forest(const Dataset& ds, const ForestParams& params, int threads = 1) {
    auto pairs = flatten_pairs(ds);
    TrainingFingerprint fp{ds.content_hash(), pairs.size()};
    return fit_forest(pairs, params, ds.space, ds.grid, fp, threads);
}

}  // namespace rag
