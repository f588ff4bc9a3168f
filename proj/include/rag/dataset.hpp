#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rag/design_space.hpp"
#include "rag/query_grid.hpp"
#include "rag/rng.hpp"

namespace rag {

/// One simulated design and its discrete response over the query grid.
struct ResponseSample {
    DesignVector x;
    std::vector<double> y;  // grid order, length grid.dy()
};

struct Dataset {
    DesignSpace space;
    QueryGrid grid;
    std::vector<ResponseSample> samples;
    std::string units;  // free-form label carried through file round trips

    std::size_t size() const { return samples.size(); }

    void validate() const {
        space.validate();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (s.x.size() != space.dim())
                throw std::invalid_argument("Dataset: sample " + std::to_string(i) +
                                            " design dimension mismatch");
            if (s.y.size() != grid.dy())
                throw std::invalid_argument("Dataset: sample " + std::to_string(i) +
                                            " response length mismatch");
            for (double v : s.y)
                if (!std::isfinite(v))
                    throw std::invalid_argument("Dataset: sample " + std::to_string(i) +
                                                " has a non-finite response value");
        }
    }

    /// Order-sensitive content hash used to fingerprint what a model was fit on.
    std::uint64_t content_hash() const {
        Fnv1aStream h;
        h.add(static_cast<std::uint64_t>(samples.size()));
        h.add(static_cast<std::uint64_t>(space.dim()));
        h.add(static_cast<std::uint64_t>(grid.dy()));
        for (const auto& s : samples) {
            for (double v : s.x) h.add(v);
            for (double v : s.y) h.add(v);
        }
        return h.digest();
    }
};

/// One flattened training row: design features, query-point features, scalar target.
struct TrainingPair {
    std::vector<double> features;  // x followed by a, length d_x + d_a
    double target = 0.0;
};

/// Flattens samples into pointwise rows, sample-major then grid-major, so row
/// i*dy+q pairs design i with grid point q.
inline std::vector<TrainingPair> flatten_pairs(const Dataset& ds) {
    ds.validate();
    const std::size_t dx = ds.space.dim();
    const std::size_t da = ds.grid.da();
    const std::size_t dy = ds.grid.dy();
    std::vector<TrainingPair> pairs;
    pairs.reserve(ds.samples.size() * dy);
    for (const auto& s : ds.samples) {
        for (std::size_t q = 0; q < dy; ++q) {
            TrainingPair p;
            p.features.resize(dx + da);
            for (std::size_t j = 0; j < dx; ++j) p.features[j] = s.x[j];
            for (std::size_t j = 0; j < da; ++j) p.features[dx + j] = ds.grid.flat[q][j];
            p.target = s.y[q];
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

}  // namespace rag
