#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rag/query_grid.hpp"

namespace rag {

/// forbid: no grid point in range may have a value strictly inside (lo, hi).
/// require: every in-range group needs at least one value inside [lo, hi].
/// tolerance: |y_i - target_i| <= delta_i for all grid points.
/// characteristic: an extracted scalar must hit a target within rel_tol.
enum class SegmentMode { Forbid, Require, Tolerance, Characteristic };

enum class Extractor { Threshold, Stroke };

/// Closed coordinate window on one named grid axis.
struct AxisRange {
    std::string axis;
    double lo = 0.0;
    double hi = 0.0;
};

struct Segment {
    SegmentMode mode = SegmentMode::Forbid;

    // forbid / require
    std::vector<AxisRange> query_range;  // unnamed axes are unconstrained
    double value_lo = 0.0;
    double value_hi = 0.0;

    // tolerance
    std::vector<double> targets;
    std::vector<double> tolerances;

    // characteristic
    Extractor extractor = Extractor::Threshold;
    double target = 0.0;
    double rel_tol = 0.0;
};

/// Conjunction of segments: a response is desired iff every segment holds.
struct Requirement {
    std::string name;
    std::vector<Segment> segments;
};

/// Value at the first interior local maximum (y_{q-1} < y_q >= y_{q+1},
/// scanning left to right); nullopt when the curve has none (no snap-through).
inline std::optional<double> extract_threshold(const std::vector<double>& y,
                                               const QueryGrid& grid) {
    if (grid.da() != 1)
        throw std::invalid_argument("extract_threshold: expects a single-axis grid");
    if (y.size() != grid.dy())
        throw std::invalid_argument("extract_threshold: response/grid length mismatch");
    if (y.size() < 3) throw std::invalid_argument("extract_threshold: grid too short");
    for (std::size_t q = 1; q + 1 < y.size(); ++q)
        if (y[q - 1] < y[q] && y[q] >= y[q + 1]) return y[q];
    return std::nullopt;
}

/// Coordinate distance from the local maximum to where the curve, after
/// dipping below the peak value, climbs back to it; the re-crossing is
/// interpolated linearly between the bracketing grid points. nullopt when
/// there is no peak, no dip, or no recovery inside the grid.
inline std::optional<double> extract_stroke(const std::vector<double>& y, const QueryGrid& grid) {
    if (grid.da() != 1) throw std::invalid_argument("extract_stroke: expects a single-axis grid");
    if (y.size() != grid.dy())
        throw std::invalid_argument("extract_stroke: response/grid length mismatch");
    if (y.size() < 3) throw std::invalid_argument("extract_stroke: grid too short");
    std::size_t peak = 0;
    bool found = false;
    for (std::size_t q = 1; q + 1 < y.size(); ++q)
        if (y[q - 1] < y[q] && y[q] >= y[q + 1]) {
            peak = q;
            found = true;
            break;
        }
    if (!found) return std::nullopt;
    const double tau = y[peak];
    std::size_t dip = peak + 1;
    while (dip < y.size() && y[dip] >= tau) ++dip;
    if (dip == y.size()) return std::nullopt;
    std::size_t rise = dip + 1;
    while (rise < y.size() && y[rise] < tau) ++rise;
    if (rise == y.size()) return std::nullopt;
    const auto& e = grid.axes[0].points;
    // y[rise-1] < tau <= y[rise], so the denominator is positive
    double cross = e[rise - 1] + (tau - y[rise - 1]) * (e[rise] - e[rise - 1]) /
                                     (y[rise] - y[rise - 1]);
    return cross - e[peak];
}

namespace detail {

/// Per-axis value window resolved from axis names to axis indices.
inline std::vector<std::optional<std::pair<double, double>>> resolve_ranges(
    const Segment& seg, const QueryGrid& grid) {
    std::vector<std::optional<std::pair<double, double>>> out(grid.da());
    for (const auto& r : seg.query_range) {
        auto j = grid.axis_index(r.axis);
        if (!j)
            throw std::invalid_argument("Segment: query_range names unknown axis '" + r.axis +
                                        "'");
        if (!(r.lo <= r.hi))
            throw std::invalid_argument("Segment: inverted query_range on axis '" + r.axis + "'");
        out[*j] = {r.lo, r.hi};
    }
    return out;
}

/// Counts (groups holding, groups present) for a forbid/require segment. A
/// group is the set of in-range grid points sharing all non-band coordinates;
/// without a band axis the whole range is one group.
inline std::pair<std::size_t, std::size_t> group_counts(const Segment& seg, const QueryGrid& grid,
                                                        const std::vector<double>& y) {
    auto ranges = resolve_ranges(seg, grid);
    if (!(seg.value_lo < seg.value_hi))
        throw std::invalid_argument("Segment: value_range must satisfy lo < hi");
    const std::size_t dy = grid.dy();
    std::size_t band_stride = 1, band_count = 1;
    bool banded = grid.band_axis.has_value();
    if (banded) {
        band_stride = grid.stride(*grid.band_axis);
        band_count = grid.axes[*grid.band_axis].points.size();
    }
    std::vector<unsigned char> seen(dy, 0), hit(dy, 0);
    for (std::size_t q = 0; q < dy; ++q) {
        bool in = true;
        for (std::size_t j = 0; j < ranges.size() && in; ++j)
            if (ranges[j]) {
                double c = grid.flat[q][j];
                in = ranges[j]->first <= c && c <= ranges[j]->second;
            }
        if (!in) continue;
        std::size_t g = banded ? q - ((q / band_stride) % band_count) * band_stride : 0;
        seen[g] = 1;
        double v = y[q];
        if (seg.mode == SegmentMode::Require) {
            if (seg.value_lo <= v && v <= seg.value_hi) hit[g] = 1;
        } else {
            if (seg.value_lo < v && v < seg.value_hi) hit[g] = 1;  // a violation for forbid
        }
    }
    std::size_t total = 0, holding = 0;
    for (std::size_t g = 0; g < dy; ++g) {
        if (!seen[g]) continue;
        ++total;
        bool ok = seg.mode == SegmentMode::Require ? hit[g] != 0 : hit[g] == 0;
        if (ok) ++holding;
    }
    if (total == 0)
        throw std::invalid_argument("Segment: query_range misses every grid point");
    return {holding, total};
}

inline bool segment_satisfied(const Segment& seg, const std::vector<double>& y,
                              const QueryGrid& grid) {
    switch (seg.mode) {
        case SegmentMode::Forbid:
        case SegmentMode::Require: {
            auto [holding, total] = group_counts(seg, grid, y);
            return holding == total;
        }
        case SegmentMode::Tolerance: {
            if (seg.targets.size() != grid.dy() || seg.tolerances.size() != grid.dy())
                throw std::invalid_argument("Segment: tolerance vectors must have length d_y");
            for (std::size_t q = 0; q < y.size(); ++q) {
                if (seg.tolerances[q] < 0.0)
                    throw std::invalid_argument("Segment: negative tolerance");
                double dev = y[q] - seg.targets[q];
                if (!(std::fabs(dev) <= seg.tolerances[q])) return false;
            }
            return true;
        }
        case SegmentMode::Characteristic: {
            if (!(seg.rel_tol > 0.0 && seg.rel_tol <= 1.0))
                throw std::invalid_argument("Segment: rel_tol must lie in (0, 1]");
            std::optional<double> e = seg.extractor == Extractor::Threshold
                                          ? extract_threshold(y, grid)
                                          : extract_stroke(y, grid);
            if (!e) return false;
            return std::fabs(*e - seg.target) <= seg.rel_tol * std::fabs(seg.target);
        }
    }
    throw std::logic_error("Segment: unknown mode");
}

}  // namespace detail

/// Membership test for the desired set: true iff y meets every segment.
inline bool is_satisfied(const Requirement& req, const std::vector<double>& y,
                         const QueryGrid& grid) {
    if (req.segments.empty()) throw std::invalid_argument("Requirement: no segments");
    if (y.size() != grid.dy())
        throw std::invalid_argument("is_satisfied: response/grid length mismatch");
    for (const auto& seg : req.segments)
        if (!detail::segment_satisfied(seg, y, grid)) return false;
    return true;
}

/// Partial-credit score: per forbid/require segment the fraction of in-range
/// groups whose local condition holds; tolerance/characteristic segments score
/// 1 or 0; the rate is the mean over segments. Equals 1 exactly when every
/// segment is satisfied, so it upper-bounds the satisfaction indicator.
inline double overlap_rate(const Requirement& req, const std::vector<double>& y,
                           const QueryGrid& grid) {
    if (req.segments.empty()) throw std::invalid_argument("Requirement: no segments");
    if (y.size() != grid.dy())
        throw std::invalid_argument("overlap_rate: response/grid length mismatch");
    double sum = 0.0;
    for (const auto& seg : req.segments) {
        if (seg.mode == SegmentMode::Forbid || seg.mode == SegmentMode::Require) {
            auto [holding, total] = detail::group_counts(seg, grid, y);
            sum += static_cast<double>(holding) / static_cast<double>(total);
        } else {
            sum += detail::segment_satisfied(seg, y, grid) ? 1.0 : 0.0;
        }
    }
    return sum / static_cast<double>(req.segments.size());
}

/// Up-front structural validation so file-loaded requirements fail fast
/// instead of erroring mid-run. Uses a zero response as a probe; value checks
/// never depend on y.
inline void validate_requirement(const Requirement& req, const QueryGrid& grid) {
    if (req.segments.empty()) throw std::invalid_argument("Requirement: no segments");
    std::vector<double> zeros(grid.dy(), 0.0);
    for (const auto& seg : req.segments) (void)detail::segment_satisfied(seg, zeros, grid);
}

}  // namespace rag
