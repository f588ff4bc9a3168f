#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rag {

struct GridAxis {
    std::string name;
    std::vector<double> points;  // strictly increasing
};

/// Discretization of the query domain: a tensor grid of query points.
/// The flat enumeration is row-major over the axes (last axis fastest) and
/// fixes the canonical component order of every discrete response.
struct QueryGrid {
    std::vector<GridAxis> axes;
    std::optional<std::size_t> band_axis;       // multiplicity axis (e.g. band index)
    std::vector<std::vector<double>> flat;      // materialized query points, row-major

    std::size_t da() const { return axes.size(); }
    std::size_t dy() const { return flat.size(); }

    static QueryGrid from_axes(std::vector<GridAxis> axes,
                               std::optional<std::size_t> band_axis = std::nullopt) {
        QueryGrid g;
        g.axes = std::move(axes);
        g.band_axis = band_axis;
        if (g.axes.empty()) throw std::invalid_argument("QueryGrid: needs at least one axis");
        if (band_axis && *band_axis >= g.axes.size())
            throw std::invalid_argument("QueryGrid: band_axis out of range");
        std::size_t dy = 1;
        for (const auto& ax : g.axes) {
            if (ax.points.empty())
                throw std::invalid_argument("QueryGrid: axis '" + ax.name + "' has no points");
            for (std::size_t i = 1; i < ax.points.size(); ++i)
                if (!(ax.points[i - 1] < ax.points[i]))
                    throw std::invalid_argument("QueryGrid: axis '" + ax.name +
                                                "' points must be strictly increasing");
            dy *= ax.points.size();
        }
        g.flat.reserve(dy);
        std::vector<std::size_t> idx(g.axes.size(), 0);
        for (std::size_t q = 0; q < dy; ++q) {
            std::vector<double> pt(g.axes.size());
            for (std::size_t j = 0; j < g.axes.size(); ++j) pt[j] = g.axes[j].points[idx[j]];
            g.flat.push_back(std::move(pt));
            for (std::size_t j = g.axes.size(); j-- > 0;) {
                if (++idx[j] < g.axes[j].points.size()) break;
                idx[j] = 0;
            }
        }
        return g;
    }

    /// Stride of axis j in the flat enumeration.
    std::size_t stride(std::size_t j) const {
        std::size_t s = 1;
        for (std::size_t k = axes.size(); k-- > j + 1;) s *= axes[k].points.size();
        return s;
    }

    std::size_t flat_index(const std::vector<std::size_t>& multi) const {
        std::size_t q = 0;
        for (std::size_t j = 0; j < axes.size(); ++j) q = q * axes[j].points.size() + multi[j];
        return q;
    }

    std::vector<std::size_t> multi_index(std::size_t q) const {
        std::vector<std::size_t> multi(axes.size());
        for (std::size_t j = axes.size(); j-- > 0;) {
            multi[j] = q % axes[j].points.size();
            q /= axes[j].points.size();
        }
        return multi;
    }

    std::optional<std::size_t> axis_index(const std::string& name) const {
        for (std::size_t j = 0; j < axes.size(); ++j)
            if (axes[j].name == name) return j;
        return std::nullopt;
    }
};

/// n_j equidistant points per axis including both endpoints; a single-point
/// axis holds the lower bound.
inline QueryGrid uniform_grid(const std::vector<std::pair<double, double>>& axis_bounds,
                              const std::vector<int>& counts,
                              std::optional<std::size_t> band_axis = std::nullopt,
                              const std::vector<std::string>& names = {}) {
    if (axis_bounds.size() != counts.size())
        throw std::invalid_argument("uniform_grid: bounds/counts size mismatch");
    if (axis_bounds.empty()) throw std::invalid_argument("uniform_grid: needs at least one axis");
    std::vector<GridAxis> axes;
    for (std::size_t j = 0; j < axis_bounds.size(); ++j) {
        auto [lo, hi] = axis_bounds[j];
        int n = counts[j];
        if (n < 1) throw std::invalid_argument("uniform_grid: non-positive point count");
        if (n > 1 && !(lo < hi)) throw std::invalid_argument("uniform_grid: inverted axis bounds");
        GridAxis ax;
        ax.name = j < names.size() ? names[j] : "a" + std::to_string(j + 1);
        ax.points.resize(static_cast<std::size_t>(n));
        if (n == 1) {
            ax.points[0] = lo;
        } else {
            for (int i = 0; i < n; ++i)
                ax.points[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
            ax.points.back() = hi;  // exact endpoint
        }
        axes.push_back(std::move(ax));
    }
    return QueryGrid::from_axes(std::move(axes), band_axis);
}

}  // namespace rag
