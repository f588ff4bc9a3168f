#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rag/dataset.hpp"
#include "rag/metrics.hpp"
#include "rag/sampler.hpp"

namespace rag {

/// Shortest representation that parses back to the identical double, so CSV
/// round trips are byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("CSV: not a number: '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("CSV: not an integer: '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

inline std::vector<std::vector<std::string>> read_rows(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw std::runtime_error("empty CSV: " + path);
    return rows;
}

}  // namespace detail

/// Long format: header x_1..x_dx,a_1..a_da,value; one row per (sample, grid
/// point), sample-major then grid-major, matching the flattening order.
inline void write_dataset_csv(const std::string& path, const Dataset& ds) {
    ds.validate();
    auto f = detail::open_out(path);
    const std::size_t dx = ds.space.dim(), da = ds.grid.da();
    for (std::size_t j = 0; j < dx; ++j) f << "x_" << j + 1 << ',';
    for (std::size_t j = 0; j < da; ++j) f << "a_" << j + 1 << ',';
    f << "value\n";
    for (const auto& s : ds.samples)
        for (std::size_t q = 0; q < ds.grid.dy(); ++q) {
            for (std::size_t j = 0; j < dx; ++j) f << format_double(s.x[j]) << ',';
            for (std::size_t j = 0; j < da; ++j) f << format_double(ds.grid.flat[q][j]) << ',';
            f << format_double(s.y[q]) << '\n';
        }
}

/// Reads sample rows into a Dataset whose space/grid/units come from the
/// sidecar descriptor. Accepts the long format (detected by its `value`
/// header) and the wide format (one row per sample, d_y value columns).
inline Dataset read_dataset_csv(const std::string& path, const DesignSpace& space,
                                const QueryGrid& grid, const std::string& units) {
    Dataset ds;
    ds.space = space;
    ds.grid = grid;
    ds.units = units;
    auto rows = detail::read_rows(path);
    const std::size_t dx = space.dim(), da = grid.da(), dy = grid.dy();
    const auto& header = rows.front();
    const bool is_long = header.size() == dx + da + 1 && header.back() == "value";
    if (!is_long && header.size() != dx + dy)
        throw std::runtime_error(path + ": expected " + std::to_string(dx + da + 1) +
                                 " (long) or " + std::to_string(dx + dy) +
                                 " (wide) columns, found " + std::to_string(header.size()));
    const std::size_t n_data = rows.size() - 1;
    if (is_long) {
        if (n_data % dy != 0)
            throw std::runtime_error(path + ": row count is not a multiple of d_y");
        for (std::size_t s = 0; s < n_data / dy; ++s) {
            ResponseSample sample;
            sample.y.resize(dy);
            for (std::size_t q = 0; q < dy; ++q) {
                const auto& row = rows[1 + s * dy + q];
                if (row.size() != dx + da + 1)
                    throw std::runtime_error(path + ": ragged row");
                if (q == 0) {
                    sample.x.resize(dx);
                    for (std::size_t j = 0; j < dx; ++j) sample.x[j] = parse_double(row[j]);
                } else {
                    for (std::size_t j = 0; j < dx; ++j)
                        if (parse_double(row[j]) != sample.x[j])
                            throw std::runtime_error(path +
                                                     ": design changes inside a sample block");
                }
                for (std::size_t j = 0; j < da; ++j) {
                    double a = parse_double(row[dx + j]);
                    double g = grid.flat[q][j];
                    double tol = 1e-9 * std::max(1.0, std::fabs(g));
                    if (std::fabs(a - g) > tol)
                        throw std::runtime_error(path + ": query point differs from the grid");
                }
                sample.y[q] = parse_double(row[dx + da]);
            }
            ds.samples.push_back(std::move(sample));
        }
    } else {
        for (std::size_t s = 1; s < rows.size(); ++s) {
            const auto& row = rows[s];
            if (row.size() != dx + dy) throw std::runtime_error(path + ": ragged row");
            ResponseSample sample;
            sample.x.resize(dx);
            sample.y.resize(dy);
            for (std::size_t j = 0; j < dx; ++j) sample.x[j] = parse_double(row[j]);
            for (std::size_t q = 0; q < dy; ++q) sample.y[q] = parse_double(row[dx + q]);
            ds.samples.push_back(std::move(sample));
        }
    }
    ds.validate();
    return ds;
}

/// Candidates: design columns named after the space dims, then likelihood,
/// chain_id, step_index.
inline void write_candidates_csv(const std::string& path,
                                 const std::vector<DesignCandidate>& candidates,
                                 const DesignSpace& space) {
    auto f = detail::open_out(path);
    for (const auto& dim : space.dims) f << dim.name << ',';
    f << "likelihood,chain_id,step_index\n";
    for (const auto& c : candidates) {
        if (c.design.size() != space.dim())
            throw std::invalid_argument("write_candidates_csv: design dimension mismatch");
        for (double v : c.design) f << format_double(v) << ',';
        f << format_double(c.likelihood) << ',' << c.chain_id << ',' << c.step_index << '\n';
    }
}

/// Votes are not persisted in the CSV, so loaded candidates carry empty vote
/// vectors; evaluation only needs design and likelihood.
inline std::vector<DesignCandidate> read_candidates_csv(const std::string& path,
                                                        const DesignSpace& space) {
    auto rows = detail::read_rows(path);
    const std::size_t dx = space.dim();
    if (rows.front().size() != dx + 3)
        throw std::runtime_error(path + ": expected " + std::to_string(dx + 3) + " columns");
    std::vector<DesignCandidate> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != dx + 3) throw std::runtime_error(path + ": ragged row");
        DesignCandidate c;
        c.design.resize(dx);
        for (std::size_t j = 0; j < dx; ++j) c.design[j] = parse_double(row[j]);
        c.likelihood = parse_double(row[dx]);
        c.chain_id = static_cast<int>(parse_long(row[dx + 1]));
        c.step_index = static_cast<int>(parse_long(row[dx + 2]));
        out.push_back(std::move(c));
    }
    return out;
}

/// Pointwise prediction with the two-sigma band: lo2s/hi2s = mean -/+
/// 2*sqrt(variance).
inline void write_prediction_csv(const std::string& path, const QueryGrid& grid,
                                 const ResponsePrediction& p) {
    if (p.mean.size() != grid.dy() || p.variance.size() != grid.dy())
        throw std::invalid_argument("write_prediction_csv: prediction/grid length mismatch");
    auto f = detail::open_out(path);
    for (std::size_t j = 0; j < grid.da(); ++j) f << "a_" << j + 1 << ',';
    f << "mean,variance,lo2s,hi2s\n";
    for (std::size_t q = 0; q < grid.dy(); ++q) {
        for (std::size_t j = 0; j < grid.da(); ++j) f << format_double(grid.flat[q][j]) << ',';
        double half = 2.0 * std::sqrt(p.variance[q]);
        f << format_double(p.mean[q]) << ',' << format_double(p.variance[q]) << ','
          << format_double(p.mean[q] - half) << ',' << format_double(p.mean[q] + half) << '\n';
    }
}

/// Sweep rows; absent rates (empty selection) stay empty fields, never 0.
inline void write_sweep_csv(const std::string& path, const ThresholdSweep& sw) {
    auto f = detail::open_out(path);
    f << "threshold,selection_rate,satisfaction_rate,overlap_rate\n";
    for (std::size_t i = 0; i < sw.thresholds.size(); ++i) {
        f << format_double(sw.thresholds[i]) << ',' << format_double(sw.selection_rate[i]) << ',';
        if (sw.satisfaction_rate[i]) f << format_double(*sw.satisfaction_rate[i]);
        f << ',';
        if (sw.overlap_rate[i]) f << format_double(*sw.overlap_rate[i]);
        f << '\n';
    }
}

inline void write_likelihood_map_csv(const std::string& path,
                                     const std::vector<std::pair<DesignVector, double>>& map,
                                     const DesignSpace& space) {
    auto f = detail::open_out(path);
    for (const auto& dim : space.dims) f << dim.name << ',';
    f << "likelihood\n";
    for (const auto& [x, value] : map) {
        for (double v : x) f << format_double(v) << ',';
        f << format_double(value) << '\n';
    }
}

}  // namespace rag
