#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rag/dataset.hpp"
#include "rag/design_space.hpp"
#include "rag/forest.hpp"
#include "rag/query_grid.hpp"
#include "rag/requirements.hpp"
#include "rag/rng.hpp"

namespace rag {

using nlohmann::json;

inline json space_to_json(const DesignSpace& space) {
    json dims = json::array();
    for (const auto& d : space.dims)
        dims.push_back({{"name", d.name},
                        {"kind", d.kind == VarKind::Integer ? "integer" : "continuous"},
                        {"lower", d.lower},
                        {"upper", d.upper}});
    return {{"dims", dims}};
}

inline DesignSpace space_from_json(const json& j) {
    DesignSpace space;
    for (const auto& d : j.at("dims")) {
        std::string kind = d.at("kind").get<std::string>();
        if (kind != "continuous" && kind != "integer")
            throw std::runtime_error("design space: unknown variable kind '" + kind + "'");
        space.dims.push_back({d.at("name").get<std::string>(),
                              kind == "integer" ? VarKind::Integer : VarKind::Continuous,
                              d.at("lower").get<double>(), d.at("upper").get<double>()});
    }
    space.validate();
    return space;
}

inline json grid_to_json(const QueryGrid& grid) {
    json axes = json::array();
    for (const auto& ax : grid.axes) axes.push_back({{"name", ax.name}, {"points", ax.points}});
    json j = {{"axes", axes}};
    if (grid.band_axis) j["band_axis"] = *grid.band_axis;
    return j;
}

inline QueryGrid grid_from_json(const json& j) {
    std::vector<GridAxis> axes;
    for (const auto& ax : j.at("axes"))
        axes.push_back(
            {ax.at("name").get<std::string>(), ax.at("points").get<std::vector<double>>()});
    std::optional<std::size_t> band;
    if (j.contains("band_axis")) band = j.at("band_axis").get<std::size_t>();
    return QueryGrid::from_axes(std::move(axes), band);
}

namespace detail {

inline json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
    return j;
}

inline void save_json_file(const std::string& path, const json& j, int indent) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(indent) << '\n';
}

inline void check_header(const json& j, const std::string& path, const std::string& format) {
    if (!j.contains("format") || j.at("format") != format)
        throw std::runtime_error(path + ": not a " + format + " file");
    if (!j.contains("version") || j.at("version") != 1)
        throw std::runtime_error(path + ": unsupported " + format + " version");
}

}  // namespace detail

/// Sidecar descriptor carrying everything the bulk CSV cannot: design space,
/// grid and units.
inline void write_dataset_descriptor(const std::string& path, const Dataset& ds) {
    json j = {{"format", "rag-dataset"},
              {"version", 1},
              {"units", ds.units},
              {"space", space_to_json(ds.space)},
              {"grid", grid_to_json(ds.grid)}};
    detail::save_json_file(path, j, 2);
}

struct DatasetDescriptor {
    DesignSpace space;
    QueryGrid grid;
    std::string units;
};

inline DatasetDescriptor read_dataset_descriptor(const std::string& path) {
    json j = detail::load_json_file(path);
    detail::check_header(j, path, "rag-dataset");
    DatasetDescriptor d{space_from_json(j.at("space")), grid_from_json(j.at("grid")),
                        j.value("units", "")};
    return d;
}

namespace detail {

inline json tree_node_to_json(const Tree& tree, int i) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(i)];
    if (n.left < 0) return {{"value", n.value}};
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", tree_node_to_json(tree, n.left)},
            {"right", tree_node_to_json(tree, n.right)}};
}

inline int tree_node_from_json(const json& j, Tree& tree, std::size_t n_features) {
    int slot = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("value")) {
        tree.nodes[static_cast<std::size_t>(slot)].value = j.at("value").get<double>();
        return slot;
    }
    int feature = j.at("feature").get<int>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features)
        throw std::runtime_error("forest file: node feature index out of range");
    double threshold = j.at("threshold").get<double>();
    int left = tree_node_from_json(j.at("left"), tree, n_features);
    int right = tree_node_from_json(j.at("right"), tree, n_features);
    TreeNode& n = tree.nodes[static_cast<std::size_t>(slot)];
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    return slot;
}

}  // namespace detail

/// Versioned model document: params, space, grid, training fingerprint and
/// the trees as nested records. Compact dump; tree sections dominate.
inline void save_forest(const std::string& path, const Forest& forest) {
    json trees = json::array();
    for (const auto& t : forest.trees) trees.push_back(detail::tree_node_to_json(t, 0));
    json j = {{"format", "rag-forest"},
              {"version", 1},
              {"params",
               {{"n_trees", forest.params.n_trees},
                {"max_depth", forest.params.max_depth},
                {"min_samples_split", forest.params.min_samples_split},
                {"min_samples_leaf", forest.params.min_samples_leaf},
                {"features_per_split", forest.params.features_per_split},
                {"bootstrap", forest.params.bootstrap},
                {"seed", forest.params.seed}}},
              {"space", space_to_json(forest.space)},
              {"grid", grid_to_json(forest.grid)},
              {"fingerprint",
               {{"dataset_hash", forest.fingerprint.dataset_hash},
                {"pair_count", forest.fingerprint.pair_count}}},
              {"trees", std::move(trees)}};
    detail::save_json_file(path, j, -1);
}

inline Forest load_forest(const std::string& path) {
    json j = detail::load_json_file(path);
    detail::check_header(j, path, "rag-forest");
    Forest forest;
    const json& p = j.at("params");
    forest.params.n_trees = p.at("n_trees").get<int>();
    forest.params.max_depth = p.at("max_depth").get<int>();
    forest.params.min_samples_split = p.at("min_samples_split").get<int>();
    forest.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    forest.params.features_per_split = p.at("features_per_split").get<int>();
    forest.params.bootstrap = p.at("bootstrap").get<bool>();
    forest.params.seed = p.at("seed").get<std::uint64_t>();
    forest.params.validate();
    forest.space = space_from_json(j.at("space"));
    forest.grid = grid_from_json(j.at("grid"));
    forest.fingerprint.dataset_hash = j.at("fingerprint").at("dataset_hash").get<std::uint64_t>();
    forest.fingerprint.pair_count = j.at("fingerprint").at("pair_count").get<std::size_t>();
    const std::size_t d = forest.space.dim() + forest.grid.da();
    for (const auto& tj : j.at("trees")) {
        Tree t;
        detail::tree_node_from_json(tj, t, d);
        forest.trees.push_back(std::move(t));
    }
    if (forest.trees.size() != static_cast<std::size_t>(forest.params.n_trees))
        throw std::runtime_error(path + ": tree count disagrees with params.n_trees");
    return forest;
}

inline void save_requirement(const std::string& path, const Requirement& req) {
    json segs = json::array();
    for (const auto& s : req.segments) {
        json seg;
        switch (s.mode) {
            case SegmentMode::Forbid:
            case SegmentMode::Require: {
                seg["mode"] = s.mode == SegmentMode::Forbid ? "forbid" : "require";
                json ranges = json::object();
                for (const auto& r : s.query_range) ranges[r.axis] = {r.lo, r.hi};
                seg["axis_ranges"] = std::move(ranges);
                seg["value_lo"] = s.value_lo;
                seg["value_hi"] = s.value_hi;
                break;
            }
            case SegmentMode::Tolerance:
                seg["mode"] = "tolerance";
                seg["targets"] = s.targets;
                seg["tolerances"] = s.tolerances;
                break;
            case SegmentMode::Characteristic:
                seg["mode"] = "characteristic";
                seg["extractor"] = s.extractor == Extractor::Threshold ? "threshold" : "stroke";
                seg["target"] = s.target;
                seg["rel_tol"] = s.rel_tol;
                break;
        }
        segs.push_back(std::move(seg));
    }
    detail::save_json_file(path, {{"name", req.name}, {"segments", std::move(segs)}}, 2);
}

inline Requirement load_requirement(const std::string& path) {
    json j = detail::load_json_file(path);
    Requirement req;
    req.name = j.at("name").get<std::string>();
    if (!j.contains("segments") || !j.at("segments").is_array() || j.at("segments").empty())
        throw std::runtime_error(path + ": requirement needs a non-empty segments array");
    for (const auto& sj : j.at("segments")) {
        Segment s;
        std::string mode = sj.at("mode").get<std::string>();
        if (mode == "forbid" || mode == "require") {
            s.mode = mode == "forbid" ? SegmentMode::Forbid : SegmentMode::Require;
            if (sj.contains("axis_ranges"))
                for (const auto& [axis, range] : sj.at("axis_ranges").items()) {
                    if (!range.is_array() || range.size() != 2)
                        throw std::runtime_error(path + ": axis_ranges entries are [lo, hi]");
                    s.query_range.push_back(
                        {axis, range[0].get<double>(), range[1].get<double>()});
                }
            s.value_lo = sj.at("value_lo").get<double>();
            s.value_hi = sj.at("value_hi").get<double>();
        } else if (mode == "tolerance") {
            s.mode = SegmentMode::Tolerance;
            s.targets = sj.at("targets").get<std::vector<double>>();
            // json dumps non-finite numbers as null; an unbounded tolerance
            // comes back as infinity rather than failing to parse
            for (const auto& t : sj.at("tolerances"))
                s.tolerances.push_back(t.is_null() ? std::numeric_limits<double>::infinity()
                                                   : t.get<double>());
        } else if (mode == "characteristic") {
            s.mode = SegmentMode::Characteristic;
            std::string ex = sj.at("extractor").get<std::string>();
            if (ex == "threshold")
                s.extractor = Extractor::Threshold;
            else if (ex == "stroke")
                s.extractor = Extractor::Stroke;
            else
                throw std::runtime_error(path + ": unknown extractor '" + ex + "'");
            s.target = sj.at("target").get<double>();
            s.rel_tol = sj.at("rel_tol").get<double>();
        } else {
            throw std::runtime_error(path + ": unknown segment mode '" + mode + "'");
        }
        req.segments.push_back(std::move(s));
    }
    return req;
}

/// Hash of a file's raw bytes, reported as fixed-width hex in manifests.
inline std::string file_hash_hex(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (f.read(buf, sizeof buf) || f.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(f.gcount()), h);
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

/// One manifest per command run: what was invoked, with which inputs and
/// outputs (content-hashed), and how long it took.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    json config = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};

inline void write_manifest(const std::string& path, const RunManifest& m) {
    auto hashed = [](const std::vector<std::string>& paths) {
        json arr = json::array();
        for (const auto& p : paths) arr.push_back({{"path", p}, {"fnv1a64", file_hash_hex(p)}});
        return arr;
    };
    json j = {{"format", "rag-manifest"}, {"version", 1},
              {"command", m.command},     {"seed", m.seed},
              {"config", m.config},       {"inputs", hashed(m.inputs)},
              {"outputs", hashed(m.outputs)}, {"duration_seconds", m.duration_seconds}};
    detail::save_json_file(path, j, 2);
}

}  // namespace rag
