// Command-line surface: generate oracle datasets, fit forests, predict with
// uncertainty, map likelihoods, sample design candidates, and evaluate them
// against the analytic ground truth. Every command leaves a manifest with
// hashed inputs/outputs so runs are auditable and reproducible.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rag/rag.hpp"

namespace {

using namespace rag;
using clk = std::chrono::steady_clock;

constexpr int kExitInputError = 2;
constexpr int kExitAllZero = 3;

/// Replaces the final extension with a suffix: out/model.json -> out/model + suffix.
std::string stem_plus(const std::string& path, const std::string& suffix) {
    auto slash = path.find_last_of("/\\");
    auto dot = path.find_last_of('.');
    bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? path.substr(0, dot) : path) + suffix;
}

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& field : split_csv_line(text)) out.push_back(parse_double(field));
    return out;
}

Dataset load_dataset(const std::string& csv_path, std::string descriptor_path) {
    if (descriptor_path.empty()) descriptor_path = stem_plus(csv_path, ".descriptor.json");
    auto desc = read_dataset_descriptor(descriptor_path);
    return read_dataset_csv(csv_path, desc.space, desc.grid, desc.units);
}

TruthFn make_truth(const std::string& oracle, const DesignSpace& space, const QueryGrid& grid) {
    if (space.dim() != 3)
        throw std::runtime_error("oracle '" + oracle + "' expects a 3-dimensional design space");
    if (oracle == "diatomic")
        return [grid](const DesignVector& x) {
            return diatomic_response(DiatomicDesign{x[0], x[1], x[2]}, grid);
        };
    if (oracle == "snap")
        return [grid](const DesignVector& x) {
            return snap_response(SnapDesign{x[0], x[1], x[2]}, grid);
        };
    throw std::runtime_error("unknown oracle '" + oracle + "'");
}

struct GenDataArgs {
    std::string oracle;
    int n = 500;
    int nk = 61;
    int neps = 31;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_data(const GenDataArgs& a) {
    auto t0 = clk::now();
    Dataset ds = a.oracle == "diatomic"
                     ? make_diatomic_dataset(static_cast<std::size_t>(a.n), a.seed,
                                             diatomic_space(), diatomic_grid(a.nk))
                     : make_snap_dataset(static_cast<std::size_t>(a.n), a.seed, snap_space(),
                                         snap_grid(a.neps));
    std::string descriptor = stem_plus(a.out, ".descriptor.json");
    write_dataset_csv(a.out, ds);
    write_dataset_descriptor(descriptor, ds);
    RunManifest m;
    m.command = "gen-data";
    m.seed = a.seed;
    m.config = {{"oracle", a.oracle}, {"n", a.n}, {"nk", a.nk}, {"neps", a.neps}};
    m.outputs = {a.out, descriptor};
    m.duration_seconds = seconds_since(t0);
    write_manifest(stem_plus(a.out, ".manifest.json"), m);
    std::cout << "wrote " << ds.size() << " samples x " << ds.grid.dy() << " grid points to "
              << a.out << "\n";
    return 0;
}

struct TrainArgs {
    std::string data;
    std::string descriptor;
    ForestParams params;
    double test_split = 0.0;
    int threads = 0;
    std::string out;
};

int cmd_train(const TrainArgs& a) {
    auto t0 = clk::now();
    Dataset full = load_dataset(a.data, a.descriptor);
    if (a.test_split < 0.0 || a.test_split >= 1.0)
        throw std::runtime_error("--test-split must lie in [0, 1)");

    // deterministic sample-level split driven by the command seed
    Dataset train = full, test;
    test.space = full.space;
    test.grid = full.grid;
    test.units = full.units;
    if (a.test_split > 0.0) {
        std::vector<std::size_t> order(full.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        SplitMix64 rng(derive_seed(a.params.seed, "test-split", 0));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
        auto n_test = static_cast<std::size_t>(
            std::lround(a.test_split * static_cast<double>(full.size())));
        if (n_test >= full.size()) n_test = full.size() - 1;
        train.samples.clear();
        for (std::size_t i = 0; i < order.size(); ++i)
            (i < n_test ? test : train).samples.push_back(full.samples[order[i]]);
    }

    Forest forest = fit_forest(train, a.params, a.threads);
    save_forest(a.out, forest);

    json metrics;
    DatasetErrors tr = dataset_errors(forest, train);
    metrics["train"] = {{"mse", tr.mse},
                        {"mape_percent", tr.mape_percent},
                        {"mape_excluded", tr.mape_excluded},
                        {"samples", train.size()}};
    std::cout << "train: mse=" << format_double(tr.mse)
              << " mape=" << format_double(tr.mape_percent) << "% ("
              << tr.mape_excluded << " zero-target points excluded)\n";
    std::string metrics_path;
    if (!test.samples.empty()) {
        DatasetErrors te = dataset_errors(forest, test);
        metrics["test"] = {{"mse", te.mse},
                           {"mape_percent", te.mape_percent},
                           {"mape_excluded", te.mape_excluded},
                           {"samples", test.size()}};
        std::cout << "test:  mse=" << format_double(te.mse)
                  << " mape=" << format_double(te.mape_percent) << "% ("
                  << te.mape_excluded << " zero-target points excluded)\n";
    }
    metrics_path = stem_plus(a.out, ".metrics.json");
    rag::detail::save_json_file(metrics_path, metrics, 2);

    RunManifest m;
    m.command = "train";
    m.seed = a.params.seed;
    m.config = {{"trees", a.params.n_trees},
                {"max_depth", a.params.max_depth},
                {"min_samples_split", a.params.min_samples_split},
                {"min_samples_leaf", a.params.min_samples_leaf},
                {"features_per_split", a.params.features_per_split},
                {"bootstrap", a.params.bootstrap},
                {"test_split", a.test_split},
                {"threads", a.threads}};
    m.inputs = {a.data};
    m.outputs = {a.out, metrics_path};
    m.duration_seconds = seconds_since(t0);
    write_manifest(stem_plus(a.out, ".manifest.json"), m);
    return 0;
}

struct PredictArgs {
    std::string model;
    std::string design_text;
    std::string design_file;
    bool allow_oob = false;
    bool per_band = false;
    std::string out;
};

int cmd_predict(const PredictArgs& a) {
    auto t0 = clk::now();
    Forest forest = load_forest(a.model);
    DesignVector x;
    if (!a.design_text.empty()) {
        x = parse_number_list(a.design_text);
    } else {
        auto rows = rag::detail::read_rows(a.design_file);
        x.clear();
        for (const auto& field : rows.front()) x.push_back(parse_double(field));
    }
    forest.space.require_point(x);
    if (!forest.space.contains(x)) {
        if (!a.allow_oob)
            throw std::runtime_error(
                "design lies outside the model's design space (use --allow-oob to override)");
        std::cerr << "warning: design is out of bounds; trees extrapolate by leaf routing\n";
    }
    ResponsePrediction p = forest.predict_response(x);
    write_prediction_csv(a.out, forest.grid, p);

    RunManifest m;
    m.command = "predict";
    m.seed = 0;
    m.config = {{"allow_oob", a.allow_oob}, {"per_band_uncertainty", a.per_band}, {"design", x}};
    m.inputs = {a.model};
    m.outputs = {a.out};

    if (a.per_band) {
        if (!forest.grid.band_axis)
            throw std::runtime_error("--per-band-uncertainty needs a grid with a band axis");
        const auto& grid = forest.grid;
        std::size_t band_ax = *grid.band_axis;
        std::size_t stride = grid.stride(band_ax);
        std::size_t count = grid.axes[band_ax].points.size();
        std::string bands_path = stem_plus(a.out, ".bands.csv");
        auto f = rag::detail::open_out(bands_path);
        f << "band,mean_two_sigma\n";
        for (std::size_t b = 0; b < count; ++b) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t q = 0; q < grid.dy(); ++q)
                if ((q / stride) % count == b) {
                    sum += 2.0 * std::sqrt(p.variance[q]);
                    ++n;
                }
            f << format_double(grid.axes[band_ax].points[b]) << ','
              << format_double(sum / static_cast<double>(n)) << '\n';
        }
        m.outputs.push_back(bands_path);
    }
    m.duration_seconds = seconds_since(t0);
    write_manifest(stem_plus(a.out, ".manifest.json"), m);
    return 0;
}

struct DesignArgs {
    std::string model;
    std::string requirement;
    int n = 30;
    SamplerConfig cfg;
    int probes = 200;
    int threads = 0;
    std::string out;
};

int cmd_design(const DesignArgs& a) {
    auto t0 = clk::now();
    Forest forest = load_forest(a.model);
    Requirement req = load_requirement(a.requirement);
    validate_requirement(req, forest.grid);
    if (a.n < 1) throw std::runtime_error("--n must be >= 1");

    FeasibilityScan scan = feasibility_scan(forest, req, forest.space,
                                            static_cast<std::size_t>(a.probes), a.cfg.seed);
    if (scan.max_likelihood == 0.0) {
        // give the chains their own chance before declaring the requirement dead
        std::cerr << "feasibility scan: all " << a.probes << " probes at zero likelihood\n";
    }
    SamplerConfig cfg = a.cfg;
    cfg.n_samples = (a.n + cfg.n_chains - 1) / cfg.n_chains;
    std::optional<DesignVector> hint;
    if (scan.max_likelihood > 0.0) hint = scan.argmax;
    auto candidates = mh_sample(forest, req, cfg, hint, a.threads);
    candidates.resize(static_cast<std::size_t>(a.n));  // per-chain rounding overshoot
    write_candidates_csv(a.out, candidates, forest.space);

    RunManifest m;
    m.command = "design";
    m.seed = cfg.seed;
    m.config = {{"n", a.n},           {"c0", cfg.c0},
                {"burn_in", cfg.burn_in}, {"thin", cfg.thin},
                {"chains", cfg.n_chains}, {"max_init_tries", cfg.max_init_tries},
                {"probes", a.probes},     {"threads", a.threads},
                {"requirement", req.name}};
    m.inputs = {a.model, a.requirement};
    m.outputs = {a.out};
    m.duration_seconds = seconds_since(t0);
    write_manifest(stem_plus(a.out, ".manifest.json"), m);
    std::cout << "wrote " << candidates.size() << " candidates to " << a.out
              << " (scan max likelihood " << format_double(scan.max_likelihood) << ")\n";
    return 0;
}

struct EvaluateArgs {
    std::string candidates;
    std::string model;
    std::string requirement;
    std::string oracle;
    std::string thresholds_text;
    std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    auto t0 = clk::now();
    Forest forest = load_forest(a.model);
    Requirement req = load_requirement(a.requirement);
    validate_requirement(req, forest.grid);
    auto candidates = read_candidates_csv(a.candidates, forest.space);
    if (candidates.empty()) throw std::runtime_error("no candidates to evaluate");
    TruthFn truth = make_truth(a.oracle, forest.space, forest.grid);
    CandidateEvaluation ev = evaluate_candidates(candidates, truth, forest.grid, req);

    std::vector<double> thresholds;
    if (a.thresholds_text.empty())
        for (int i = 0; i <= 10; ++i) thresholds.push_back(0.1 * i);
    else
        thresholds = parse_number_list(a.thresholds_text);
    std::vector<double> likelihoods;
    for (const auto& c : candidates) likelihoods.push_back(c.likelihood);
    ThresholdSweep sweep = threshold_sweep(likelihoods, ev.satisfied, ev.overlap, thresholds);

    auto f = rag::detail::open_out(a.out);
    f << "n_candidates,satisfaction_rate,mean_overlap_rate\n";
    f << candidates.size() << ',' << format_double(ev.satisfaction_rate) << ','
      << format_double(ev.mean_overlap) << '\n';
    f.close();
    std::string sweep_path = stem_plus(a.out, ".sweep.csv");
    write_sweep_csv(sweep_path, sweep);

    RunManifest m;
    m.command = "evaluate";
    m.seed = 0;
    m.config = {{"oracle", a.oracle}, {"requirement", req.name}, {"thresholds", thresholds}};
    m.inputs = {a.candidates, a.model, a.requirement};
    m.outputs = {a.out, sweep_path};
    m.duration_seconds = seconds_since(t0);
    write_manifest(stem_plus(a.out, ".manifest.json"), m);
    std::cout << "satisfaction_rate=" << format_double(ev.satisfaction_rate)
              << " mean_overlap_rate=" << format_double(ev.mean_overlap) << "\n";
    return 0;
}

struct LikelihoodMapArgs {
    std::string model;
    std::string requirement;
    std::string probes_file;
    int lattice = 10;
    std::string out;
};

int cmd_likelihood_map(const LikelihoodMapArgs& a) {
    auto t0 = clk::now();
    Forest forest = load_forest(a.model);
    Requirement req = load_requirement(a.requirement);
    validate_requirement(req, forest.grid);
    std::vector<DesignVector> probes;
    if (!a.probes_file.empty()) {
        auto rows = rag::detail::read_rows(a.probes_file);
        std::size_t start = 0;
        // a header row (dim names) is optional
        bool header = false;
        for (const auto& field : rows.front()) {
            double v;
            auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) header = true;
        }
        if (header) start = 1;
        for (std::size_t i = start; i < rows.size(); ++i) {
            DesignVector x;
            for (const auto& field : rows[i]) x.push_back(parse_double(field));
            forest.space.require_point(x);
            probes.push_back(std::move(x));
        }
    } else {
        if (a.lattice < 1) throw std::runtime_error("--lattice must be >= 1");
        // row-major lattice over the space; integer dims snap to levels
        std::vector<std::size_t> idx(forest.space.dim(), 0);
        auto n = static_cast<std::size_t>(a.lattice);
        while (true) {
            DesignVector x(forest.space.dim());
            for (std::size_t j = 0; j < forest.space.dim(); ++j) {
                const auto& dim = forest.space.dims[j];
                double u = n == 1 ? 0.0
                                  : static_cast<double>(idx[j]) / static_cast<double>(n - 1);
                double v = dim.lower + u * (dim.upper - dim.lower);
                if (dim.kind == VarKind::Integer)
                    v = std::min(std::max(std::round(v), dim.lower), dim.upper);
                x[j] = v;
            }
            probes.push_back(std::move(x));
            std::size_t j = forest.space.dim();
            while (j-- > 0) {
                if (++idx[j] < n) break;
                idx[j] = 0;
                if (j == 0) goto done;
            }
            if (n == 1) break;
        }
    done:;
    }
    if (probes.empty()) throw std::runtime_error("no probe designs given");
    auto map = likelihood_map(forest, req, probes);
    write_likelihood_map_csv(a.out, map, forest.space);

    RunManifest m;
    m.command = "likelihood-map";
    m.seed = 0;
    m.config = {{"requirement", req.name},
                {"lattice", a.probes_file.empty() ? a.lattice : 0},
                {"probes", probes.size()}};
    m.inputs = {a.model, a.requirement};
    if (!a.probes_file.empty()) m.inputs.push_back(a.probes_file);
    m.outputs = {a.out};
    m.duration_seconds = seconds_since(t0);
    write_manifest(stem_plus(a.out, ".manifest.json"), m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bagged-forest surrogate with requirement-conditioned design sampling"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* g = app.add_subcommand("gen-data", "Generate an oracle dataset (CSV + descriptor)");
    g->add_option("--oracle", gen.oracle, "Oracle model")
        ->required()
        ->check(CLI::IsMember({"diatomic", "snap"}));
    g->add_option("--n", gen.n, "Number of designs")->check(CLI::PositiveNumber);
    g->add_option("--nk", gen.nk, "Wavenumber points (diatomic)")->check(CLI::PositiveNumber);
    g->add_option("--neps", gen.neps, "Strain points (snap)")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "Master seed");
    g->add_option("--out", gen.out, "Output CSV path")->required();

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Fit a forest on a dataset");
    t->add_option("--data", train.data, "Dataset CSV")->required();
    t->add_option("--descriptor", train.descriptor, "Dataset descriptor JSON (default: derived)");
    t->add_option("--trees", train.params.n_trees, "Number of trees");
    t->add_option("--max-depth", train.params.max_depth, "Max tree depth (0 = unlimited)")
        ->required();
    t->add_option("--min-samples-split", train.params.min_samples_split, "Min rows to split");
    t->add_option("--min-samples-leaf", train.params.min_samples_leaf, "Min rows per leaf");
    t->add_option("--features-per-split", train.params.features_per_split,
                  "Candidate features per split (0 = round(sqrt(d)))");
    t->add_flag_callback("--no-bootstrap", [&] { train.params.bootstrap = false; },
                         "Train every tree on all rows");
    t->add_option("--test-split", train.test_split, "Held-out sample fraction");
    t->add_option("--seed", train.params.seed, "Master seed");
    t->add_option("--threads", train.threads, "Worker threads (0 = auto)");
    t->add_option("--out", train.out, "Model JSON path")->required();

    PredictArgs pred;
    auto* p = app.add_subcommand("predict", "Predict a response with uncertainty");
    p->add_option("--model", pred.model, "Model JSON")->required();
    auto* inline_design = p->add_option("--design", pred.design_text, "Comma-separated design");
    p->add_option("--design-file", pred.design_file, "File with one comma-separated design row")
        ->excludes(inline_design);
    p->add_flag("--allow-oob", pred.allow_oob, "Proceed when the design is out of bounds");
    p->add_flag("--per-band-uncertainty", pred.per_band,
                "Also write mean two-sigma width per band");
    p->add_option("--out", pred.out, "Prediction CSV path")->required();

    DesignArgs des;
    auto* d = app.add_subcommand("design", "Sample design candidates for a requirement");
    d->add_option("--model", des.model, "Model JSON")->required();
    d->add_option("--requirement", des.requirement, "Requirement JSON")->required();
    d->add_option("--n", des.n, "Total candidates to generate")->check(CLI::PositiveNumber);
    d->add_option("--c0", des.cfg.c0, "Proposal step scale");
    d->add_option("--burn-in", des.cfg.burn_in, "Discarded steps per chain");
    d->add_option("--thin", des.cfg.thin, "Keep every thin-th state");
    d->add_option("--chains", des.cfg.n_chains, "Independent chains");
    d->add_option("--max-init-tries", des.cfg.max_init_tries,
                  "Uniform draws per chain before falling back to the scan argmax");
    d->add_option("--probes", des.probes, "Feasibility-scan probe count");
    d->add_option("--seed", des.cfg.seed, "Master seed");
    d->add_option("--threads", des.threads, "Worker threads (0 = auto)");
    d->add_option("--out", des.out, "Candidates CSV path")->required();

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Score candidates against the oracle truth");
    e->add_option("--candidates", ev.candidates, "Candidates CSV")->required();
    e->add_option("--model", ev.model, "Model JSON (for space/grid)")->required();
    e->add_option("--requirement", ev.requirement, "Requirement JSON")->required();
    e->add_option("--oracle", ev.oracle, "Ground-truth oracle")
        ->required()
        ->check(CLI::IsMember({"diatomic", "snap"}));
    e->add_option("--thresholds", ev.thresholds_text,
                  "Comma-separated sweep thresholds (default 0,0.1,..,1)");
    e->add_option("--out", ev.out, "Summary CSV path")->required();

    LikelihoodMapArgs lm;
    auto* l = app.add_subcommand("likelihood-map", "Evaluate likelihood over probe designs");
    l->add_option("--model", lm.model, "Model JSON")->required();
    l->add_option("--requirement", lm.requirement, "Requirement JSON")->required();
    l->add_option("--probes-file", lm.probes_file, "CSV of probe designs (header optional)");
    l->add_option("--lattice", lm.lattice, "Lattice points per dimension when no probes file");
    l->add_option("--out", lm.out, "Likelihood CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : kExitInputError;
    }

    try {
        if (g->parsed()) return cmd_gen_data(gen);
        if (t->parsed()) return cmd_train(train);
        if (p->parsed()) {
            if (pred.design_text.empty() && pred.design_file.empty())
                throw std::runtime_error("predict needs --design or --design-file");
            return cmd_predict(pred);
        }
        if (d->parsed()) return cmd_design(des);
        if (e->parsed()) return cmd_evaluate(ev);
        if (l->parsed()) return cmd_likelihood_map(lm);
    } catch (const AllZeroLikelihood& err) {
        std::cerr << "error: requirement is unachievable under this model (all-zero likelihood): "
                  << err.what() << "\n";
        return kExitAllZero;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
