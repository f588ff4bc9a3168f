#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rag/dataset.hpp"
#include "rag/design_space.hpp"
#include "rag/query_grid.hpp"
#include "rag/rng.hpp"

namespace rag {

/// Harmonic chain with alternating masses m1, m2 coupled by stiffness kappa.
/// Its dispersion has two branches separated by a frequency gap, which makes
/// it a convenient closed-form stand-in for wave-filtering structures.
struct DiatomicDesign {
    double m1 = 1.0;
    double m2 = 1.0;
    double kappa = 1.0;

    void validate() const {
        if (!(m1 > 0.0 && m2 > 0.0 && kappa > 0.0))
            throw std::invalid_argument("DiatomicDesign: masses and stiffness must be positive");
    }
};

/// Branch frequencies (acoustic, optical) at reduced wavenumber k in [0, pi].
/// Exact at sin(k/2) == 0 so the acoustic branch starts at exactly zero.
inline std::pair<double, double> diatomic_frequencies(const DiatomicDesign& d, double k) {
    d.validate();
    const double s = 1.0 / d.m1 + 1.0 / d.m2;
    const double sk = std::sin(k / 2.0);
    if (sk == 0.0) return {0.0, std::sqrt(2.0 * d.kappa * s)};
    double disc = s * s - 4.0 * sk * sk / (d.m1 * d.m2);
    if (disc < 0.0) disc = 0.0;  // guards roundoff at k = pi with equal masses
    const double root = std::sqrt(disc);
    double w2_minus = d.kappa * (s - root);
    double w2_plus = d.kappa * (s + root);
    if (w2_minus < 0.0) w2_minus = 0.0;
    return {std::sqrt(w2_minus), std::sqrt(w2_plus)};
}

/// Band-gap edges: the acoustic branch tops out at sqrt(2 kappa / max(m)),
/// the optical branch bottoms out at sqrt(2 kappa / min(m)), both at k = pi.
inline std::pair<double, double> diatomic_gap_edges(const DiatomicDesign& d) {
    d.validate();
    const double mmax = std::max(d.m1, d.m2);
    const double mmin = std::min(d.m1, d.m2);
    return {std::sqrt(2.0 * d.kappa / mmax), std::sqrt(2.0 * d.kappa / mmin)};
}

inline DesignSpace diatomic_space() {
    DesignSpace s;
    s.dims = {{"m1", VarKind::Continuous, 0.5, 4.0},
              {"m2", VarKind::Continuous, 0.5, 4.0},
              {"kappa", VarKind::Continuous, 0.5, 2.0}};
    return s;
}

/// Band index axis first (labels 1 = acoustic, 2 = optical), wavenumber
/// second, so one sample's response lists the full acoustic branch then the
/// full optical branch.
inline QueryGrid diatomic_grid(int n_k = 61) {
    QueryGrid g = uniform_grid({{1.0, 2.0}, {0.0, std::acos(-1.0)}}, {2, n_k}, 0, {"band", "k"});
    return g;
}

/// Evaluates the dispersion over a grid whose band axis carries the branch
/// label; every other axis coordinate is ignored except the wavenumber, which
/// must be the single remaining axis.
inline std::vector<double> diatomic_response(const DiatomicDesign& d, const QueryGrid& grid) {
    if (!grid.band_axis || grid.da() != 2)
        throw std::invalid_argument("diatomic_response: expects a (band, wavenumber) grid");
    const std::size_t band_ax = *grid.band_axis;
    const std::size_t k_ax = band_ax == 0 ? 1 : 0;
    std::vector<double> y(grid.dy());
    for (std::size_t q = 0; q < grid.dy(); ++q) {
        auto [acoustic, optical] = diatomic_frequencies(d, grid.flat[q][k_ax]);
        y[q] = grid.flat[q][band_ax] < 1.5 ? acoustic : optical;
    }
    return y;
}

/// Cubic stress-strain law sigma = k1 e - k2 e^2 + k3 e^3 of a snap-through
/// element. Requires k2^2 > 3 k1 k3 so the curve has a local peak followed by
/// a valley (the snap).
struct SnapDesign {
    double k1 = 1.0;
    double k2 = 3.0;
    double k3 = 1.0;

    void validate() const {
        if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0))
            throw std::invalid_argument("SnapDesign: coefficients must be positive");
        if (!(k2 * k2 > 3.0 * k1 * k3))
            throw std::invalid_argument("SnapDesign: no snap, needs k2^2 > 3 k1 k3");
    }
};

/// True when the cubic actually snaps: positive coefficients with a strict
/// local peak and valley, i.e. k2^2 > 3 k1 k3.
inline bool snap_feasible(double k1, double k2, double k3) {
    return k1 > 0.0 && k2 > 0.0 && k3 > 0.0 && k2 * k2 > 3.0 * k1 * k3;
}

inline double snap_stress(const SnapDesign& d, double strain) {
    return d.k1 * strain - d.k2 * strain * strain + d.k3 * strain * strain * strain;
}

/// Strain of the stress peak, the smaller root of sigma'(e) = 0. Written in
/// the rationalized form k1 / (k2 + sqrt(k2^2 - 3 k1 k3)) for stability.
inline double snap_peak_strain(const SnapDesign& d) {
    d.validate();
    const double disc = std::sqrt(d.k2 * d.k2 - 3.0 * d.k1 * d.k3);
    return d.k1 / (d.k2 + disc);
}

/// Peak stress, the local maximum reached just before snap-through.
inline double snap_peak_stress(const SnapDesign& d) { return snap_stress(d, snap_peak_strain(d)); }

/// Strain where the rising branch recrosses the peak-stress level after the
/// valley. The cubic sigma(e) - sigma(e_peak) has e_peak as a double root, so
/// the third root follows from the root sum k2 / k3.
inline double snap_recross_strain(const SnapDesign& d) {
    return d.k2 / d.k3 - 2.0 * snap_peak_strain(d);
}

/// Strain travelled at constant load during the snap event.
inline double snap_stroke(const SnapDesign& d) {
    return snap_recross_strain(d) - snap_peak_strain(d);
}

inline DesignSpace snap_space() {
    DesignSpace s;
    s.dims = {{"k1", VarKind::Continuous, 1.0, 4.0},
              {"k2", VarKind::Continuous, 2.0, 6.0},
              {"k3", VarKind::Continuous, 0.5, 2.0}};
    return s;
}

inline QueryGrid snap_grid(int n_eps = 31) {
    return uniform_grid({{0.0, 2.0}}, {n_eps}, std::nullopt, {"eps"});
}

inline std::vector<double> snap_response(const SnapDesign& d, const QueryGrid& grid) {
    d.validate();
    if (grid.da() != 1) throw std::invalid_argument("snap_response: expects a strain grid");
    std::vector<double> y(grid.dy());
    for (std::size_t q = 0; q < grid.dy(); ++q) y[q] = snap_stress(d, grid.flat[q][0]);
    return y;
}

/// Centered Latin hypercube: every dimension is cut into m equal strata, each
/// design takes the midpoint of one stratum per dimension, and per-dimension
/// stratum orders are independent seeded shuffles. m = 1 degenerates to the
/// single mid-range design. Integer dimensions round to the nearest level.
inline std::vector<DesignVector> latin_hypercube(const DesignSpace& space, std::size_t m,
                                                 std::uint64_t seed) {
    space.validate();
    if (m == 0) throw std::invalid_argument("latin_hypercube: m must be >= 1");
    std::vector<DesignVector> designs(m, DesignVector(space.dim()));
    std::vector<std::size_t> perm(m);
    for (std::size_t j = 0; j < space.dim(); ++j) {
        for (std::size_t i = 0; i < m; ++i) perm[i] = i;
        SplitMix64 rng(derive_seed(seed, "lhs-dim", j));
        for (std::size_t i = m; i > 1; --i) {
            std::size_t k = static_cast<std::size_t>(rng.below(i));
            std::swap(perm[i - 1], perm[k]);
        }
        const VariableSpec& dim = space.dims[j];
        for (std::size_t i = 0; i < m; ++i) {
            double u = (static_cast<double>(perm[i]) + 0.5) / static_cast<double>(m);
            double v = dim.lower + u * (dim.upper - dim.lower);
            if (dim.kind == VarKind::Integer) {
                v = std::round(v);
                v = std::min(std::max(v, dim.lower), dim.upper);
            }
            designs[i][j] = v;
        }
    }
    return designs;
}

inline Dataset make_diatomic_dataset(std::size_t m, std::uint64_t seed,
                                     const DesignSpace& space = diatomic_space(),
                                     const QueryGrid& grid = diatomic_grid()) {
    Dataset ds;
    ds.space = space;
    ds.grid = grid;
    ds.units = "angular frequency";
    for (auto& x : latin_hypercube(space, m, seed)) {
        DiatomicDesign d{x[0], x[1], x[2]};
        ds.samples.push_back({std::move(x), diatomic_response(d, grid)});
    }
    ds.validate();
    return ds;
}

/// Snap designs must satisfy the snap constraint; hypercube picks that land
/// outside it are replaced by per-sample uniform redraws so the result stays
/// reproducible under the same seed.
inline Dataset make_snap_dataset(std::size_t m, std::uint64_t seed,
                                 const DesignSpace& space = snap_space(),
                                 const QueryGrid& grid = snap_grid()) {
    Dataset ds;
    ds.space = space;
    ds.grid = grid;
    ds.units = "stress";
    auto valid = [](const DesignVector& x) { return snap_feasible(x[0], x[1], x[2]); };
    std::size_t i = 0;
    for (auto& x : latin_hypercube(space, m, seed)) {
        if (!valid(x)) {
            SplitMix64 rng(derive_seed(seed, "snap-redraw", i));
            int tries = 0;
            do {
                for (std::size_t j = 0; j < space.dim(); ++j) {
                    const VariableSpec& dim = space.dims[j];
                    x[j] = dim.lower + rng.unit() * (dim.upper - dim.lower);
                }
                if (++tries > 10000)
                    throw std::runtime_error("make_snap_dataset: cannot satisfy snap constraint");
            } while (!valid(x));
        }
        SnapDesign d{x[0], x[1], x[2]};
        ds.samples.push_back({std::move(x), snap_response(d, grid)});
        ++i;
    }
    ds.validate();
    return ds;
}

}  // namespace rag
