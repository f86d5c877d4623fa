#pragma once

#include "qcb/lattice.hpp"
#include "qcb/model_zoo.hpp"
#include "qcb/operator_basis.hpp"
#include "qcb/qmatrix.hpp"
#include "qcb/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qcb {

struct CurveConfig {
    double t_start = 5e5;
    double t_end = 6e5;
    double dt = 1e3;
    double mu = 0.0;  // <= 0 means mu = D
    bool clip_to_linear = true;
    int threads = 1;

    void validate() const;
    // Long window used by --long-run.
    static CurveConfig long_run() { return CurveConfig{5e7, 6e7, 1e4, 0.0, true, 1}; }
    bool operator==(const CurveConfig&) const = default;
};

std::vector<double> time_grid(const CurveConfig& cfg);

// min_k ||E t - 2 pi k||, solved exactly by rounding each component.
double biinvariant_at(const VectorXd& E, double t);

// E t reduced componentwise into [-pi, pi).
VectorXd reduced_phases(const VectorXd& E, double t);

// Bound at time t on a reduced context: babai + greedy, optionally clipped by the k = 0 value.
double bounded_at(const LatticeContext& ctx, const VectorXd& E, double t, bool clip);
// sqrt(E^T G E), the slope of the k = 0 solution.
double linear_slope(const LatticeContext& ctx, const VectorXd& E);

struct PlateauStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
    double se = 0.0;
    double first_half = 0.0;
    double second_half = 0.0;
    double half_rel_diff = 0.0;
    bool stable = true;        // halves agree within 5%
    bool nonstationary = false;  // halves differ by more than 10%
};

PlateauStats plateau_sample(const std::vector<double>& values);

struct ComplexityCurve {
    std::vector<double> times;
    std::vector<double> bound;
    std::vector<double> biinv;
    double mu = 0.0;
    PlateauStats plateau;
    PlateauStats biinv_plateau;
    double estimate_gso = 0.0;   // pi/sqrt3 (sum ||b_i^*||^2)^(1/2)
    double estimate_mean = 0.0;  // pi sqrt(D mu lambda_bar / 3)
};

// Values at every grid time; threads split the grid into contiguous chunks.
ComplexityCurve compute_curve(const LatticeContext& ctx, const VectorXd& E, const CurveConfig& cfg);

// Smallest time at which some |E_n t| reaches pi; below it every curve equals t.
double first_crossing(const VectorXd& E);

struct ExperimentConfig {
    ModelSpec model = ModelSpec::chaotic_ising(8);
    Threshold threshold{2, 2, 0};
    Convention convention = Convention::T1;
    GeneratorSetOptions gen_options;
    CurveConfig curve;
    std::optional<std::vector<SymmetryKind>> presplit;  // unset: default_presplit(model)
    bool use_preferred_basis = true;
    double degeneracy_tol = 1e-8;
    double kernel_tol = 1e-10;
    double commute_tol = 1e-8;
    double lll_delta = 0.99;
    bool compute_curve = true;
    bool operator==(const ExperimentConfig&) const = default;
};

// T1(k) = (k, k), T2(k) = (k, min(6, L)), T3(k) = T1(k) minus one window; FirstN ignores the threshold.
Threshold convention_threshold(Convention c, int k, int L);

struct ExperimentResult {
    ModelSpec model;
    double scale = 1.0;
    std::size_t n_loc = 0;
    std::uint64_t gens_hash = 0;
    GeneratorSet gens;
    SpectralDecomposition basis;
    QMatrix q;
    int input_kernel_dim = 0;
    double mu = 0.0;
    LatticeContext lattice;
    LllReport lll;
    ComplexityCurve curve;
};

// build -> normalize -> diagonalize -> presplit -> preferred basis -> Q -> embed -> LLL -> curve.
// Errors keep their type and gain a stage prefix.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Basis and Q only (no lattice work).
ExperimentResult prepare_q(const ExperimentConfig& cfg);

} // namespace qcb
