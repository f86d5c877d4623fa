#pragma once

#include "qcb/qmatrix.hpp"
#include "qcb/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcb {

// Lattice {B0 k : k in Z^D} in embedded (Euclidean) coordinates. For the complexity
// problem B0 = 2 pi C with C^T C = G = I + (mu - 1) Q, so ||v||_G = ||C v||.
struct LatticeContext {
    Index dim = 0;
    double scale = 1.0;     // lattice spacing in target coordinates (2 pi for embed)
    MatrixXd metric;        // G
    MatrixXd factor;        // C, upper triangular for embed
    MatrixXd initial;       // B0 = scale * C
    bool initial_upper = false;
    MatrixXd basis;         // current basis columns, basis = initial * transform
    MatrixXi64 transform;   // unimodular
    MatrixXd gso;           // b_i^* columns
    VectorXd gso_sq;        // ||b_i^*||^2
    MatrixXd mu;            // mu(i, j) = <b_i, b_j^*>/||b_j^*||^2, j < i
    MatrixXd gram;          // basis^T basis
    bool reduced = false;

    // Target in problem coordinates (phases) -> embedded coordinates.
    VectorXd to_embedded(const VectorXd& x) const { return factor * x; }
};

LatticeContext embed(const MatrixXd& Q, double mu);
LatticeContext embed(const QMatrix& Q, double mu);
// Generic lattice from explicit basis columns (scale 1, G = B^T B).
LatticeContext from_basis(const MatrixXd& basis);

void gram_schmidt(LatticeContext& ctx);

struct LllReport {
    std::size_t iterations = 0;
    std::size_t swaps = 0;
    bool converged = true;
};
LllReport lll_reduce(LatticeContext& ctx, double delta = 0.99, std::size_t max_iterations = 0);
// Largest violation of size reduction and of the Lovasz condition (<= 0 means satisfied).
double size_reduction_violation(const LatticeContext& ctx);
double lovasz_violation(const LatticeContext& ctx, double delta);

enum class CvpMethod { Rounding, Babai, BabaiGreedy, Brute };
std::string to_string(CvpMethod m);

struct CvpSolution {
    VectorXi64 k;        // coordinates in the initial basis
    VectorXi64 coeffs;   // coordinates in the current basis (empty for rounding/brute)
    double value = 0.0;  // ||y - B0 k||
    CvpMethod method = CvpMethod::Rounding;
};

// All targets y are in embedded coordinates.
double lattice_distance(const LatticeContext& ctx, const VectorXd& y, const VectorXi64& k);
VectorXd standard_coordinates(const LatticeContext& ctx, const VectorXd& y);
CvpSolution round_cvp(const LatticeContext& ctx, const VectorXd& y);
CvpSolution babai_nearest_plane(const LatticeContext& ctx, const VectorXd& y);
CvpSolution greedy_refine(const LatticeContext& ctx, const CvpSolution& sol, const VectorXd& y,
                          std::size_t max_steps = 0);
// Exact minimum over k in [c - K, c + K]^D around c = round(B0^{-1} y); D <= 8.
CvpSolution brute_force_cvp(const LatticeContext& ctx, const VectorXd& y, int K);
// Box half-width that provably contains every lattice point within distance R of y.
int safe_box_radius(const LatticeContext& ctx, double R);

double covering_radius_bound(const LatticeContext& ctx);
// pi/sqrt(3) * sqrt(sum ||b_i^*||^2) / scale
double plateau_estimate(const LatticeContext& ctx);

std::string lattice_dump_csv(const LatticeContext& ctx);

// Random CVP instances: Q = O diag(lambda) O^T with O Haar-orthogonal, lambda uniform in [0, 1],
// target uniform over one cell of 2 pi Z^D.
struct CvpBenchRow {
    std::size_t instance = 0;
    int dim = 0;
    double rounding = 0.0;
    double babai = 0.0;
    double greedy = 0.0;
    double brute = 0.0;
    int box = 0;
    double ratio = 1.0;  // greedy / brute
};

struct CvpBenchResult {
    std::vector<CvpBenchRow> rows;
    std::size_t violations_rounding_babai = 0;  // rounding < babai
    std::size_t violations_babai_greedy = 0;    // babai < babai+greedy
    std::size_t violations_greedy_brute = 0;    // babai+greedy < brute
    std::size_t within_ratio = 0;
    double ratio_threshold = 1.1;
};

CvpBenchResult run_cvp_bench(const std::vector<int>& dims, std::size_t instances, double mu, std::uint64_t seed,
                             double ratio_threshold = 1.1, double lll_delta = 0.99);

} // namespace qcb
