#pragma once

#include "qcb/operator_basis.hpp"
#include "qcb/spectral.hpp"
#include "qcb/types.hpp"

#include <vector>

namespace qcb {

struct QMatrix {
    MatrixXd matrix;
    VectorXd eigenvalues;   // ascending
    MatrixXd eigenvectors;  // columns match eigenvalues
    int kernel_dim = 0;
    double kernel_tol = 1e-10;
    double mean = 0.0;      // Tr(Q)/D
    double variance = 0.0;  // Tr(Q^2)/D - mean^2
    std::uint64_t basis_hash = 0;
    std::uint64_t gens_hash = 0;

    Index dim() const { return matrix.rows(); }
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// M_{alpha n} = <n|T_alpha|n> over the easy generators (identity row first when it is easy).
MatrixXd diagonal_expectations(const MatrixXc& vectors, const GeneratorSet& gens);

// Eigen-decompose a symmetrized Q and fill spectrum, kernel count and moments.
QMatrix finalize_q(MatrixXd q, double kernel_tol = 1e-10);

// Q = I - M^T M
QMatrix build_q(const SpectralDecomposition& basis, const GeneratorSet& gens, double kernel_tol = 1e-10);

std::vector<VectorXd> q_kernel(const QMatrix& q, double tol);
Moments q_moments(const MatrixXd& q);

struct ConservedLaw {
    VectorXd coefficients;       // c_n in O = sum_n c_n |n><n|
    VectorXd easy_coefficients;  // Tr[T_alpha O] over the easy generators
    double commutator_residual = 0.0;  // ||[H,O]|| / (||H|| ||O||)
    double quadratic_form = 0.0;       // c^T Q c
};

// H defaults to V diag(E) V^dagger when not given.
std::vector<ConservedLaw> extract_conserved_laws(const QMatrix& q, const SpectralDecomposition& basis,
                                                 const GeneratorSet& gens, const MatrixXc* H = nullptr);

// Kernel dimension from the singular values of M: a diagonal operator lies in the easy
// span exactly when M c has the norm of c, i.e. sigma^2 = 1.
int rank_oracle(const SpectralDecomposition& basis, const GeneratorSet& gens, double tol = 1e-10);

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;
};
Histogram q_histogram(const VectorXd& eigenvalues, int bins = 50, double lo = 0.0, double hi = 1.0);

} // namespace qcb
