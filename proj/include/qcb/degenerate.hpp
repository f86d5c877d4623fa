#pragma once

#include "qcb/operator_basis.hpp"
#include "qcb/qmatrix.hpp"
#include "qcb/spectral.hpp"

#include <vector>

namespace qcb {

// One Hermitian pair operator inside a degenerate block:
// kind 0: |i><i|, kind +1: (|i><j| + |j><i|)/sqrt2, kind -1: (-i|i><j| + i|j><i|)/sqrt2, i < j.
struct PairIndex {
    int block = 0;
    Index i = 0;
    Index j = 0;
    int kind = 0;
};

struct EnlargedQ {
    std::vector<PairIndex> index_pairs;
    std::vector<std::size_t> block_offset;  // first pair index of each block
    MatrixXd matrix;                        // I - R R^T, R_{I alpha} = Tr[O_I T_alpha]
    VectorXd eigenvalues;
    MatrixXd eigenvectors;
    MatrixXd kernel;  // columns
    int kernel_dim = 0;
    double kernel_tol = 1e-10;

    Index dim() const { return matrix.rows(); }
};

// Upper limit on sum_n d_n^2.
constexpr std::size_t kMaxEnlargedDim = 6000;

EnlargedQ build_enlarged_q(const SpectralDecomposition& dec, const GeneratorSet& gens, double kernel_tol = 1e-10);

// Pair-basis coefficients of the projectors |n'><n'| for the rotated basis, one column per n.
MatrixXd projector_coefficients(const EnlargedQ& eq, const SpectralDecomposition& dec, const MatrixXc& rotation);

// Q of the rotated basis from Q~ alone: Q = W^T Q~ W.
QMatrix reconstruct_q_from_qtilde(const EnlargedQ& eq, const SpectralDecomposition& dec, const MatrixXc& rotation);

// Block-diagonal Hermitian operator in eigenbasis coordinates (one matrix per block).
struct BlockOperator {
    std::vector<MatrixXc> blocks;
    MatrixXc to_full(const SpectralDecomposition& dec) const;  // V A V^dagger in the lab basis
};

BlockOperator kernel_operator(const EnlargedQ& eq, const SpectralDecomposition& dec, const VectorXd& c);

// Tr[T_alpha O] of every kernel operator over the easy generators (rows = kernel vectors).
MatrixXd kernel_easy_coefficients(const EnlargedQ& eq, const SpectralDecomposition& dec, const GeneratorSet& gens);

struct PreferredBasisResult {
    MatrixXc rotation;            // block-diagonal unitary
    SpectralDecomposition basis;  // rotated eigenbasis
    std::vector<BlockOperator> commuting_charges;
    QMatrix q;
    int kernel_dim = 0;
    int input_kernel_dim = 0;
    int enlarged_kernel_dim = 0;
    bool greedy_complete = true;  // every kernel charge was mutually commuting
    bool kept_input = false;      // the input basis was at least as good
};

PreferredBasisResult preferred_basis(const SpectralDecomposition& dec, const GeneratorSet& gens,
                                     double kernel_tol = 1e-10, double commute_tol = 1e-8);
PreferredBasisResult preferred_basis(const SpectralDecomposition& dec, const EnlargedQ& eq,
                                     double commute_tol = 1e-8);

} // namespace qcb
