#pragma once

#include "qcb/types.hpp"

#include <span>
#include <vector>

namespace qcb {

struct Block {
    Index begin = 0;
    Index size = 0;
    std::vector<double> labels;  // energy followed by presplit quantum numbers
};

struct SpectralDecomposition {
    VectorXd energies;  // ascending inside the original degenerate grouping
    MatrixXc vectors;   // columns |n>, entries psi_i^n = <i|n>
    std::vector<Block> blocks;
    bool normalized = false;

    Index dim() const { return energies.size(); }
    // sum_n d_n^2, the size of the enlarged Q-matrix
    std::size_t enlarged_dim() const;
    std::size_t max_block() const;
    MatrixXc hamiltonian() const;
    std::uint64_t hash() const;
};

// Maximal runs of consecutive energies with gaps below tol_rel * (spectral width).
std::vector<Block> group_degeneracies(const VectorXd& energies, double tol_rel = 1e-8);

SpectralDecomposition diagonalize(const MatrixXc& H, double tol_rel = 1e-8, bool normalized = false);

// Rotate each degenerate block onto joint eigenvectors of the given operators (applied in order)
// and refine the blocks by their eigenvalues. Operators must commute with H and each other.
SpectralDecomposition presplit(const SpectralDecomposition& dec, std::span<const MatrixXc> ops,
                               double tol = 1e-8);

// Apply a block-diagonal unitary (given as a full D x D matrix) to the eigenvectors.
SpectralDecomposition rotate_blocks(const SpectralDecomposition& dec, const MatrixXc& rotation);

// Random unitary inside every degenerate block (seeded); used to probe basis dependence.
MatrixXc random_block_rotation(const SpectralDecomposition& dec, std::uint64_t seed);

double unitarity_residual(const MatrixXc& V);

} // namespace qcb
