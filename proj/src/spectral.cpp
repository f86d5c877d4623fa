#include "qcb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qcb {

namespace {

constexpr Index kMaxDim = 4096;

double max_hermiticity_error(const MatrixXc& H) {
    return (H - H.adjoint()).cwiseAbs().maxCoeff();
}

// Split sorted eigenvalues into clusters with consecutive gaps below tol.
std::vector<std::pair<Index, Index>> clusters(const VectorXd& w, double tol) {
    std::vector<std::pair<Index, Index>> out;
    Index start = 0;
    for (Index i = 1; i <= w.size(); ++i) {
        if (i == w.size() || w(i) - w(i - 1) >= tol) {
            out.emplace_back(start, i - start);
            start = i;
        }
    }
    return out;
}

} // namespace

std::size_t SpectralDecomposition::enlarged_dim() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += static_cast<std::size_t>(b.size * b.size);
    return s;
}

std::size_t SpectralDecomposition::max_block() const {
    std::size_t m = 0;
    for (const auto& b : blocks) m = std::max(m, static_cast<std::size_t>(b.size));
    return m;
}

MatrixXc SpectralDecomposition::hamiltonian() const {
    return vectors * energies.cast<cplx>().asDiagonal() * vectors.adjoint();
}

std::uint64_t SpectralDecomposition::hash() const {
    std::uint64_t h = fnv1a(energies.data(), sizeof(double) * energies.size());
    h = fnv1a(vectors.data(), sizeof(cplx) * vectors.size(), h);
    for (const auto& b : blocks) {
        std::int64_t v[2] = {b.begin, b.size};
        h = fnv1a(v, sizeof v, h);
    }
    return h;
}

std::vector<Block> group_degeneracies(const VectorXd& energies, double tol_rel) {
    std::vector<Block> blocks;
    const Index D = energies.size();
    if (D == 0) return blocks;
    const double width = energies.maxCoeff() - energies.minCoeff();
    const double scale = width > 0 ? width : std::max(1.0, std::abs(energies(0)));
    const double tol = tol_rel * scale;
    Index start = 0;
    for (Index i = 1; i <= D; ++i) {
        if (i == D || energies(i) - energies(i - 1) >= tol) {
            Block b;
            b.begin = start;
            b.size = i - start;
            b.labels = {energies.segment(start, b.size).mean()};
            blocks.push_back(std::move(b));
            start = i;
        }
    }
    return blocks;
}

SpectralDecomposition diagonalize(const MatrixXc& H, double tol_rel, bool normalized) {
    if (H.rows() != H.cols()) throw NumericError("diagonalize: matrix is not square");
    if (H.rows() > kMaxDim) throw ResourceError("diagonalize: dimension exceeds 4096");
    if (max_hermiticity_error(H) > 1e-10) throw NumericError("diagonalize: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(H);
    if (es.info() != Eigen::Success) throw NumericError("diagonalize: eigensolver failed");
    SpectralDecomposition d;
    d.energies = es.eigenvalues();
    d.vectors = es.eigenvectors();
    d.blocks = group_degeneracies(d.energies, tol_rel);
    d.normalized = normalized;
    return d;
}

SpectralDecomposition presplit(const SpectralDecomposition& dec, std::span<const MatrixXc> ops, double tol) {
    const Index D = dec.dim();
    for (std::size_t a = 0; a < ops.size(); ++a) {
        if (ops[a].rows() != D || ops[a].cols() != D) throw ConfigError("presplit: operator dimension mismatch");
        if (max_hermiticity_error(ops[a]) > 1e-10) throw ConfigError("presplit: operator is not Hermitian");
        for (std::size_t b = a + 1; b < ops.size(); ++b) {
            MatrixXc c = ops[a] * ops[b] - ops[b] * ops[a];
            if (c.norm() > tol * std::max(1.0, ops[a].norm() * ops[b].norm()))
                throw ConfigError("presplit: operator list does not commute");
        }
    }
    SpectralDecomposition out = dec;
    if (ops.empty()) return out;
    // Residual of [H, O] measured through the block structure: O must be block diagonal.
    for (std::size_t a = 0; a < ops.size(); ++a) {
        MatrixXc R = dec.vectors.adjoint() * ops[a] * dec.vectors;
        double off = 0.0;
        for (const auto& b : dec.blocks) R.block(b.begin, b.begin, b.size, b.size).setZero();
        off = R.norm();
        if (off > tol * std::max(1.0, ops[a].norm()))
            throw ConfigError("presplit: operator does not commute with H");
    }

    std::vector<Block> refined;
    for (const auto& blk : dec.blocks) {
        // (begin, size, labels) sub-blocks inside this energy block
        std::vector<Block> subs{blk};
        for (const auto& op : ops) {
            std::vector<Block> next;
            for (const auto& sb : subs) {
                auto V = out.vectors.middleCols(sb.begin, sb.size);
                MatrixXc A = V.adjoint() * op * V;
                A = 0.5 * (A + A.adjoint()).eval();
                if (sb.size == 1) {
                    Block nb = sb;
                    nb.labels.push_back(A(0, 0).real());
                    next.push_back(std::move(nb));
                    continue;
                }
                Eigen::SelfAdjointEigenSolver<MatrixXc> es(A);
                MatrixXc rotated = V * es.eigenvectors();
                V = rotated;
                const VectorXd& w = es.eigenvalues();
                const double ctol = tol * std::max(1.0, w.cwiseAbs().maxCoeff());
                for (auto [s, n] : clusters(w, ctol)) {
                    Block nb;
                    nb.begin = sb.begin + s;
                    nb.size = n;
                    nb.labels = sb.labels;
                    nb.labels.push_back(w.segment(s, n).mean());
                    next.push_back(std::move(nb));
                }
            }
            subs = std::move(next);
        }
        for (auto& s : subs) refined.push_back(std::move(s));
    }
    out.blocks = std::move(refined);
    return out;
}

SpectralDecomposition rotate_blocks(const SpectralDecomposition& dec, const MatrixXc& rotation) {
    if (rotation.rows() != dec.dim() || rotation.cols() != dec.dim())
        throw ConfigError("rotation dimension mismatch");
    SpectralDecomposition out = dec;
    for (const auto& b : dec.blocks) {
        out.vectors.middleCols(b.begin, b.size) =
            dec.vectors.middleCols(b.begin, b.size) * rotation.block(b.begin, b.begin, b.size, b.size);
    }
    return out;
}

MatrixXc random_block_rotation(const SpectralDecomposition& dec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const Index D = dec.dim();
    MatrixXc R = MatrixXc::Zero(D, D);
    for (const auto& b : dec.blocks) {
        MatrixXc z(b.size, b.size);
        for (Index j = 0; j < b.size; ++j)
            for (Index i = 0; i < b.size; ++i) z(i, j) = cplx(g(rng), g(rng));
        Eigen::HouseholderQR<MatrixXc> qr(z);
        MatrixXc q = qr.householderQ();
        R.block(b.begin, b.begin, b.size, b.size) = q;
    }
    return R;
}

double unitarity_residual(const MatrixXc& V) {
    return (V.adjoint() * V - MatrixXc::Identity(V.cols(), V.cols())).norm();
}

} // namespace qcb
