#include "qcb/degenerate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qcb {

namespace {

constexpr Index kChunk = 256;
const double kSqrt2 = std::sqrt(2.0);

void make_pairs(const SpectralDecomposition& dec, EnlargedQ& eq) {
    eq.index_pairs.clear();
    eq.block_offset.clear();
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        eq.block_offset.push_back(eq.index_pairs.size());
        for (Index i = 0; i < blk.size; ++i)
            eq.index_pairs.push_back({int(b), blk.begin + i, blk.begin + i, 0});
        for (Index i = 0; i < blk.size; ++i)
            for (Index j = i + 1; j < blk.size; ++j) {
                eq.index_pairs.push_back({int(b), blk.begin + i, blk.begin + j, +1});
                eq.index_pairs.push_back({int(b), blk.begin + i, blk.begin + j, -1});
            }
    }
}

// Fill R_{I alpha} = Tr[O_I T_alpha] for the pair basis, one chunk of generators at a time.
void for_each_r_chunk(const SpectralDecomposition& dec, const EnlargedQ& eq, const GeneratorSet& gens,
                      const std::function<void(const MatrixXd&, Index)>& sink) {
    const Index D = dec.dim();
    const Index dim = static_cast<Index>(eq.index_pairs.size());
    const Index n_easy = static_cast<Index>(gens.easy.size());
    Index alpha = 0;
    if (gens.options.identity_easy) {
        MatrixXd r = MatrixXd::Zero(dim, 1);
        for (Index I = 0; I < dim; ++I)
            if (eq.index_pairs[I].kind == 0) r(I, 0) = 1.0 / std::sqrt(static_cast<double>(D));
        sink(r, alpha++);
    }
    MatrixXc TV;
    MatrixXc G;
    for (Index start = 0; start < n_easy; start += kChunk) {
        const Index n = std::min(kChunk, n_easy - start);
        MatrixXd r(dim, n);
        for (Index a = 0; a < n; ++a) {
            apply_generator(gens.easy[start + a], gens.L, gens.site, dec.vectors, TV);
            for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
                const auto& blk = dec.blocks[b];
                Index o = static_cast<Index>(eq.block_offset[b]);
                if (blk.size == 1) {
                    r(o, a) = dec.vectors.col(blk.begin).dot(TV.col(blk.begin)).real();
                    continue;
                }
                G.noalias() = dec.vectors.middleCols(blk.begin, blk.size).adjoint() * TV.middleCols(blk.begin, blk.size);
                for (Index i = 0; i < blk.size; ++i) r(o + i, a) = G(i, i).real();
                Index p = o + blk.size;
                for (Index i = 0; i < blk.size; ++i)
                    for (Index j = i + 1; j < blk.size; ++j) {
                        r(p++, a) = kSqrt2 * G(i, j).real();
                        r(p++, a) = -kSqrt2 * G(i, j).imag();
                    }
            }
        }
        sink(r, alpha);
        alpha += n;
    }
}

// Per-block rotation columns -> pair coefficients of |psi><psi| (d^2 x d).
MatrixXd block_projectors(const MatrixXc& U) {
    const Index d = U.rows();
    MatrixXd W(d * d, d);
    for (Index k = 0; k < d; ++k) {
        Index p = 0;
        for (Index i = 0; i < d; ++i) W(p++, k) = std::norm(U(i, k));
        for (Index i = 0; i < d; ++i)
            for (Index j = i + 1; j < d; ++j) {
                cplx z = std::conj(U(i, k)) * U(j, k);
                W(p++, k) = kSqrt2 * z.real();
                W(p++, k) = kSqrt2 * z.imag();
            }
    }
    return W;
}

double block_commutator(const BlockOperator& a, const BlockOperator& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        if (a.blocks[k].rows() < 2) continue;
        s += (a.blocks[k] * b.blocks[k] - b.blocks[k] * a.blocks[k]).squaredNorm();
    }
    return std::sqrt(s);
}

} // namespace

EnlargedQ build_enlarged_q(const SpectralDecomposition& dec, const GeneratorSet& gens, double kernel_tol) {
    if (static_cast<std::uint64_t>(dec.dim()) != gens.dimension())
        throw ConfigError("generator set dimension does not match the decomposition");
    if (dec.enlarged_dim() > kMaxEnlargedDim)
        throw ResourceError("enlarged Q-matrix dimension " + std::to_string(dec.enlarged_dim()) +
                            " exceeds the limit; presplit with more symmetries");
    EnlargedQ eq;
    make_pairs(dec, eq);
    const Index dim = static_cast<Index>(eq.index_pairs.size());
    MatrixXd q = MatrixXd::Identity(dim, dim);
    for_each_r_chunk(dec, eq, gens, [&](const MatrixXd& r, Index) {
        q.selfadjointView<Eigen::Lower>().rankUpdate(r, -1.0);
    });
    q = q.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
    if (es.info() != Eigen::Success) throw NumericError("enlarged Q eigensolver failed");
    eq.matrix = std::move(q);
    eq.eigenvalues = es.eigenvalues();
    eq.eigenvectors = es.eigenvectors();
    eq.kernel_tol = kernel_tol;
    eq.kernel_dim = static_cast<int>((eq.eigenvalues.array() < kernel_tol).count());
    eq.kernel = eq.eigenvectors.leftCols(eq.kernel_dim);
    return eq;
}

MatrixXd projector_coefficients(const EnlargedQ& eq, const SpectralDecomposition& dec, const MatrixXc& rotation) {
    const Index D = dec.dim();
    MatrixXd W = MatrixXd::Zero(eq.dim(), D);
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        MatrixXd wb = block_projectors(rotation.block(blk.begin, blk.begin, blk.size, blk.size));
        W.block(static_cast<Index>(eq.block_offset[b]), blk.begin, wb.rows(), blk.size) = wb;
    }
    return W;
}

QMatrix reconstruct_q_from_qtilde(const EnlargedQ& eq, const SpectralDecomposition& dec, const MatrixXc& rotation) {
    const Index D = dec.dim();
    if (rotation.rows() != D || rotation.cols() != D) throw ConfigError("rotation dimension mismatch");
    if (eq.block_offset.size() != dec.blocks.size() || eq.dim() != static_cast<Index>(dec.enlarged_dim()))
        throw ConfigError("enlarged Q does not match the decomposition");
    std::vector<MatrixXd> wb(dec.blocks.size());
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        wb[b] = block_projectors(rotation.block(blk.begin, blk.begin, blk.size, blk.size));
    }
    // Y = Q~ W, then Q = W^T Y, exploiting the block support of W.
    MatrixXd Y(eq.dim(), D);
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        Index o = static_cast<Index>(eq.block_offset[b]);
        Y.middleCols(blk.begin, blk.size).noalias() = eq.matrix.middleCols(o, wb[b].rows()) * wb[b];
    }
    MatrixXd q(D, D);
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        Index o = static_cast<Index>(eq.block_offset[b]);
        q.middleRows(blk.begin, blk.size).noalias() = wb[b].transpose() * Y.middleRows(o, wb[b].rows());
    }
    return finalize_q(std::move(q), eq.kernel_tol);
}

MatrixXc BlockOperator::to_full(const SpectralDecomposition& dec) const {
    const Index D = dec.dim();
    MatrixXc A = MatrixXc::Zero(D, D);
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        A.block(blk.begin, blk.begin, blk.size, blk.size) = blocks[b];
    }
    return dec.vectors * A * dec.vectors.adjoint();
}

BlockOperator kernel_operator(const EnlargedQ& eq, const SpectralDecomposition& dec, const VectorXd& c) {
    BlockOperator op;
    op.blocks.resize(dec.blocks.size());
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const Index d = dec.blocks[b].size;
        MatrixXc A = MatrixXc::Zero(d, d);
        Index p = static_cast<Index>(eq.block_offset[b]);
        for (Index i = 0; i < d; ++i) A(i, i) = c(p++);
        for (Index i = 0; i < d; ++i)
            for (Index j = i + 1; j < d; ++j) {
                double cp = c(p++), cm = c(p++);
                A(i, j) = cplx(cp, -cm) / kSqrt2;
                A(j, i) = cplx(cp, cm) / kSqrt2;
            }
        op.blocks[b] = std::move(A);
    }
    return op;
}

MatrixXd kernel_easy_coefficients(const EnlargedQ& eq, const SpectralDecomposition& dec, const GeneratorSet& gens) {
    MatrixXd out(eq.kernel_dim, gens.n_loc());
    if (eq.kernel_dim == 0) return out;
    for_each_r_chunk(dec, eq, gens, [&](const MatrixXd& r, Index first) {
        out.middleCols(first, r.cols()).noalias() = eq.kernel.transpose() * r;
    });
    return out;
}

PreferredBasisResult preferred_basis(const SpectralDecomposition& dec, const GeneratorSet& gens, double kernel_tol,
                                     double commute_tol) {
    EnlargedQ eq = build_enlarged_q(dec, gens, kernel_tol);
    PreferredBasisResult r = preferred_basis(dec, eq, commute_tol);
    r.q.gens_hash = gens.hash();
    return r;
}

PreferredBasisResult preferred_basis(const SpectralDecomposition& dec, const EnlargedQ& eq, double commute_tol) {
    const Index D = dec.dim();
    PreferredBasisResult res;
    res.enlarged_kernel_dim = eq.kernel_dim;
    const MatrixXc identity = MatrixXc::Identity(D, D);
    QMatrix q_in = reconstruct_q_from_qtilde(eq, dec, identity);
    res.input_kernel_dim = q_in.kernel_dim;

    // Greedy mutually commuting subset of the kernel charges, in kernel order.
    std::vector<BlockOperator> selected;
    for (Index k = 0; k < eq.kernel_dim; ++k) {
        BlockOperator op = kernel_operator(eq, dec, eq.kernel.col(k));
        bool ok = true;
        for (const auto& s : selected)
            if (block_commutator(op, s) >= commute_tol) {
                ok = false;
                break;
            }
        if (ok)
            selected.push_back(std::move(op));
        else
            res.greedy_complete = false;
    }

    // Sequential simultaneous diagonalization inside every degenerate block.
    MatrixXc rotation = identity;
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        const auto& blk = dec.blocks[b];
        if (blk.size < 2) continue;
        MatrixXc U = MatrixXc::Identity(blk.size, blk.size);
        std::vector<std::pair<Index, Index>> subs{{0, blk.size}};
        for (const auto& op : selected) {
            std::vector<std::pair<Index, Index>> next;
            for (auto [s, n] : subs) {
                if (n < 2) {
                    next.emplace_back(s, n);
                    continue;
                }
                auto Us = U.middleCols(s, n);
                MatrixXc A = Us.adjoint() * op.blocks[b] * Us;
                A = 0.5 * (A + A.adjoint()).eval();
                Eigen::SelfAdjointEigenSolver<MatrixXc> es(A);
                MatrixXc rotated = Us * es.eigenvectors();
                Us = rotated;
                const VectorXd& w = es.eigenvalues();
                const double ctol = commute_tol * std::max(1.0, w.cwiseAbs().maxCoeff());
                Index start = 0;
                for (Index i = 1; i <= n; ++i) {
                    if (i == n || w(i) - w(i - 1) >= ctol) {
                        next.emplace_back(s + start, i - start);
                        start = i;
                    }
                }
            }
            subs = std::move(next);
        }
        rotation.block(blk.begin, blk.begin, blk.size, blk.size) = U;
    }

    QMatrix q_rot = reconstruct_q_from_qtilde(eq, dec, rotation);
    if (q_rot.kernel_dim >= q_in.kernel_dim) {
        res.rotation = std::move(rotation);
        res.q = std::move(q_rot);
    } else {
        res.rotation = identity;
        res.q = std::move(q_in);
        res.kept_input = true;
    }
    res.kernel_dim = res.q.kernel_dim;
    res.basis = rotate_blocks(dec, res.rotation);
    res.q.basis_hash = res.basis.hash();
    res.commuting_charges = std::move(selected);
    return res;
}

} // namespace qcb
