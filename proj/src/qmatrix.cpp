#include "qcb/qmatrix.hpp"

#include <algorithm>
#include <cmath>

namespace qcb {

MatrixXd diagonal_expectations(const MatrixXc& vectors, const GeneratorSet& gens) {
    const Index D = vectors.rows();
    if (static_cast<std::uint64_t>(D) != gens.dimension())
        throw ConfigError("generator set dimension does not match the basis");
    const Index n = vectors.cols();
    const Index rows = static_cast<Index>(gens.n_loc());
    MatrixXd M(rows, n);
    Index r = 0;
    if (gens.options.identity_easy) M.row(r++).setConstant(1.0 / std::sqrt(static_cast<double>(D)));
    MatrixXc TV;
    for (const auto& d : gens.easy) {
        apply_generator(d, gens.L, gens.site, vectors, TV);
        M.row(r++) = (vectors.conjugate().cwiseProduct(TV)).colwise().sum().real();
    }
    return M;
}

QMatrix finalize_q(MatrixXd q, double kernel_tol) {
    QMatrix out;
    q = 0.5 * (q + q.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
    if (es.info() != Eigen::Success) throw NumericError("Q-matrix eigensolver failed");
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors();
    out.kernel_tol = kernel_tol;
    out.kernel_dim = static_cast<int>((out.eigenvalues.array() < kernel_tol).count());
    Moments m = q_moments(q);
    out.mean = m.mean;
    out.variance = m.variance;
    out.matrix = std::move(q);
    return out;
}

QMatrix build_q(const SpectralDecomposition& basis, const GeneratorSet& gens, double kernel_tol) {
    const Index D = basis.dim();
    MatrixXd q = MatrixXd::Identity(D, D);
    if (gens.n_loc() > 0) {
        MatrixXd M = diagonal_expectations(basis.vectors, gens);
        q.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose(), -1.0);
        q = q.selfadjointView<Eigen::Lower>();
    }
    QMatrix out = finalize_q(std::move(q), kernel_tol);
    out.basis_hash = basis.hash();
    out.gens_hash = gens.hash();
    return out;
}

std::vector<VectorXd> q_kernel(const QMatrix& q, double tol) {
    std::vector<VectorXd> k;
    for (Index i = 0; i < q.eigenvalues.size(); ++i)
        if (q.eigenvalues(i) < tol) k.push_back(q.eigenvectors.col(i));
    return k;
}

Moments q_moments(const MatrixXd& q) {
    const double D = static_cast<double>(q.rows());
    Moments m;
    m.mean = q.trace() / D;
    m.variance = q.squaredNorm() / D - m.mean * m.mean;  // Tr(Q^2) = ||Q||_F^2 for symmetric Q
    return m;
}

std::vector<ConservedLaw> extract_conserved_laws(const QMatrix& q, const SpectralDecomposition& basis,
                                                 const GeneratorSet& gens, const MatrixXc* H) {
    std::vector<ConservedLaw> laws;
    auto kernel = q_kernel(q, q.kernel_tol);
    if (kernel.empty()) return laws;
    MatrixXd M = diagonal_expectations(basis.vectors, gens);
    MatrixXc Hlocal;
    if (!H) {
        Hlocal = basis.hamiltonian();
        H = &Hlocal;
    }
    const double hn = H->norm();
    for (const auto& c : kernel) {
        ConservedLaw law;
        law.coefficients = c;
        law.easy_coefficients = M * c;
        MatrixXc O = basis.vectors * c.cast<cplx>().asDiagonal() * basis.vectors.adjoint();
        MatrixXc comm = (*H) * O - O * (*H);
        double on = O.norm();
        law.commutator_residual = (hn > 0 && on > 0) ? comm.norm() / (hn * on) : 0.0;
        law.quadratic_form = c.dot(q.matrix * c);
        laws.push_back(std::move(law));
    }
    return laws;
}

int rank_oracle(const SpectralDecomposition& basis, const GeneratorSet& gens, double tol) {
    if (gens.n_loc() == 0) return 0;
    MatrixXd M = diagonal_expectations(basis.vectors, gens);
    Eigen::BDCSVD<MatrixXd> svd(M);
    const VectorXd& s = svd.singularValues();
    int count = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (1.0 - s(i) * s(i) < tol) ++count;
    return count;
}

Histogram q_histogram(const VectorXd& eigenvalues, int bins, double lo, double hi) {
    if (bins < 1 || !(hi > lo)) throw ConfigError("histogram needs bins >= 1 and hi > lo");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        double x = std::clamp(eigenvalues(i), lo, hi);
        int b = static_cast<int>((x - lo) / (hi - lo) * bins);
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

} // namespace qcb
