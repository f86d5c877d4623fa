#include "qcb/lattice.hpp"

#include "qcb/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace qcb {

namespace {

constexpr std::size_t kRefreshSwaps = 64;
constexpr double kBoxBudget = 1e8;

std::int64_t round_i64(double x) {
    if (!std::isfinite(x) || std::abs(x) > 9e18) throw NumericError("lattice coordinate overflow");
    return static_cast<std::int64_t>(std::round(x));
}

void init_context(LatticeContext& ctx, const MatrixXd& initial) {
    ctx.dim = initial.cols();
    ctx.initial = initial;
    ctx.basis = initial;
    ctx.transform = MatrixXi64::Identity(ctx.dim, ctx.dim);
    ctx.gram = initial.transpose() * initial;
    gram_schmidt(ctx);
}

} // namespace

LatticeContext embed(const MatrixXd& Q, double mu) {
    if (!(mu >= 1.0)) throw ConfigError("embed: mu must be >= 1");
    if (Q.rows() != Q.cols() || Q.rows() == 0) throw ConfigError("embed: Q must be square and nonempty");
    const Index D = Q.rows();
    LatticeContext ctx;
    ctx.scale = 2.0 * std::numbers::pi;
    ctx.metric = MatrixXd::Identity(D, D) + (mu - 1.0) * 0.5 * (Q + Q.transpose());
    Eigen::LLT<MatrixXd> llt(ctx.metric);
    if (llt.info() != Eigen::Success) throw NumericError("embed: metric is not positive definite");
    ctx.factor = llt.matrixU();
    ctx.initial_upper = true;
    init_context(ctx, ctx.scale * ctx.factor);
    return ctx;
}

LatticeContext embed(const QMatrix& Q, double mu) { return embed(Q.matrix, mu); }

LatticeContext from_basis(const MatrixXd& basis) {
    if (basis.rows() != basis.cols() || basis.rows() == 0) throw ConfigError("from_basis: basis must be square");
    LatticeContext ctx;
    ctx.scale = 1.0;
    ctx.factor = basis;
    ctx.metric = basis.transpose() * basis;
    ctx.initial_upper = basis.isUpperTriangular(0.0);
    init_context(ctx, basis);
    return ctx;
}

void gram_schmidt(LatticeContext& ctx) {
    const Index D = ctx.dim;
    ctx.gso = ctx.basis;
    ctx.gso_sq.resize(D);
    ctx.mu = MatrixXd::Identity(D, D);
    for (Index i = 0; i < D; ++i) {
        for (Index j = 0; j < i; ++j) {
            double m = ctx.basis.col(i).dot(ctx.gso.col(j)) / ctx.gso_sq(j);
            ctx.mu(i, j) = m;
            ctx.gso.col(i) -= m * ctx.gso.col(j);
        }
        ctx.gso_sq(i) = ctx.gso.col(i).squaredNorm();
        double ref = ctx.basis.col(i).squaredNorm();
        if (!(ctx.gso_sq(i) > 1e-24 * std::max(ref, 1e-300)))
            throw NumericError("gram_schmidt: basis is rank deficient");
    }
}

LllReport lll_reduce(LatticeContext& ctx, double delta, std::size_t max_iterations) {
    if (!(delta > 0.25 && delta < 1.0)) throw ConfigError("lll_reduce: delta must lie in (0.25, 1)");
    const Index n = ctx.dim;
    LllReport rep;
    if (max_iterations == 0) max_iterations = 1000000 + 200 * static_cast<std::size_t>(n * n);
    gram_schmidt(ctx);
    MatrixXd& B = ctx.basis;
    MatrixXd& mu = ctx.mu;
    VectorXd& Bs = ctx.gso_sq;
    std::size_t since_refresh = 0;

    auto size_reduce = [&](Index k, Index j) {
        double r = std::round(mu(k, j));
        if (r == 0.0) return;
        const std::int64_t q = round_i64(r);
        B.col(k) -= r * B.col(j);
        ctx.transform.col(k) -= q * ctx.transform.col(j);
        for (Index l = 0; l < j; ++l) mu(k, l) -= r * mu(j, l);
        mu(k, j) -= r;
    };

    Index k = 1;
    while (k < n) {
        if (++rep.iterations > max_iterations) {
            rep.converged = false;
            break;
        }
        for (Index j = k - 1; j >= 0; --j) size_reduce(k, j);
        const double m = mu(k, k - 1);
        if (Bs(k) >= (delta - m * m) * Bs(k - 1)) {
            ++k;
            continue;
        }
        // swap b_k and b_{k-1}, update GSO data in place
        B.col(k).swap(B.col(k - 1));
        ctx.transform.col(k).swap(ctx.transform.col(k - 1));
        for (Index j = 0; j < k - 1; ++j) std::swap(mu(k, j), mu(k - 1, j));
        const double Bnew = Bs(k) + m * m * Bs(k - 1);
        const double mnew = m * Bs(k - 1) / Bnew;
        Bs(k) = Bs(k - 1) * Bs(k) / Bnew;
        Bs(k - 1) = Bnew;
        mu(k, k - 1) = mnew;
        for (Index i = k + 1; i < n; ++i) {
            const double t = mu(i, k);
            mu(i, k) = mu(i, k - 1) - m * t;
            mu(i, k - 1) = t + mnew * mu(i, k);
        }
        ++rep.swaps;
        if (++since_refresh >= kRefreshSwaps) {
            gram_schmidt(ctx);
            since_refresh = 0;
        }
        k = std::max<Index>(k - 1, 1);
    }
    gram_schmidt(ctx);
    ctx.gram = B.transpose() * B;
    ctx.reduced = rep.converged;
    return rep;
}

double size_reduction_violation(const LatticeContext& ctx) {
    double worst = -0.5;
    for (Index i = 0; i < ctx.dim; ++i)
        for (Index j = 0; j < i; ++j) worst = std::max(worst, std::abs(ctx.mu(i, j)) - 0.5);
    return worst;
}

double lovasz_violation(const LatticeContext& ctx, double delta) {
    double worst = -std::numeric_limits<double>::infinity();
    for (Index k = 1; k < ctx.dim; ++k) {
        double m = ctx.mu(k, k - 1);
        double lhs = ctx.gso_sq(k);
        double rhs = (delta - m * m) * ctx.gso_sq(k - 1);
        worst = std::max(worst, (rhs - lhs) / std::max(ctx.gso_sq(k - 1), 1e-300));
    }
    return ctx.dim > 1 ? worst : -1.0;
}

std::string to_string(CvpMethod m) {
    switch (m) {
    case CvpMethod::Rounding: return "rounding";
    case CvpMethod::Babai: return "babai";
    case CvpMethod::BabaiGreedy: return "babai+greedy";
    case CvpMethod::Brute: return "brute";
    }
    return "?";
}

double lattice_distance(const LatticeContext& ctx, const VectorXd& y, const VectorXi64& k) {
    return (y - ctx.initial * k.cast<double>()).norm();
}

VectorXd standard_coordinates(const LatticeContext& ctx, const VectorXd& y) {
    if (ctx.initial_upper) return ctx.initial.triangularView<Eigen::Upper>().solve(y);
    return ctx.initial.partialPivLu().solve(y);
}

CvpSolution round_cvp(const LatticeContext& ctx, const VectorXd& y) {
    VectorXd z = standard_coordinates(ctx, y);
    CvpSolution s;
    s.method = CvpMethod::Rounding;
    s.k.resize(ctx.dim);
    for (Index i = 0; i < ctx.dim; ++i) s.k(i) = round_i64(z(i));
    s.value = lattice_distance(ctx, y, s.k);
    return s;
}

CvpSolution babai_nearest_plane(const LatticeContext& ctx, const VectorXd& y) {
    const Index n = ctx.dim;
    // coordinates of y along the Gram-Schmidt directions
    VectorXd t(n);
    for (Index i = 0; i < n; ++i) t(i) = y.dot(ctx.gso.col(i)) / ctx.gso_sq(i);
    VectorXi64 c(n);
    for (Index i = n - 1; i >= 0; --i) {
        const double r = std::round(t(i));
        c(i) = round_i64(r);
        // subtract r * b_i = r * (b_i^* + sum_{j<i} mu_ij b_j^*)
        t(i) -= r;
        for (Index j = 0; j < i; ++j) t(j) -= r * ctx.mu(i, j);
    }
    CvpSolution s;
    s.method = CvpMethod::Babai;
    s.coeffs = c;
    s.k = ctx.transform * c;
    s.value = (y - ctx.basis * c.cast<double>()).norm();
    return s;
}

CvpSolution greedy_refine(const LatticeContext& ctx, const CvpSolution& sol, const VectorXd& y,
                          std::size_t max_steps) {
    const Index n = ctx.dim;
    CvpSolution out = sol;
    out.method = CvpMethod::BabaiGreedy;
    VectorXi64 c = sol.coeffs.size() == n ? sol.coeffs
                                          : VectorXi64(ctx.transform.cast<double>()
                                                           .partialPivLu()
                                                           .solve(sol.k.cast<double>())
                                                           .array()
                                                           .round()
                                                           .cast<std::int64_t>());
    VectorXd r = y - ctx.basis * c.cast<double>();
    VectorXd p = ctx.basis.transpose() * r;  // <r, b_i>
    double r2 = r.squaredNorm();
    if (max_steps == 0) max_steps = 100 * static_cast<std::size_t>(n) + 1000;
    for (std::size_t step = 0; step < max_steps; ++step) {
        double best_gain = 0.0;
        Index best_i = -1;
        double best_s = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double g = ctx.gram(i, i);
            const double s = std::round(p(i) / g);
            if (s == 0.0) continue;
            const double gain = 2.0 * s * p(i) - s * s * g;
            if (gain > best_gain) {
                best_gain = gain;
                best_i = i;
                best_s = s;
            }
        }
        if (best_i < 0 || best_gain <= 1e-12 * std::max(r2, 1e-300)) break;
        c(best_i) += round_i64(best_s);
        r -= best_s * ctx.basis.col(best_i);
        p -= best_s * ctx.gram.col(best_i);
        r2 = r.squaredNorm();
    }
    out.coeffs = c;
    out.k = ctx.transform * c;
    out.value = (y - ctx.basis * c.cast<double>()).norm();
    if (out.value > sol.value) {  // guard against round-off; never worse than the input
        out.coeffs = sol.coeffs;
        out.k = sol.k;
        out.value = sol.value;
    }
    return out;
}

int safe_box_radius(const LatticeContext& ctx, double R) {
    Eigen::JacobiSVD<MatrixXd> svd(ctx.initial);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 0)) throw NumericError("safe_box_radius: singular basis");
    double K = std::ceil(R / smin) + 1.0;
    K = std::max(K, std::ceil(R / std::sqrt(ctx.gso_sq.minCoeff())) + 1.0);
    if (K > 1e6) throw ResourceError("brute force box too large");
    return static_cast<int>(K);
}

CvpSolution brute_force_cvp(const LatticeContext& ctx, const VectorXd& y, int K) {
    const Index n = ctx.dim;
    if (n > 8) throw ConfigError("brute_force_cvp: dimension above 8");
    if (K < 0) throw ConfigError("brute_force_cvp: negative box");
    if (std::pow(2.0 * K + 1.0, static_cast<double>(n)) > kBoxBudget)
        throw ResourceError("brute_force_cvp: box exceeds the enumeration budget");
    // ||y - B0 k|| = ||Q^T y - R k|| with B0 = Q R; enumerate from the last coordinate.
    Eigen::HouseholderQR<MatrixXd> qr(ctx.initial);
    MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    VectorXd z = qr.householderQ().transpose() * y;
    VectorXd zs = standard_coordinates(ctx, y);
    VectorXi64 center(n);
    for (Index i = 0; i < n; ++i) center(i) = round_i64(zs(i));

    VectorXi64 k(n), best_k = center;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> partial(n + 1, 0.0);
    // depth-first over i = n-1 .. 0
    std::function<void(Index)> rec = [&](Index i) {
        for (std::int64_t v = center(i) - K; v <= center(i) + K; ++v) {
            k(i) = v;
            double s = z(i);
            for (Index j = i; j < n; ++j) s -= R(i, j) * static_cast<double>(k(j));
            const double acc = partial[i + 1] + s * s;
            if (acc >= best) continue;
            if (i == 0) {
                best = acc;
                best_k = k;
            } else {
                partial[i] = acc;
                rec(i - 1);
            }
        }
    };
    rec(n - 1);
    CvpSolution s;
    s.method = CvpMethod::Brute;
    s.k = best_k;
    s.value = lattice_distance(ctx, y, best_k);
    return s;
}

double covering_radius_bound(const LatticeContext& ctx) { return 0.5 * std::sqrt(ctx.gso_sq.sum()); }

double plateau_estimate(const LatticeContext& ctx) {
    return std::numbers::pi / std::sqrt(3.0) * std::sqrt(ctx.gso_sq.sum()) / ctx.scale;
}

std::string lattice_dump_csv(const LatticeContext& ctx) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "i,basis_norm,gso_norm\n";
    for (Index i = 0; i < ctx.dim; ++i)
        os << i << ',' << ctx.basis.col(i).norm() << ',' << std::sqrt(ctx.gso_sq(i)) << '\n';
    return os.str();
}

CvpBenchResult run_cvp_bench(const std::vector<int>& dims, std::size_t instances, double mu, std::uint64_t seed,
                             double ratio_threshold, double lll_delta) {
    if (dims.empty()) throw ConfigError("cvpbench: empty dimension list");
    for (int d : dims)
        if (d < 1 || d > 8) throw ConfigError("cvpbench: dimension " + std::to_string(d) + " outside [1, 8]");
    CvpBenchResult res;
    res.ratio_threshold = ratio_threshold;
    for (std::size_t t = 0; t < instances; ++t) {
        const int D = dims[t % dims.size()];
        auto rng = make_stream(seed, t);
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        MatrixXd A(D, D);
        for (Index j = 0; j < D; ++j)
            for (Index i = 0; i < D; ++i) A(i, j) = nd(rng);
        Eigen::HouseholderQR<MatrixXd> qr(A);
        MatrixXd O = qr.householderQ();
        VectorXd lam(D);
        for (Index i = 0; i < D; ++i) lam(i) = ud(rng);
        VectorXd x(D);
        for (Index i = 0; i < D; ++i) x(i) = 2.0 * std::numbers::pi * (ud(rng) - 0.5);
        LatticeContext ctx = embed(MatrixXd(O * lam.asDiagonal() * O.transpose()), mu);
        lll_reduce(ctx, lll_delta);
        const VectorXd y = ctx.to_embedded(x);
        const CvpSolution r = round_cvp(ctx, y);
        const CvpSolution b = babai_nearest_plane(ctx, y);
        const CvpSolution g = greedy_refine(ctx, b, y);
        const int K = safe_box_radius(ctx, std::min(g.value, r.value));
        const CvpSolution br = brute_force_cvp(ctx, y, K);
        CvpBenchRow row{t, D, r.value, b.value, g.value, br.value, K, br.value > 0 ? g.value / br.value : 1.0};
        const double eps = 1e-9 * std::max(1.0, r.value);
        if (r.value < b.value - eps) ++res.violations_rounding_babai;
        if (b.value < g.value - eps) ++res.violations_babai_greedy;
        if (g.value < br.value - eps) ++res.violations_greedy_brute;
        if (row.ratio <= ratio_threshold) ++res.within_ratio;
        res.rows.push_back(row);
    }
    return res;
}

} // namespace qcb
