#include "qcb/rmt.hpp"

#include "qcb/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace qcb {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string i128_str(__int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    std::string s;
    while (v != 0) {
        int digit = static_cast<int>(v % 10);
        s.push_back(static_cast<char>('0' + (digit < 0 ? -digit : digit)));
        v /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

struct Accumulator {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

MonteCarloValue judge(std::string label, double predicted, const Accumulator& re, const Accumulator& im) {
    MonteCarloValue v;
    v.label = std::move(label);
    v.predicted = predicted;
    v.mean = re.mean();
    v.se = re.se();
    v.imag_mean = im.mean();
    v.imag_se = im.se();
    const double tol_re = 3.0 * v.se + 1e-15;
    const double tol_im = 3.0 * v.imag_se + 1e-15;
    v.pass = std::abs(v.mean - predicted) <= tol_re && std::abs(v.imag_mean) <= tol_im;
    return v;
}

nlohmann::json mc_json(const MonteCarloValue& v) {
    return {{"label", v.label}, {"predicted", v.predicted}, {"mean", v.mean}, {"se", v.se},
            {"imag_mean", v.imag_mean}, {"imag_se", v.imag_se}, {"pass", v.pass}};
}

} // namespace

RmtPrediction RmtPrediction::make(double D, double n_loc, bool identity_easy) {
    if (!(D >= 1.0) || n_loc < 0.0) throw ConfigError("rmt prediction: need D >= 1 and N_loc >= 0");
    RmtPrediction p;
    p.D = D;
    p.n_loc = n_loc;
    p.r = n_loc / (D * D);
    p.mean_pred = 1.0 - p.r - (identity_easy ? 1.0 / D : 0.0);
    p.var_pred = n_loc / (D * D * D);
    p.var_of_mean_pred = 2.0 * n_loc / std::pow(D, 5) + 2.0 * n_loc * n_loc / std::pow(D, 6);
    return p;
}

nlohmann::json RmtPrediction::to_json() const {
    return {{"D", D}, {"N_loc", n_loc}, {"r", r}, {"mean_pred", mean_pred}, {"var_pred", var_pred},
            {"var_of_mean_pred", var_of_mean_pred}};
}

double plateau_from_mean(double lambda_bar, double mu, double D) {
    if (lambda_bar < 0.0 || mu < 1.0 || D < 1.0) throw ConfigError("plateau_from_mean: invalid arguments");
    return std::numbers::pi * std::sqrt(D * mu * lambda_bar / 3.0);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

MatrixXc haar_unitary(Index D, std::mt19937_64& rng) {
    if (D < 1) throw ConfigError("haar_unitary: D must be >= 1");
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    MatrixXc Z(D, D);
    for (Index j = 0; j < D; ++j)
        for (Index i = 0; i < D; ++i) Z(i, j) = cplx(nd(rng), nd(rng));
    Eigen::HouseholderQR<MatrixXc> qr(Z);
    MatrixXc Q = qr.householderQ();
    const auto& R = qr.matrixQR();
    for (Index j = 0; j < D; ++j) {
        const cplx r = R(j, j);
        const double a = std::abs(r);
        Q.col(j) *= a > 0 ? r / a : cplx(1.0);
    }
    return Q;
}

MatrixXc haar_unitary(Index D, std::uint64_t seed) {
    auto rng = make_stream(seed, 0);
    return haar_unitary(D, rng);
}

Rational make_rational(__int128 num, __int128 den) {
    if (den == 0) throw NumericError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

std::string Rational::str() const { return den == 1 ? i128_str(num) : i128_str(num) + "/" + i128_str(den); }

Rational weingarten(std::vector<int> ct, std::int64_t D) {
    std::sort(ct.begin(), ct.end());
    if (D < 1 || D > 100000) throw ConfigError("weingarten: D out of range");
    const __int128 d = D, d2 = d * d;
    const int n = std::accumulate(ct.begin(), ct.end(), 0);
    if (n == 2) {
        if (D < 2) throw NumericError("weingarten: pole at D = 1");
        if (ct == std::vector<int>{1, 1}) return make_rational(1, d2 - 1);
        if (ct == std::vector<int>{2}) return make_rational(-1, d * (d2 - 1));
    } else if (n == 4) {
        if (D <= 3) throw NumericError("weingarten: degree-4 forms have poles at D <= 3");
        const __int128 p = -36 + 49 * d2 - 14 * d2 * d2 + d2 * d2 * d2;
        if (ct == std::vector<int>{1, 1, 1, 1}) return make_rational(6 - 8 * d2 + d2 * d2, d2 * p);
        if (ct == std::vector<int>{1, 1, 2}) return make_rational(-1, 9 * d - 10 * d2 * d + d2 * d2 * d);
        if (ct == std::vector<int>{2, 2}) return make_rational(6 + d2, d2 * p);
        if (ct == std::vector<int>{1, 3}) return make_rational(-3 + 2 * d2, d2 * p);
        // A 4-cycle is an odd permutation, so the value is negative (the sum over S_4 fixes the sign).
        if (ct == std::vector<int>{4}) return make_rational(-5, d * p);
    }
    throw ConfigError("weingarten: unsupported cycle type");
}

nlohmann::json FourPointReport::to_json() const {
    nlohmann::json j = {{"D", D}, {"n_samples", n_samples}, {"pass", pass}};
    j["patterns"] = nlohmann::json::array();
    for (const auto& p : patterns) j["patterns"].push_back(mc_json(p));
    return j;
}

FourPointReport four_point_check(Index D, std::size_t n_samples, std::uint64_t seed) {
    if (D < 2) throw ConfigError("four_point_check: D must be >= 2");
    if (n_samples < 2) throw ConfigError("four_point_check: need at least 2 samples");
    struct Pattern {
        std::string label;
        Index i, j, k, l;
    };
    std::vector<Pattern> pats{
        {"i=j=k=l", 0, 0, 0, 0},
        {"i=j,k=l", 0, 0, 1, 1},
        {"i=l,k=j", 0, 1, 1, 0},
        {"non-matching", 0, 1, 0, 0},
    };
    std::vector<Accumulator> re(pats.size()), im(pats.size());
    auto rng = make_stream(seed, 0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const MatrixXc U = haar_unitary(D, rng);
        // average over the columns n of one sample; columns are exchangeable
        for (std::size_t p = 0; p < pats.size(); ++p) {
            cplx acc = 0.0;
            for (Index n = 0; n < D; ++n) {
                const auto& pt = pats[p];
                acc += std::conj(U(pt.i, n)) * std::conj(U(pt.k, n)) * U(pt.j, n) * U(pt.l, n);
            }
            acc /= static_cast<double>(D);
            re[p].add(acc.real());
            im[p].add(acc.imag());
        }
    }
    FourPointReport rep;
    rep.D = D;
    rep.n_samples = n_samples;
    rep.pass = true;
    const double norm = 1.0 / (static_cast<double>(D) * static_cast<double>(D + 1));
    for (std::size_t p = 0; p < pats.size(); ++p) {
        const auto& pt = pats[p];
        const double pred = ((pt.i == pt.j && pt.k == pt.l) + (pt.i == pt.l && pt.k == pt.j)) * norm;
        rep.patterns.push_back(judge(pats[p].label, pred, re[p], im[p]));
        rep.pass = rep.pass && rep.patterns.back().pass;
    }
    return rep;
}

FourPointReport two_point_check(Index D, std::size_t n_samples, std::uint64_t seed) {
    if (D < 2) throw ConfigError("two_point_check: D must be >= 2");
    Accumulator diag_re, diag_im, off_re, off_im, cross_re, cross_im;
    auto rng = make_stream(seed, 1);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const MatrixXc U = haar_unitary(D, rng);
        diag_re.add(std::norm(U(0, 0)));
        diag_im.add(0.0);
        const cplx off = std::conj(U(0, 0)) * U(1, 0);  // i != j, same column
        off_re.add(off.real());
        off_im.add(off.imag());
        const cplx cross = std::conj(U(0, 0)) * U(0, 1);  // same row, n != m
        cross_re.add(cross.real());
        cross_im.add(cross.imag());
    }
    FourPointReport rep;
    rep.D = D;
    rep.n_samples = n_samples;
    rep.patterns.push_back(judge("i=j,n=m", 1.0 / static_cast<double>(D), diag_re, diag_im));
    rep.patterns.push_back(judge("i!=j", 0.0, off_re, off_im));
    rep.patterns.push_back(judge("n!=m", 0.0, cross_re, cross_im));
    rep.pass = std::all_of(rep.patterns.begin(), rep.patterns.end(), [](const auto& p) { return p.pass; });
    return rep;
}

nlohmann::json MomentReport::to_json() const {
    return {{"prediction", prediction.to_json()},
            {"trials", trials},
            {"lambda_bar", lambda_bar},
            {"lambda_var", lambda_var},
            {"mean_lambda_bar", mean_lambda_bar},
            {"var_lambda_bar", var_lambda_bar},
            {"mean_lambda_var", mean_lambda_var},
            {"mean_deviation_sd", mean_deviation_sd},
            {"var_ratio", var_ratio},
            {"var_of_mean_ratio", var_of_mean_ratio},
            {"pass_mean", pass_mean},
            {"pass_var", pass_var},
            {"connected_trace_max", connected_trace_max},
            {"connected_traces_suppressed", connected_traces_suppressed}};
}

double connected_trace_max(const GeneratorSet& gens, std::size_t max_pairs) {
    const std::size_t N = gens.easy.size();
    if (N == 0) return 0.0;
    const double D = static_cast<double>(gens.dimension());
    double worst = 0.0;
    const std::size_t pairs = std::min(max_pairs, N * N);
    for (std::size_t p = 0; p < pairs; ++p) {
        // spread the sample over the generator list, diagonal pairs included
        const std::size_t a = (p * 7919) % N, b = (p * 104729 + p / N) % N;
        const MatrixXc A = materialize(gens.easy[a], gens.L, gens.site);
        const MatrixXc B = materialize(gens.easy[b], gens.L, gens.site);
        const MatrixXc A2 = A * A, B2 = B * B, AB = A * B;
        const cplx t1 = A2.cwiseProduct(B2.transpose()).sum();
        const cplx t2 = AB.cwiseProduct(AB.transpose()).sum();
        worst = std::max({worst, D * std::abs(t1), D * std::abs(t2)});
    }
    return worst;
}

MomentReport verify_moments(const GeneratorSet& gens, std::size_t n_trials, std::uint64_t seed, int threads) {
    if (n_trials < 2) throw ConfigError("verify_moments: need at least 2 trials");
    const auto D = static_cast<Index>(gens.dimension());
    MomentReport rep;
    rep.prediction = RmtPrediction::make(static_cast<double>(D), static_cast<double>(gens.easy.size()),
                                         gens.options.identity_easy);
    rep.trials = n_trials;
    rep.lambda_bar.assign(n_trials, 0.0);
    rep.lambda_var.assign(n_trials, 0.0);
    const std::size_t T = std::max<std::size_t>(1, std::min<std::size_t>(threads, n_trials));
    auto work = [&](std::size_t w) {
        for (std::size_t t = w; t < n_trials; t += T) {
            auto rng = make_stream(seed, t);
            const MatrixXc U = haar_unitary(D, rng);
            const MatrixXd M = diagonal_expectations(U, gens);
            const MatrixXd Q = MatrixXd::Identity(D, D) - M.transpose() * M;
            const Moments m = q_moments(Q);
            rep.lambda_bar[t] = m.mean;
            rep.lambda_var[t] = m.variance;
        }
    };
    if (T == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < T; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    const double n = static_cast<double>(n_trials);
    rep.mean_lambda_bar = std::accumulate(rep.lambda_bar.begin(), rep.lambda_bar.end(), 0.0) / n;
    rep.mean_lambda_var = std::accumulate(rep.lambda_var.begin(), rep.lambda_var.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : rep.lambda_bar) ss += (x - rep.mean_lambda_bar) * (x - rep.mean_lambda_bar);
    rep.var_lambda_bar = ss / (n - 1.0);
    const auto& p = rep.prediction;
    rep.mean_deviation_sd = std::abs(rep.mean_lambda_bar - p.mean_pred) / std::sqrt(p.var_of_mean_pred);
    rep.var_ratio = p.var_pred > 0 ? rep.mean_lambda_var / p.var_pred : 0.0;
    rep.var_of_mean_ratio = p.var_of_mean_pred > 0 ? rep.var_lambda_bar / p.var_of_mean_pred : 0.0;
    rep.pass_mean = rep.mean_deviation_sd < 5.0;
    rep.pass_var = rep.var_ratio >= 0.2 && rep.var_ratio <= 5.0;
    rep.connected_trace_max = connected_trace_max(gens);
    rep.connected_traces_suppressed = rep.connected_trace_max <= 10.0;
    return rep;
}

ConcentrationTrend concentration_trend(const std::vector<int>& Ls, double r, std::size_t n_trials,
                                       std::uint64_t seed, int threads) {
    if (Ls.size() < 2) throw ConfigError("concentration_trend: need at least two chain lengths");
    ConcentrationTrend out;
    for (int L : Ls) {
        const double D = std::pow(2.0, L);
        GeneratorSetOptions opt;
        opt.first_n = static_cast<std::size_t>(std::llround(r * D * D));
        if (opt.first_n < 1) throw ConfigError("concentration_trend: r too small for L = " + std::to_string(L));
        const GeneratorSet gens = build_generator_set(L, Spin::half(), Threshold{L, L, 0}, Convention::FirstN, opt);
        const MomentReport m = verify_moments(gens, n_trials, seed + static_cast<std::uint64_t>(L), threads);
        out.points.push_back({L, static_cast<std::size_t>(D), gens.easy.size(), m.mean_lambda_var});
    }
    // least-squares slope of log Var against log D
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(out.points.size());
    for (const auto& p : out.points) {
        const double x = std::log(static_cast<double>(p.D)), y = std::log(p.mean_lambda_var);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

} // namespace qcb
