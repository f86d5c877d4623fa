#include "qcb/complexity.hpp"

#include "qcb/degenerate.hpp"
#include "qcb/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace qcb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(std::string(name) + ": " + e.what());
    } catch (const ResourceError& e) {
        throw ResourceError(std::string(name) + ": " + e.what());
    }
}

template <class F>
void parallel_chunks(std::size_t n, int threads, F&& f) {
    const std::size_t T = std::max<std::size_t>(1, std::min<std::size_t>(threads > 0 ? threads : 1, n));
    if (T == 1) {
        f(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(T);
    const std::size_t chunk = (n + T - 1) / T;
    for (std::size_t w = 0; w < T; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        pool.emplace_back([&, w, b, e] {
            try {
                if (b < e) f(b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

void CurveConfig::validate() const {
    if (!(t_start > 0.0)) throw ConfigError("curve.t_start must be positive");
    if (!(t_end > t_start)) throw ConfigError("curve.t_end must exceed curve.t_start");
    if (!(dt > 0.0)) throw ConfigError("curve.dt must be positive");
    if ((t_end - t_start) / dt > 1e7) throw ResourceError("curve: more than 1e7 time samples");
    if (mu > 0.0 && mu < 1.0) throw ConfigError("curve.mu must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

Threshold convention_threshold(Convention c, int k, int L) {
    if (c == Convention::T2) return Threshold{k, std::max(k, std::min(6, L)), 0};
    if (c == Convention::FirstN) return Threshold{L, L, 0};
    return Threshold{k, k, 0};
}

std::vector<double> time_grid(const CurveConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(std::floor((cfg.t_end - cfg.t_start) / cfg.dt + 1e-9)) + 1;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = cfg.t_start + static_cast<double>(i) * cfg.dt;
    return t;
}

VectorXd reduced_phases(const VectorXd& E, double t) {
    VectorXd x(E.size());
    for (Index n = 0; n < E.size(); ++n) {
        const double p = E(n) * t;
        x(n) = p - kTwoPi * std::round(p / kTwoPi);
    }
    return x;
}

double biinvariant_at(const VectorXd& E, double t) { return reduced_phases(E, t).norm(); }

double linear_slope(const LatticeContext& ctx, const VectorXd& E) { return ctx.to_embedded(E).norm(); }

double bounded_at(const LatticeContext& ctx, const VectorXd& E, double t, bool clip) {
    const VectorXd y = ctx.to_embedded(reduced_phases(E, t));
    CvpSolution s = greedy_refine(ctx, babai_nearest_plane(ctx, y), y);
    double v = s.value;
    if (clip) v = std::min(v, t * linear_slope(ctx, E));
    return v;
}

double first_crossing(const VectorXd& E) {
    const double m = E.cwiseAbs().maxCoeff();
    return m > 0 ? std::numbers::pi / m : std::numeric_limits<double>::infinity();
}

PlateauStats plateau_sample(const std::vector<double>& v) {
    PlateauStats s;
    s.n = v.size();
    if (v.empty()) return s;
    auto mean_of = [](auto b, auto e) {
        double acc = 0.0;
        for (auto it = b; it != e; ++it) acc += *it;
        return acc / static_cast<double>(std::distance(b, e));
    };
    s.mean = mean_of(v.begin(), v.end());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    s.se = s.std / std::sqrt(static_cast<double>(v.size()));
    if (v.size() >= 2) {
        const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
        s.first_half = mean_of(v.begin(), mid);
        s.second_half = mean_of(mid, v.end());
        const double ref = std::max(std::abs(s.mean), 1e-300);
        s.half_rel_diff = std::abs(s.first_half - s.second_half) / ref;
    } else {
        s.first_half = s.second_half = s.mean;
    }
    s.stable = s.half_rel_diff <= 0.05;
    s.nonstationary = s.half_rel_diff > 0.10;
    return s;
}

ComplexityCurve compute_curve(const LatticeContext& ctx, const VectorXd& E, const CurveConfig& cfg) {
    ComplexityCurve c;
    c.times = time_grid(cfg);
    const std::size_t n = c.times.size();
    c.bound.assign(n, 0.0);
    c.biinv.assign(n, 0.0);
    parallel_chunks(n, cfg.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            c.bound[i] = bounded_at(ctx, E, c.times[i], cfg.clip_to_linear);
            c.biinv[i] = biinvariant_at(E, c.times[i]);
        }
    });
    c.plateau = plateau_sample(c.bound);
    c.biinv_plateau = plateau_sample(c.biinv);
    c.estimate_gso = plateau_estimate(ctx);
    return c;
}

ExperimentResult prepare_q(const ExperimentConfig& cfg) {
    ExperimentResult r;
    r.model = cfg.model;
    stage("model", [&] { cfg.model.validate(); });
    const MatrixXc H = stage("model", [&] { return build_hamiltonian(cfg.model); });
    const auto nh = stage("normalize", [&] { return normalize_hamiltonian(H); });
    r.scale = nh.scale;
    SpectralDecomposition dec =
        stage("diagonalize", [&] { return diagonalize(nh.H, cfg.degeneracy_tol, true); });
    dec = stage("presplit", [&] {
        const auto kinds = cfg.presplit ? *cfg.presplit : default_presplit(cfg.model);
        std::vector<MatrixXc> ops;
        for (auto k : kinds) ops.push_back(symmetry_operator(cfg.model, k));
        return presplit(dec, ops, cfg.commute_tol);
    });
    r.gens = stage("generators", [&] {
        return build_generator_set(cfg.model.L, cfg.model.spin(), cfg.threshold, cfg.convention, cfg.gen_options);
    });
    const GeneratorSet& gens = r.gens;
    r.n_loc = gens.n_loc();
    r.gens_hash = gens.hash();
    const bool degenerate = dec.max_block() > 1;
    if (cfg.use_preferred_basis && degenerate) {
        auto pb = stage("preferred_basis", [&] { return preferred_basis(dec, gens, cfg.kernel_tol, cfg.commute_tol); });
        r.basis = std::move(pb.basis);
        r.q = std::move(pb.q);
        r.input_kernel_dim = pb.input_kernel_dim;
    } else {
        r.basis = std::move(dec);
        r.q = stage("qmatrix", [&] { return build_q(r.basis, gens, cfg.kernel_tol); });
        r.input_kernel_dim = r.q.kernel_dim;
    }
    r.q.gens_hash = r.gens_hash;
    r.q.basis_hash = r.basis.hash();
    r.mu = cfg.curve.mu > 0.0 ? cfg.curve.mu : static_cast<double>(r.basis.dim());
    return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    stage("config", [&] { cfg.curve.validate(); });
    ExperimentResult r = prepare_q(cfg);
    r.lattice = stage("embed", [&] { return embed(r.q.matrix, r.mu); });
    r.lll = stage("lll", [&] { return lll_reduce(r.lattice, cfg.lll_delta); });
    if (cfg.compute_curve) {
        r.curve = stage("curve", [&] { return compute_curve(r.lattice, r.basis.energies, cfg.curve); });
    } else {
        r.curve.estimate_gso = plateau_estimate(r.lattice);
    }
    r.curve.mu = r.mu;
    r.curve.estimate_mean = plateau_from_mean(r.q.mean, r.mu, static_cast<double>(r.basis.dim()));
    return r;
}

} // namespace qcb
