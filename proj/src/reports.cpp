#include "qcb/reports.hpp"

#include "qcb/io.hpp"

#include <cmath>

namespace qcb {

namespace {

nlohmann::json threshold_json(const Threshold& t) { return {{"k_op", t.k_op}, {"k_sp", t.k_sp}, {"k_int", t.k_int}}; }

nlohmann::json plateau_json(const PlateauStats& p) {
    return {{"n", p.n},
            {"mean", p.mean},
            {"std", p.std},
            {"se", p.se},
            {"first_half", p.first_half},
            {"second_half", p.second_half},
            {"half_rel_diff", p.half_rel_diff},
            {"stable", p.stable},
            {"nonstationary", p.nonstationary}};
}

} // namespace

nlohmann::json curve_summary(const ExperimentResult& r, const ExperimentConfig& cfg, std::uint64_t config_hash) {
    const auto& c = r.curve;
    nlohmann::json j;
    j["config_hash"] = hex64(config_hash);
    j["model"] = r.model.to_json();
    j["thresholds"] = threshold_json(cfg.threshold);
    j["convention"] = to_string(cfg.convention);
    j["mu"] = r.mu;
    j["D"] = r.basis.dim();
    j["N_loc"] = r.n_loc;
    j["kernel_dim"] = r.q.kernel_dim;
    j["input_kernel_dim"] = r.input_kernel_dim;
    j["lambda_bar"] = r.q.mean;
    j["lambda_var"] = r.q.variance;
    j["C_sat"] = c.plateau.mean;
    j["C_sat_std"] = c.plateau.std;
    j["C_sat_se"] = c.plateau.se;
    j["C_est_gso"] = c.estimate_gso;
    j["C_est_mean"] = c.estimate_mean;
    j["C_biinv_sat"] = c.biinv_plateau.mean;
    j["plateau"] = plateau_json(c.plateau);
    j["window"] = {{"t_start", cfg.curve.t_start}, {"t_end", cfg.curve.t_end}, {"dt", cfg.curve.dt}};
    j["first_crossing"] = first_crossing(r.basis.energies);
    j["scale"] = r.scale;
    j["lll"] = {{"iterations", r.lll.iterations}, {"swaps", r.lll.swaps}, {"converged", r.lll.converged},
                {"delta", cfg.lll_delta}};
    j["basis_hash"] = hex64(r.q.basis_hash);
    j["gens_hash"] = hex64(r.gens_hash);
    if (c.plateau.nonstationary) j["warning"] = "plateau window is not stationary (halves differ by more than 10%)";
    return j;
}

std::string curve_csv(const ComplexityCurve& c, std::uint64_t config_hash) {
    CsvWriter w(config_hash);
    w.header({"t", "C_bound", "C_biinv"});
    for (std::size_t i = 0; i < c.times.size(); ++i) w.row(std::vector<double>{c.times[i], c.bound[i], c.biinv[i]});
    return w.str();
}

std::vector<QSpectrumEntry> qspectrum_sweep(const ExperimentConfig& base, const std::vector<int>& sweep, int bins,
                                            bool with_rank_oracle) {
    if (sweep.empty()) throw ConfigError("config key 'qspectrum.sweep': empty sweep list");
    std::vector<QSpectrumEntry> out;
    for (int k : sweep) {
        ExperimentConfig cfg = base;
        cfg.threshold = convention_threshold(base.convention, k, base.model.L);
        cfg.threshold.k_int = base.threshold.k_int;
        ExperimentResult r = prepare_q(cfg);
        QSpectrumEntry e;
        e.k = k;
        e.threshold = cfg.threshold;
        e.n_loc = r.n_loc;
        if (with_rank_oracle) e.rank_oracle_kernel = rank_oracle(r.basis, r.gens, cfg.kernel_tol);
        e.histogram = q_histogram(r.q.eigenvalues, bins);
        e.q = std::move(r.q);
        out.push_back(std::move(e));
    }
    return out;
}

std::string qspectrum_csv(const std::vector<QSpectrumEntry>& entries, std::uint64_t config_hash) {
    CsvWriter w(config_hash);
    w.header({"k", "index", "lambda"});
    for (const auto& e : entries)
        for (Index i = 0; i < e.q.eigenvalues.size(); ++i)
            w.row(std::vector<double>{double(e.k), double(i), e.q.eigenvalues(i)});
    return w.str();
}

std::string qhistogram_csv(const std::vector<QSpectrumEntry>& entries, std::uint64_t config_hash) {
    CsvWriter w(config_hash);
    w.header({"k", "bin_lo", "bin_hi", "count"});
    for (const auto& e : entries) {
        const auto& h = e.histogram;
        const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            w.row(std::vector<double>{double(e.k), h.lo + width * double(b), h.lo + width * double(b + 1),
                                      double(h.counts[b])});
    }
    return w.str();
}

nlohmann::json qspectrum_summary(const std::vector<QSpectrumEntry>& entries, const ExperimentConfig& base,
                                 std::uint64_t config_hash) {
    nlohmann::json j;
    j["config_hash"] = hex64(config_hash);
    j["model"] = base.model.to_json();
    j["convention"] = to_string(base.convention);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json row = {{"k", e.k},
                              {"thresholds", threshold_json(e.threshold)},
                              {"N_loc", e.n_loc},
                              {"kernel_dim", e.q.kernel_dim},
                              {"lambda_bar", e.q.mean},
                              {"lambda_var", e.q.variance}};
        if (e.rank_oracle_kernel >= 0) row["rank_oracle_kernel_dim"] = e.rank_oracle_kernel;
        rows.push_back(std::move(row));
    }
    j["sweep"] = std::move(rows);
    return j;
}

nlohmann::json ChargeReport::to_json(std::uint64_t config_hash) const {
    nlohmann::json j;
    j["config_hash"] = hex64(config_hash);
    j["kernel_dim"] = kernel_dim;
    j["N_loc"] = n_loc;
    bool h_in_span = false;
    for (const auto& r : references)
        if (r.label == "H") h_in_span = r.detected;
    j["nontrivial_laws"] = std::max(0, kernel_dim - (h_in_span ? 1 : 0));
    nlohmann::json ls = nlohmann::json::array();
    for (std::size_t i = 0; i < laws.size(); ++i) {
        const auto& l = laws[i];
        std::size_t terms = 0;
        for (Index a = 0; a < l.easy_coefficients.size(); ++a)
            if (std::abs(l.easy_coefficients(a)) > 1e-8) ++terms;
        ls.push_back({{"index", i},
                      {"commutator_residual", l.commutator_residual},
                      {"quadratic_form", l.quadratic_form},
                      {"easy_terms", terms},
                      {"energy_overlap", energy_overlap[i]}});
    }
    j["laws"] = std::move(ls);
    nlohmann::json refs = nlohmann::json::array();
    for (const auto& r : references)
        refs.push_back({{"label", r.label},
                        {"offdiag_residual", r.offdiag_residual},
                        {"projection_residual", r.projection_residual},
                        {"detected", r.detected}});
    j["references"] = std::move(refs);
    return j;
}

ChargeReport analyze_charges(const ExperimentConfig& cfg, int tower_size, double detect_tol) {
    ExperimentResult r = prepare_q(cfg);
    ChargeReport rep;
    rep.kernel_dim = r.q.kernel_dim;
    rep.n_loc = r.n_loc;
    rep.laws = extract_conserved_laws(r.q, r.basis, r.gens);
    const VectorXd& E = r.basis.energies;
    MatrixXd span(E.size(), static_cast<Index>(rep.laws.size()));
    for (std::size_t i = 0; i < rep.laws.size(); ++i) {
        const VectorXd& c = rep.laws[i].coefficients;
        rep.energy_overlap.push_back(std::abs(c.dot(E)) / (c.norm() * E.norm()));
        span.col(static_cast<Index>(i)) = c;
    }

    std::vector<std::pair<std::string, MatrixXc>> refs;
    refs.emplace_back("H", build_hamiltonian(cfg.model));
    if (tower_size > 0) {
        try {
            ChargeTower tower = conserved_tower(cfg.model, tower_size);
            for (auto& ch : tower.charges) refs.emplace_back(ch.label, std::move(ch.op));
        } catch (const ConfigError&) {
            // no tower for these parameters
        }
    }
    for (auto kind : available_symmetries(cfg.model))
        if (kind == SymmetryKind::Jz) refs.emplace_back("J^z", symmetry_operator(cfg.model, kind));

    const MatrixXc& V = r.basis.vectors;
    for (auto& [label, op] : refs) {
        ReferenceCharge rc;
        rc.label = label;
        MatrixXc R = V.adjoint() * op * V;
        VectorXd d = R.diagonal().real();
        const double rn = R.norm();
        R.diagonal().setZero();
        rc.offdiag_residual = rn > 0 ? R.norm() / rn : 0.0;
        const double dn = d.norm();
        if (span.cols() > 0 && dn > 0) {
            VectorXd proj = span * (span.transpose() * d);
            rc.projection_residual = (d - proj).norm() / dn;
        } else {
            rc.projection_residual = dn > 0 ? 1.0 : 0.0;
        }
        rc.detected = rc.offdiag_residual < detect_tol && rc.projection_residual < detect_tol;
        rep.references.push_back(rc);
    }
    return rep;
}

nlohmann::json rmt_report(const RmtSettings& s, std::uint64_t seed, int threads, std::uint64_t config_hash) {
    nlohmann::json j;
    j["config_hash"] = hex64(config_hash);
    GeneratorSetOptions opt;
    opt.first_n = s.n_loc;
    opt.identity_easy = s.identity_easy;
    const GeneratorSet gens = build_generator_set(s.L, Spin::half(), Threshold{s.L, s.L, 0}, Convention::FirstN, opt);
    const MomentReport m = verify_moments(gens, s.trials, seed, threads);
    j["moments"] = m.to_json();
    const auto four = four_point_check(s.four_point_D, s.four_point_samples, seed);
    const auto two = two_point_check(s.four_point_D, s.four_point_samples, seed);
    j["four_point"] = four.to_json();
    j["two_point"] = two.to_json();
    const double D = static_cast<double>(gens.dimension());
    j["plateau_from_mean_pred"] = plateau_from_mean(m.prediction.mean_pred, D, D);
    j["plateau_from_mean_emp"] = plateau_from_mean(m.mean_lambda_bar, D, D);
    nlohmann::json wg = nlohmann::json::array();
    const std::vector<std::vector<int>> types{{1, 1}, {2}, {1, 1, 1, 1}, {1, 1, 2}, {2, 2}, {1, 3}, {4}};
    for (int d = 4; d <= 8; ++d)
        for (const auto& t : types) {
            const Rational w = weingarten(t, d);
            wg.push_back({{"cycle_type", t}, {"D", d}, {"value", w.str()}, {"approx", w.value()}});
        }
    j["weingarten"] = std::move(wg);
    if (!s.trend_L.empty()) {
        const auto tr = concentration_trend(s.trend_L, m.prediction.r, s.trials, seed, threads);
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : tr.points)
            pts.push_back({{"L", p.L}, {"D", p.D}, {"N_loc", p.n_loc}, {"mean_lambda_var", p.mean_lambda_var}});
        j["concentration"] = {{"points", pts}, {"slope", tr.slope}};
    }
    if (!m.connected_traces_suppressed)
        j["warning"] = "connected traces of the generator set are not O(1/D); the variance estimate may not apply";
    j["pass"] = {{"mean", m.pass_mean}, {"variance", m.pass_var}, {"four_point", four.pass}, {"two_point", two.pass}};
    return j;
}

std::string cvpbench_csv(const CvpBenchResult& r, std::uint64_t config_hash) {
    CsvWriter w(config_hash);
    w.header({"instance", "D", "rounding", "babai", "babai_greedy", "brute", "box", "ratio"});
    for (const auto& row : r.rows)
        w.row(std::vector<double>{double(row.instance), double(row.dim), row.rounding, row.babai, row.greedy,
                                  row.brute, double(row.box), row.ratio});
    return w.str();
}

nlohmann::json cvpbench_summary(const CvpBenchResult& r, const CvpBenchSettings& s, std::uint64_t config_hash) {
    const double n = static_cast<double>(r.rows.size());
    const double frac = n > 0 ? static_cast<double>(r.within_ratio) / n : 0.0;
    const bool sandwich = r.violations_rounding_babai == 0 && r.violations_babai_greedy == 0 &&
                          r.violations_greedy_brute == 0;
    return {{"config_hash", hex64(config_hash)},
            {"instances", r.rows.size()},
            {"dims", s.dims},
            {"mu", s.mu},
            {"violations", {{"rounding_babai", r.violations_rounding_babai},
                            {"babai_greedy", r.violations_babai_greedy},
                            {"greedy_brute", r.violations_greedy_brute}}},
            {"ratio_threshold", s.ratio_threshold},
            {"fraction_within_ratio", frac},
            {"pass", {{"sandwich", sandwich}, {"ratio", frac >= s.ratio_fraction}}}};
}

} // namespace qcb
