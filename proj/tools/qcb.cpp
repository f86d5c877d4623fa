#include "qcb/config.hpp"
#include "qcb/io.hpp"
#include "qcb/reports.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace qcb;

namespace {

struct Options {
    std::string config;
    std::string out;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool long_run = false;
};

RunConfig resolve(const Options& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (!o.out.empty()) c.out = o.out;
    if (o.threads > 0) c.experiment.curve.threads = o.threads;
    if (o.seed_given) c.seed = o.seed;
    if (o.long_run) {
        const CurveConfig lr = CurveConfig::long_run();
        c.experiment.curve.t_start = lr.t_start;
        c.experiment.curve.t_end = lr.t_end;
        c.experiment.curve.dt = lr.dt;
    }
    validate_config(c);
    fs::create_directories(c.out);
    return c;
}

std::string path(const RunConfig& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

void write_config_copy(const RunConfig& c) { write_text(path(c, "config.ini"), serialize_config(c)); }

int cmd_curve(const RunConfig& c) {
    const ExperimentConfig e = c.resolved_experiment();
    const std::uint64_t h = c.hash();
    ExperimentResult r = run_experiment(e);
    write_text(path(c, "curve.csv"), curve_csv(r.curve, h));
    write_json(path(c, "summary.json"), curve_summary(r, e, h));
    nlohmann::json header = {{"config_hash", hex64(h)}, {"model", r.model.to_json()}};
    if (c.output.export_hamiltonian) {
        nlohmann::json hh = header;
        hh["normalized"] = false;
        export_complex_matrix(path(c, "hamiltonian"), build_hamiltonian(r.model), hh);
    }
    if (c.output.export_decomposition) export_decomposition(path(c, "decomposition"), r.basis, header);
    if (c.output.export_generators) {
        nlohmann::json m = r.gens.manifest();
        m["config_hash"] = hex64(h);
        write_json(path(c, "generators.json"), m);
    }
    if (c.output.export_lattice) write_text(path(c, "lattice.csv"), config_hash_line(h) + lattice_dump_csv(r.lattice));
    std::cout << "C_sat = " << r.curve.plateau.mean << " +- " << r.curve.plateau.se << ", kernel_dim = "
              << r.q.kernel_dim << "\n";
    if (r.curve.plateau.nonstationary) std::cerr << "warning: plateau window is not stationary\n";
    return 0;
}

int cmd_qspectrum(const RunConfig& c) {
    const ExperimentConfig e = c.resolved_experiment();
    const std::uint64_t h = c.hash();
    auto entries = qspectrum_sweep(e, c.qspectrum.sweep, c.qspectrum.bins, c.qspectrum.rank_oracle);
    write_text(path(c, "qspectrum.csv"), qspectrum_csv(entries, h));
    write_text(path(c, "qspectrum_hist.csv"), qhistogram_csv(entries, h));
    write_json(path(c, "qspectrum.json"), qspectrum_summary(entries, e, h));
    for (const auto& en : entries)
        std::cout << "k = " << en.k << ": N_loc = " << en.n_loc << ", kernel_dim = " << en.q.kernel_dim << "\n";
    return 0;
}

int cmd_charges(const RunConfig& c) {
    ExperimentConfig e = c.resolved_experiment();
    e.threshold = convention_threshold(e.convention, c.charges.k, e.model.L);
    if (c.explicit_threshold) e.threshold = c.experiment.threshold;
    const std::uint64_t h = c.hash();
    ChargeReport rep = analyze_charges(e, c.charges.tower);
    write_json(path(c, "charges.json"), rep.to_json(h));
    std::cout << "kernel_dim = " << rep.kernel_dim << "\n";
    for (const auto& r : rep.references)
        std::cout << r.label << ": " << (r.detected ? "detected" : "not detected") << "\n";
    return 0;
}

int cmd_rmt(const RunConfig& c) {
    const std::uint64_t h = c.hash();
    auto j = rmt_report(c.rmt, c.seed, c.experiment.curve.threads, h);
    write_json(path(c, "rmt.json"), j);
    std::cout << j["pass"].dump() << "\n";
    return 0;
}

int cmd_cvpbench(const RunConfig& c) {
    const std::uint64_t h = c.hash();
    auto r = run_cvp_bench(c.cvpbench.dims, c.cvpbench.instances, c.cvpbench.mu, c.seed, c.cvpbench.ratio_threshold,
                           c.experiment.lll_delta);
    write_text(path(c, "cvpbench.csv"), cvpbench_csv(r, h));
    auto j = cvpbench_summary(r, c.cvpbench, h);
    write_json(path(c, "cvpbench.json"), j);
    std::cout << j["violations"].dump() << " within_ratio = " << j["fraction_within_ratio"] << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Upper bounds on Nielsen complexity for spin-chain evolution operators"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config file (key = value with [sections])");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Random seed")->each([&](const std::string&) { o.seed_given = true; });
        sub->add_flag("--long-run", o.long_run, "Long time window [5e7, 6e7], dt = 1e4");
    };
    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Cmd cmds[] = {
        {"curve", "Complexity curve and plateau summary", cmd_curve},
        {"qspectrum", "Q-matrix spectra over a locality sweep", cmd_qspectrum},
        {"charges", "Local conservation laws from the Q kernel", cmd_charges},
        {"rmt", "Haar-basis checks of the random-matrix predictions", cmd_rmt},
        {"cvpbench", "Closest-vector heuristics against brute force", cmd_cvpbench},
    };
    std::vector<std::pair<CLI::App*, const Cmd*>> subs;
    for (const auto& c : cmds) {
        auto* s = app.add_subcommand(c.name, c.help);
        add_common(s);
        subs.emplace_back(s, &c);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        for (auto& [s, c] : subs) {
            if (!s->parsed()) continue;
            RunConfig cfg = resolve(o);
            write_config_copy(cfg);
            return c->run(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
