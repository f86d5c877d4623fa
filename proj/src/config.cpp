#include "qcb/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qcb {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const char* b = v.data();
    const char* e = v.data() + v.size();
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e) bad(key, "cannot parse '" + v + "' as a number");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(parse_number<int>(key, s));
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

template <class F>
auto wrap(const std::string& key, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind("config key", 0) == 0) throw;
        bad(key, msg);
    }
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        // model
        t["model.family"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.family = wrap(k, [&] { return family_from_string(v); });
        };
        t["model.L"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.L = parse_number<int>(k, v);
        };
        t["model.h_x"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.h_x = parse_number<double>(k, v);
        };
        t["model.h_z"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.h_z = parse_number<double>(k, v);
        };
        t["model.J_x"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.J_x = parse_number<double>(k, v);
        };
        t["model.J_y"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.J_y = parse_number<double>(k, v);
        };
        t["model.J_z"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.model.J_z = parse_number<double>(k, v);
        };
        // generators
        t["generators.k"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.k = parse_number<int>(k, v);
        };
        t["generators.k_op"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.threshold.k_op = parse_number<int>(k, v);
            c.explicit_threshold = true;
        };
        t["generators.k_sp"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.threshold.k_sp = parse_number<int>(k, v);
            c.explicit_threshold = true;
        };
        t["generators.k_int"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.threshold.k_int = parse_number<int>(k, v);
            c.explicit_threshold = true;
        };
        t["generators.convention"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.convention = wrap(k, [&] { return convention_from_string(v); });
        };
        t["generators.removed_site"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.gen_options.removed_site = parse_number<int>(k, v);
        };
        t["generators.identity_easy"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.gen_options.identity_easy = parse_bool(k, v);
        };
        t["generators.first_n"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.gen_options.first_n = parse_number<std::size_t>(k, v);
        };
        // spectral
        t["spectral.presplit"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "default") {
                c.experiment.presplit.reset();
            } else if (v == "none") {
                c.experiment.presplit = std::vector<SymmetryKind>{};
            } else {
                std::vector<SymmetryKind> kinds;
                for (const auto& s : split_list(v)) kinds.push_back(wrap(k, [&] { return symmetry_from_string(s); }));
                c.experiment.presplit = kinds;
            }
        };
        t["spectral.preferred_basis"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.use_preferred_basis = parse_bool(k, v);
        };
        t["spectral.degeneracy_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.degeneracy_tol = parse_number<double>(k, v);
        };
        t["spectral.kernel_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.kernel_tol = parse_number<double>(k, v);
        };
        t["spectral.commute_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.commute_tol = parse_number<double>(k, v);
        };
        // lattice and curve
        t["lattice.lll_delta"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.lll_delta = parse_number<double>(k, v);
        };
        t["curve.t_start"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.curve.t_start = parse_number<double>(k, v);
        };
        t["curve.t_end"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.curve.t_end = parse_number<double>(k, v);
        };
        t["curve.dt"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.curve.dt = parse_number<double>(k, v);
        };
        t["curve.mu"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.curve.mu = parse_number<double>(k, v);
        };
        t["curve.clip_to_linear"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.curve.clip_to_linear = parse_bool(k, v);
        };
        // run
        t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.seed = parse_number<std::uint64_t>(k, v);
        };
        t["run.threads"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.experiment.curve.threads = parse_number<int>(k, v);
        };
        t["run.out"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; };
        // qspectrum
        t["qspectrum.sweep"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.qspectrum.sweep = parse_int_list(k, v);
        };
        t["qspectrum.bins"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.qspectrum.bins = parse_number<int>(k, v);
        };
        t["qspectrum.rank_oracle"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.qspectrum.rank_oracle = parse_bool(k, v);
        };
        // charges
        t["charges.k"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.charges.k = parse_number<int>(k, v);
        };
        t["charges.tower"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.charges.tower = parse_number<int>(k, v);
        };
        // rmt
        t["rmt.L"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.L = parse_number<int>(k, v);
        };
        t["rmt.n_loc"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.n_loc = parse_number<std::size_t>(k, v);
        };
        t["rmt.trials"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.trials = parse_number<std::size_t>(k, v);
        };
        t["rmt.identity_easy"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.identity_easy = parse_bool(k, v);
        };
        t["rmt.four_point_D"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.four_point_D = parse_number<int>(k, v);
        };
        t["rmt.four_point_samples"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.four_point_samples = parse_number<std::size_t>(k, v);
        };
        t["rmt.trend_L"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.rmt.trend_L = parse_int_list(k, v);
        };
        // cvpbench
        t["cvpbench.dims"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cvpbench.dims = parse_int_list(k, v);
        };
        t["cvpbench.instances"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cvpbench.instances = parse_number<std::size_t>(k, v);
        };
        t["cvpbench.mu"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cvpbench.mu = parse_number<double>(k, v);
        };
        t["cvpbench.ratio_threshold"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cvpbench.ratio_threshold = parse_number<double>(k, v);
        };
        t["cvpbench.ratio_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cvpbench.ratio_fraction = parse_number<double>(k, v);
        };
        // output
        t["output.export_hamiltonian"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.output.export_hamiltonian = parse_bool(k, v);
        };
        t["output.export_decomposition"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.output.export_decomposition = parse_bool(k, v);
        };
        t["output.export_generators"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.output.export_generators = parse_bool(k, v);
        };
        t["output.export_lattice"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.output.export_lattice = parse_bool(k, v);
        };
        return t;
    }();
    return table;
}

} // namespace

void validate_config(const RunConfig& c) {
    auto need = [](bool ok, const std::string& key, const std::string& what) {
        if (!ok) bad(key, what);
    };
    wrap("model", [&] { c.experiment.model.validate(); });
    need(c.k >= 1, "generators.k", "must be >= 1");
    need(c.experiment.degeneracy_tol > 0, "spectral.degeneracy_tol", "must be positive");
    need(c.experiment.kernel_tol > 0, "spectral.kernel_tol", "must be positive");
    need(c.experiment.commute_tol > 0, "spectral.commute_tol", "must be positive");
    need(c.experiment.lll_delta > 0.25 && c.experiment.lll_delta < 1.0, "lattice.lll_delta", "must lie in (0.25, 1)");
    wrap("curve", [&] { c.experiment.curve.validate(); });
    need(c.qspectrum.bins >= 1, "qspectrum.bins", "must be >= 1");
    for (int k : c.qspectrum.sweep) need(k >= 1, "qspectrum.sweep", "entries must be >= 1");
    need(c.charges.k >= 1, "charges.k", "must be >= 1");
    need(c.charges.tower >= 0, "charges.tower", "must be >= 0");
    need(c.rmt.L >= 1 && c.rmt.L <= 12, "rmt.L", "must lie in [1, 12]");
    need(c.rmt.trials >= 2, "rmt.trials", "must be >= 2");
    need(c.rmt.four_point_D >= 2, "rmt.four_point_D", "must be >= 2");
    need(c.rmt.four_point_samples >= 2, "rmt.four_point_samples", "must be >= 2");
    need(c.cvpbench.instances >= 1, "cvpbench.instances", "must be >= 1");
    need(c.cvpbench.mu >= 1.0, "cvpbench.mu", "must be >= 1");
    need(c.cvpbench.ratio_threshold >= 1.0, "cvpbench.ratio_threshold", "must be >= 1");
    need(c.cvpbench.ratio_fraction >= 0.0 && c.cvpbench.ratio_fraction <= 1.0, "cvpbench.ratio_fraction",
         "must lie in [0, 1]");
    for (int d : c.cvpbench.dims) need(d >= 1 && d <= 8, "cvpbench.dims", "brute-force oracle needs 1 <= D <= 8");
    need(!c.out.empty(), "run.out", "must not be empty");
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericError("format_double failed");
    return std::string(buf, p);
}

Threshold RunConfig::threshold() const {
    if (explicit_threshold) return experiment.threshold;
    return convention_threshold(experiment.convention, k, experiment.model.L);
}

ExperimentConfig RunConfig::resolved_experiment() const {
    ExperimentConfig e = experiment;
    e.threshold = threshold();
    return e;
}

std::uint64_t RunConfig::hash() const {
    // output location and thread count do not change any result
    RunConfig c = *this;
    c.out = "-";
    c.experiment.curve.threads = 1;
    return fnv1a(serialize_config(c));
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
        const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) bad(key, "unknown key");
        it->second(c, key, value);
    }
    validate_config(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    const auto& e = c.experiment;
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    os << "[model]\n";
    kv("family", to_string(e.model.family));
    kv("L", std::to_string(e.model.L));
    kv("h_x", format_double(e.model.h_x));
    kv("h_z", format_double(e.model.h_z));
    kv("J_x", format_double(e.model.J_x));
    kv("J_y", format_double(e.model.J_y));
    kv("J_z", format_double(e.model.J_z));
    os << "\n[generators]\n";
    kv("k", std::to_string(c.k));
    if (c.explicit_threshold) {
        kv("k_op", std::to_string(e.threshold.k_op));
        kv("k_sp", std::to_string(e.threshold.k_sp));
        kv("k_int", std::to_string(e.threshold.k_int));
    }
    kv("convention", to_string(e.convention));
    kv("removed_site", std::to_string(e.gen_options.removed_site));
    kv("identity_easy", b(e.gen_options.identity_easy));
    kv("first_n", std::to_string(e.gen_options.first_n));
    os << "\n[spectral]\n";
    if (!e.presplit) {
        kv("presplit", "default");
    } else if (e.presplit->empty()) {
        kv("presplit", "none");
    } else {
        std::string s;
        for (std::size_t i = 0; i < e.presplit->size(); ++i) s += (i ? "," : "") + to_string((*e.presplit)[i]);
        kv("presplit", s);
    }
    kv("preferred_basis", b(e.use_preferred_basis));
    kv("degeneracy_tol", format_double(e.degeneracy_tol));
    kv("kernel_tol", format_double(e.kernel_tol));
    kv("commute_tol", format_double(e.commute_tol));
    os << "\n[lattice]\n";
    kv("lll_delta", format_double(e.lll_delta));
    os << "\n[curve]\n";
    kv("t_start", format_double(e.curve.t_start));
    kv("t_end", format_double(e.curve.t_end));
    kv("dt", format_double(e.curve.dt));
    kv("mu", format_double(e.curve.mu));
    kv("clip_to_linear", b(e.curve.clip_to_linear));
    os << "\n[run]\n";
    kv("seed", std::to_string(c.seed));
    kv("threads", std::to_string(e.curve.threads));
    kv("out", c.out);
    os << "\n[qspectrum]\n";
    kv("sweep", join_ints(c.qspectrum.sweep));
    kv("bins", std::to_string(c.qspectrum.bins));
    kv("rank_oracle", b(c.qspectrum.rank_oracle));
    os << "\n[charges]\n";
    kv("k", std::to_string(c.charges.k));
    kv("tower", std::to_string(c.charges.tower));
    os << "\n[rmt]\n";
    kv("L", std::to_string(c.rmt.L));
    kv("n_loc", std::to_string(c.rmt.n_loc));
    kv("trials", std::to_string(c.rmt.trials));
    kv("identity_easy", b(c.rmt.identity_easy));
    kv("four_point_D", std::to_string(c.rmt.four_point_D));
    kv("four_point_samples", std::to_string(c.rmt.four_point_samples));
    kv("trend_L", join_ints(c.rmt.trend_L));
    os << "\n[cvpbench]\n";
    kv("dims", join_ints(c.cvpbench.dims));
    kv("instances", std::to_string(c.cvpbench.instances));
    kv("mu", format_double(c.cvpbench.mu));
    kv("ratio_threshold", format_double(c.cvpbench.ratio_threshold));
    kv("ratio_fraction", format_double(c.cvpbench.ratio_fraction));
    os << "\n[output]\n";
    kv("export_hamiltonian", b(c.output.export_hamiltonian));
    kv("export_decomposition", b(c.output.export_decomposition));
    kv("export_generators", b(c.output.export_generators));
    kv("export_lattice", b(c.output.export_lattice));
    return os.str();
}

} // namespace qcb
