#include "qcb/complexity.hpp"
#include "qcb/config.hpp"
#include "qcb/lattice.hpp"
#include "qcb/model_zoo.hpp"
#include "qcb/reports.hpp"
#include "qcb/rmt.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qcb;

namespace {

py::tuple rational_tuple(const Rational& r) {
    // __int128 has no direct conversion; go through the decimal form
    const std::string s = r.str();
    const auto slash = s.find('/');
    py::object num = py::int_(py::str(s.substr(0, slash)));
    py::object den = py::int_(py::str(slash == std::string::npos ? std::string("1") : s.substr(slash + 1)));
    return py::make_tuple(num, den);
}

VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

py::dict curve(const std::string& config_text) {
    const RunConfig c = parse_config(config_text);
    const ExperimentConfig e = c.resolved_experiment();
    ExperimentResult r;
    {
        py::gil_scoped_release release;
        r = run_experiment(e);
    }
    py::dict out;
    out["summary"] = curve_summary(r, e, c.hash()).dump();
    out["t"] = to_vector(r.curve.times);
    out["bound"] = to_vector(r.curve.bound);
    out["biinv"] = to_vector(r.curve.biinv);
    out["energies"] = r.basis.energies;
    out["q"] = r.q.matrix;
    return out;
}

py::dict qmatrix(const std::string& config_text) {
    const RunConfig c = parse_config(config_text);
    ExperimentResult r;
    {
        py::gil_scoped_release release;
        r = prepare_q(c.resolved_experiment());
    }
    py::dict out;
    out["q"] = r.q.matrix;
    out["eigenvalues"] = r.q.eigenvalues;
    out["kernel_dim"] = r.q.kernel_dim;
    out["n_loc"] = r.n_loc;
    out["energies"] = r.basis.energies;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Complexity bounds for spin-chain time evolution from a lattice closest-vector problem.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
          py::arg("text"), "Parse a config and return its canonical text form.");
    m.def("config_hash", [](const std::string& text) { return hex64(parse_config(text).hash()); }, py::arg("text"));
    m.def("curve", &curve, py::arg("config_text"), "Complexity curve; summary is a JSON string.");
    m.def("qmatrix", &qmatrix, py::arg("config_text"));
    m.def("hamiltonian",
          [](const std::string& text) { return build_hamiltonian(parse_config(text).experiment.model); },
          py::arg("config_text"));
    m.def(
        "rmt",
        [](const std::string& text) {
            const RunConfig c = parse_config(text);
            py::gil_scoped_release release;
            return rmt_report(c.rmt, c.seed, c.experiment.curve.threads, c.hash()).dump();
        },
        py::arg("config_text"));
    m.def(
        "cvpbench",
        [](const std::string& text) {
            const RunConfig c = parse_config(text);
            py::gil_scoped_release release;
            const auto s = c.cvpbench;
            const auto r = run_cvp_bench(s.dims, s.instances, s.mu, c.seed, s.ratio_threshold,
                                         c.experiment.lll_delta);
            return cvpbench_summary(r, s, c.hash()).dump();
        },
        py::arg("config_text"));
    m.def("weingarten", [](std::vector<int> ct, std::int64_t D) { return rational_tuple(weingarten(std::move(ct), D)); },
          py::arg("cycle_type"), py::arg("D"), "Exact Weingarten value as (numerator, denominator).");
    m.def("haar_unitary", [](Index D, std::uint64_t seed) { return haar_unitary(D, seed); }, py::arg("D"),
          py::arg("seed"));
    m.def(
        "cvp",
        [](const MatrixXd& basis, const VectorXd& target, double delta) {
            LatticeContext ctx = from_basis(basis);
            lll_reduce(ctx, delta);
            const auto b = babai_nearest_plane(ctx, target);
            const auto g = greedy_refine(ctx, b, target);
            py::dict out;
            out["rounding"] = round_cvp(ctx, target).value;
            out["babai"] = b.value;
            out["greedy"] = g.value;
            out["k"] = VectorXd(g.k.cast<double>());
            return out;
        },
        py::arg("basis"), py::arg("target"), py::arg("delta") = 0.99,
        "LLL-reduce explicit basis columns and solve CVP by Babai plus greedy refinement.");
}
