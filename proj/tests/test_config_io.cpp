#include "qcb/config.hpp"
#include "qcb/io.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

using namespace qcb;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("qcb_test_" + name);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("defaults round-trip") {
    RunConfig c;
    RunConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(back.hash() == c.hash());
}

TEST_CASE("parsed values round-trip") {
    const std::string text = R"(
# comment line
[model]
family = xyz
L = 6
J_x = -0.35
J_y = -0.35   # trailing comment
J_z = -0.1
[generators]
k = 3
convention = T2
[spectral]
presplit = translation, jz
[curve]
t_start = 100
t_end = 200
dt = 0.5
mu = 32
[run]
seed = 99
[cvpbench]
dims = 4, 5
)";
    RunConfig c = parse_config(text);
    CHECK(c.experiment.model.family == Family::XYZ);
    CHECK(c.experiment.model.L == 6);
    CHECK(c.experiment.model.is_xxz());
    CHECK(c.k == 3);
    CHECK(c.experiment.convention == Convention::T2);
    REQUIRE(c.experiment.presplit.has_value());
    CHECK(c.experiment.presplit->size() == 2);
    CHECK(c.experiment.curve.dt == 0.5);
    CHECK(c.seed == 99);
    CHECK(c.cvpbench.dims == std::vector<int>{4, 5});
    CHECK(c.threshold() == Threshold{3, 6, 0});
    CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("hash ignores output location and threads only") {
    RunConfig a;
    RunConfig b = a;
    b.out = "elsewhere";
    b.experiment.curve.threads = 4;
    CHECK(a.hash() == b.hash());
    b.seed = 2;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("errors name the key") {
    CHECK(error_of("[model]\nfamly = ising\n").find("'model.famly'") != std::string::npos);
    CHECK(error_of("[model]\nL = eight\n").find("'model.L'") != std::string::npos);
    CHECK(error_of("[model]\nL = 8x\n").find("'model.L'") != std::string::npos);
    CHECK(error_of("[lattice]\nlll_delta = 1.5\n").find("'lattice.lll_delta'") != std::string::npos);
    CHECK(error_of("[cvpbench]\ndims = 9\n").find("'cvpbench.dims'") != std::string::npos);
    CHECK(error_of("[model\n").find("malformed section") != std::string::npos);
    CHECK(error_of("[model]\njust words\n").find("expected key = value") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/qcb.ini"), ConfigError);
}

TEST_CASE("double formatting is exact and locale free") {
    for (double v : {0.1, -1.05, 5e5, 1e-300, 123456.789}) {
        const std::string s = format_double(v);
        CHECK(s.find(',') == std::string::npos);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("csv writer") {
    CsvWriter w(0xabcULL);
    w.header({"t", "value"}).row(std::vector<double>{1.5, -2.0});
    const std::string& s = w.str();
    CHECK(s.rfind(config_hash_line(0xabcULL), 0) == 0);
    CHECK(s.find("# config_hash=") == 0);
    CHECK(s.find("t,value\n1.5,-2\n") != std::string::npos);
}

TEST_CASE("binary matrix export round-trip") {
    auto dir = scratch("bin");
    MatrixXc m(3, 2);
    m << cplx(1, 2), cplx(-0.5, 0), cplx(1e-300, -7), cplx(3, 3), cplx(0, 1), cplx(std::numeric_limits<double>::max(), 0);
    export_complex_matrix((dir / "m").string(), m, {{"what", "test"}});
    MatrixXc back = import_complex_matrix((dir / "m").string());
    CHECK(back == m);
    auto j = nlohmann::json::parse(read_text((dir / "m.json").string()));
    CHECK(j["rows"] == 3);
    CHECK(j["cols"] == 2);
    CHECK(std::filesystem::file_size(dir / "m.bin") == 3 * 2 * 16);
    std::filesystem::remove_all(dir);
}
