#include "qcb/complexity.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

using namespace qcb;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig small_experiment(const ModelSpec& m) {
    ExperimentConfig cfg;
    cfg.model = m;
    cfg.threshold = Threshold{2, 2, 0};
    cfg.curve = CurveConfig{1e3, 1.2e3, 5.0, 0.0, true, 1};
    return cfg;
}

} // namespace

TEST_CASE("time grid") {
    CurveConfig c{1.0, 2.0, 0.25, 0.0, true, 1};
    auto t = time_grid(c);
    REQUIRE(t.size() == 5);
    CHECK(t.back() == doctest::Approx(2.0));
    CHECK_THROWS_AS(time_grid(CurveConfig{2.0, 1.0, 0.1, 0.0, true, 1}), ConfigError);
    CHECK_THROWS_AS(time_grid(CurveConfig{1.0, 2.0, 0.0, 0.0, true, 1}), ConfigError);
    CHECK_THROWS_AS(time_grid(CurveConfig{1.0, 1e9, 1.0, 0.0, true, 1}), ResourceError);
    CHECK(CurveConfig::long_run().t_start == 5e7);
}

TEST_CASE("bi-invariant distance against enumeration") {
    VectorXd E(3);
    E << 0.31, -0.77, 1.9;
    for (double t : {0.5, 3.0, 17.3, 250.0}) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = -200; a <= 200; ++a)
            for (int b = -200; b <= 200; ++b)
                for (int c = -200; c <= 200; ++c) {
                    if (std::abs(E(0) * t - 2 * kPi * a) > kPi + 1e-9) continue;
                    if (std::abs(E(1) * t - 2 * kPi * b) > kPi + 1e-9) continue;
                    if (std::abs(E(2) * t - 2 * kPi * c) > kPi + 1e-9) continue;
                    Eigen::Vector3d k(a, b, c);
                    best = std::min(best, (E * t - 2 * kPi * k).norm());
                }
        CHECK(biinvariant_at(E, t) == doctest::Approx(best));
    }
    CHECK(first_crossing(E) == doctest::Approx(kPi / 1.9));
}

TEST_CASE("mu = 1 reduces the bound to the bi-invariant distance") {
    VectorXd E(4);
    E << -0.6, -0.1, 0.2, 0.5;
    LatticeContext ctx = embed(MatrixXd::Zero(4, 4), 1.0);
    lll_reduce(ctx);
    for (double t : {1.0, 10.0, 123.4})
        CHECK(bounded_at(ctx, E, t, false) == doctest::Approx(biinvariant_at(E, t)));
}

TEST_CASE("plateau statistics") {
    auto s = plateau_sample({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(s.first_half == doctest::Approx(1.5));
    CHECK(s.second_half == doctest::Approx(3.5));
    CHECK(s.nonstationary);
    CHECK_FALSE(s.stable);
    auto flat = plateau_sample({5.0, 5.0, 5.0});
    CHECK(flat.stable);
    CHECK(flat.se == 0.0);
}

TEST_CASE("early times grow linearly with unit slope") {
    auto cfg = small_experiment(ModelSpec::chaotic_ising(6));
    cfg.compute_curve = false;
    auto r = run_experiment(cfg);
    CHECK(linear_slope(r.lattice, r.basis.energies) == doctest::Approx(1.0).epsilon(1e-9));
    const double tc = first_crossing(r.basis.energies);
    for (double f : {0.1, 0.5, 0.95}) {
        const double t = f * tc;
        CHECK(bounded_at(r.lattice, r.basis.energies, t, true) == doctest::Approx(t).epsilon(1e-9));
        CHECK(biinvariant_at(r.basis.energies, t) == doctest::Approx(t).epsilon(1e-9));
    }
}

TEST_CASE("curve is deterministic across thread counts") {
    auto cfg = small_experiment(ModelSpec::chaotic_ising(6));
    auto a = run_experiment(cfg);
    cfg.curve.threads = 3;
    auto b = run_experiment(cfg);
    REQUIRE(a.curve.bound.size() == 41);
    CHECK(a.curve.bound == b.curve.bound);
    CHECK(a.curve.biinv == b.curve.biinv);
    for (std::size_t i = 0; i < a.curve.bound.size(); ++i) {
        CHECK(a.curve.bound[i] <= a.curve.times[i] + 1e-9);
        CHECK(a.curve.bound[i] > 0.0);
    }
    CHECK(a.mu == 64.0);
    CHECK(a.curve.estimate_mean == doctest::Approx(kPi * std::sqrt(64.0 * 64.0 * a.q.mean / 3.0)));
}

TEST_CASE("stage labels keep the error type") {
    auto cfg = small_experiment(ModelSpec::ising(1, 1.0, 0.0));
    try {
        run_experiment(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("model: ", 0) == 0);
    }
    auto bad = small_experiment(ModelSpec::chaotic_ising(4));
    bad.lll_delta = 2.0;
    try {
        run_experiment(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("lll: ", 0) == 0);
    }
}

TEST_CASE("convention thresholds") {
    CHECK(convention_threshold(Convention::T1, 3, 8) == Threshold{3, 3, 0});
    CHECK(convention_threshold(Convention::T2, 3, 8) == Threshold{3, 6, 0});
    CHECK(convention_threshold(Convention::T2, 3, 4) == Threshold{3, 4, 0});
    CHECK(convention_threshold(Convention::T3, 2, 8) == Threshold{2, 2, 0});
}
