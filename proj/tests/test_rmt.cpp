#include "qcb/qmatrix.hpp"
#include "qcb/rmt.hpp"

#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

using namespace qcb;

namespace {

using Perm = std::array<int, 4>;

std::vector<int> cycle_type(const Perm& p) {
    std::array<bool, 4> seen{};
    std::vector<int> ct;
    for (int i = 0; i < 4; ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (int j = i; !seen[j]; j = p[j]) {
            seen[j] = true;
            ++len;
        }
        ct.push_back(len);
    }
    std::sort(ct.begin(), ct.end());
    return ct;
}

std::vector<Perm> all_perms() {
    std::vector<Perm> out;
    Perm p{0, 1, 2, 3};
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Perm inverse_times(const Perm& s, const Perm& t) {
    Perm inv{}, r{};
    for (int i = 0; i < 4; ++i) inv[s[i]] = i;
    for (int i = 0; i < 4; ++i) r[i] = inv[t[i]];
    return r;
}

} // namespace

TEST_CASE("Weingarten sum rules") {
    for (std::int64_t D : {2, 3, 5, 8, 64}) {
        Rational s = make_rational(weingarten({1, 1}, D).num * weingarten({2}, D).den +
                                       weingarten({2}, D).num * weingarten({1, 1}, D).den,
                                   weingarten({1, 1}, D).den * weingarten({2}, D).den);
        CHECK(s == make_rational(1, D * (D + 1)));
    }
    for (std::int64_t D : {4, 5, 7, 16, 256}) {
        // class sizes in S_4: 1, 6, 3, 8, 6
        const std::vector<std::pair<std::vector<int>, int>> classes{
            {{1, 1, 1, 1}, 1}, {{1, 1, 2}, 6}, {{2, 2}, 3}, {{1, 3}, 8}, {{4}, 6}};
        double sum = 0.0;
        for (const auto& [ct, n] : classes) sum += n * weingarten(ct, D).value();
        const double d = static_cast<double>(D);
        CHECK(sum == doctest::Approx(1.0 / (d * (d + 1) * (d + 2) * (d + 3))).epsilon(1e-12));
    }
}

TEST_CASE("Weingarten inverts the permutation Gram matrix") {
    auto perms = all_perms();
    for (int D : {4, 5, 9}) {
        Eigen::MatrixXd G(24, 24);
        for (int a = 0; a < 24; ++a)
            for (int b = 0; b < 24; ++b)
                G(a, b) = std::pow(D, static_cast<double>(cycle_type(inverse_times(perms[a], perms[b])).size()));
        Eigen::MatrixXd W = G.inverse();
        for (int a = 0; a < 24; ++a)
            for (int b = 0; b < 24; ++b) {
                const double w = weingarten(cycle_type(inverse_times(perms[a], perms[b])), D).value();
                CHECK(W(a, b) == doctest::Approx(w).epsilon(1e-9));
            }
    }
    CHECK_THROWS_AS(weingarten({4}, 3), NumericError);
    CHECK_THROWS_AS(weingarten({3}, 5), ConfigError);
}

TEST_CASE("Haar unitaries") {
    MatrixXc U = haar_unitary(6, 42);
    CHECK((U.adjoint() * U - MatrixXc::Identity(6, 6)).norm() < 1e-12);
    CHECK((haar_unitary(6, 42) - U).norm() == 0.0);
    CHECK((haar_unitary(6, 43) - U).norm() > 0.1);
    auto a = make_stream(1, 2), b = make_stream(1, 3);
    CHECK(a() != b());
}

TEST_CASE("Monte Carlo moments of Haar vectors") {
    auto two = two_point_check(4, 4000, 3);
    CHECK(two.pass);
    auto four = four_point_check(4, 4000, 3);
    CHECK(four.patterns.size() == 4);
    CHECK(four.pass);
    CHECK(four.patterns[0].predicted == doctest::Approx(2.0 / 20.0));
}

TEST_CASE("mean eigenvalue over Haar bases") {
    // E<n|T|n>^2 = 1/(D(D+1)) for traceless unit-norm T, so E[lambda_bar] = 1 - N/(D(D+1)).
    auto gens = build_generator_set(3, Spin::half(), Threshold{1, 1, 0}, Convention::T1);
    REQUIRE(gens.n_loc() == 9);
    auto rep = verify_moments(gens, 400, 11, 2);
    const double exact = 1.0 - 9.0 / (8.0 * 9.0);
    double sd = 0.0;
    for (double x : rep.lambda_bar) sd += (x - rep.mean_lambda_bar) * (x - rep.mean_lambda_bar);
    sd = std::sqrt(sd / static_cast<double>(rep.lambda_bar.size() - 1));
    CHECK(std::abs(rep.mean_lambda_bar - exact) < 4.0 * sd / std::sqrt(400.0));
    auto again = verify_moments(gens, 400, 11, 1);
    CHECK(again.lambda_bar == rep.lambda_bar);
}

TEST_CASE("plateau from the mean") {
    CHECK(plateau_from_mean(1.0, 1.0, 3.0) == doctest::Approx(std::numbers::pi));
    CHECK_THROWS_AS(plateau_from_mean(0.5, 0.5, 4.0), ConfigError);
    auto p = RmtPrediction::make(256.0, 144.0);
    CHECK(p.r == doctest::Approx(144.0 / 65536.0));
}

TEST_CASE("connected traces of Pauli strings") {
    // Pauli strings square to I/D after normalization and commute or anticommute, so both traces are 1/D
    auto gens = build_generator_set(4, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    CHECK(connected_trace_max(gens, 50) == doctest::Approx(1.0));
    auto spin1 = build_generator_set(3, Spin::one(), Threshold{2, 2, 0}, Convention::T1);
    const double s1 = connected_trace_max(spin1, 50);
    CHECK(s1 > 0.0);
    CHECK(s1 < 10.0);
}
