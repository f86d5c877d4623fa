#include "qcb/operator_basis.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

using namespace qcb;

namespace {

double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double trace_product(const MatrixXc& a, const MatrixXc& b) { return (a * b).trace().real(); }

} // namespace

TEST_CASE("spin matrices") {
    MatrixXc z = single_site_spin(0.5, Axis::Z);
    CHECK((z - Eigen::Vector2cd(1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);

    MatrixXc z1 = single_site_spin(1.0, Axis::Z);
    CHECK((z1 - Eigen::Vector3cd(2, 0, -2).asDiagonal().toDenseMatrix()).norm() < 1e-15);

    // entries sqrt(j (2s - j + 1)) on the off-diagonals, here sqrt(2) for s = 1
    MatrixXc x1 = single_site_spin(1.0, Axis::X);
    MatrixXc expect = MatrixXc::Zero(3, 3);
    expect(0, 1) = expect(1, 0) = expect(1, 2) = expect(2, 1) = std::sqrt(2.0);
    CHECK((x1 - expect).norm() < 1e-14);

    for (double s : {0.5, 1.0, 1.5}) {
        MatrixXc X = single_site_spin(s, Axis::X), Y = single_site_spin(s, Axis::Y), Z = single_site_spin(s, Axis::Z);
        const cplx two_i(0, 2);
        CHECK((X * Y - Y * X - two_i * Z).norm() < 1e-12);
        CHECK((Y * Z - Z * Y - two_i * X).norm() < 1e-12);
        CHECK((Z * X - X * Z - two_i * Y).norm() < 1e-12);
        CHECK((X - X.adjoint()).norm() < 1e-15);
    }
    CHECK_THROWS_AS(single_site_spin(0.0, Axis::X), ConfigError);
    CHECK_THROWS_AS(single_site_spin(0.3, Axis::X), ConfigError);
}

TEST_CASE("site bases are orthonormal and graded") {
    for (Spin s : {Spin::half(), Spin::one()}) {
        SiteOperatorBasis b = single_site_basis(s);
        const int n = s.local_dim();
        REQUIRE(b.size() == n * n);
        for (int i = 0; i < b.size(); ++i) {
            CHECK((b.elements[i] - b.elements[i].adjoint()).norm() < 1e-14);
            for (int j = 0; j < b.size(); ++j)
                CHECK(std::abs(trace_product(b.elements[i], b.elements[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
        CHECK(b.internal_degree[b.identity_index] == 0);
        MatrixXc id = MatrixXc::Identity(n, n) / std::sqrt(double(n));
        CHECK((b.elements[b.identity_index] - id).norm() < 1e-14);
        // degree-1 elements span the spin matrices
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            MatrixXc S = single_site_spin(s, a);
            MatrixXc proj = MatrixXc::Zero(n, n);
            for (int i = 0; i < b.size(); ++i)
                if (b.internal_degree[i] == 1) proj += (b.elements[i] * S).trace() * b.elements[i];
            CHECK((proj - S).norm() < 1e-12);
        }
    }
    SiteOperatorBasis h = single_site_basis(Spin::half());
    CHECK((h.elements[1] - single_site_spin(0.5, Axis::X) / std::sqrt(2.0)).norm() < 1e-14);
    CHECK((h.elements[2] - single_site_spin(0.5, Axis::Y) / std::sqrt(2.0)).norm() < 1e-14);
    CHECK((h.elements[3] - single_site_spin(0.5, Axis::Z) / std::sqrt(2.0)).norm() < 1e-14);
}

TEST_CASE("Clebsch-Gordan values") {
    // <1/2 1/2; 1/2 -1/2 | 1 0> = 1/sqrt2, <1/2 1/2; 1/2 -1/2 | 0 0> = 1/sqrt2
    CHECK(clebsch_gordan(1, 1, 1, -1, 2, 0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(clebsch_gordan(1, 1, 1, -1, 0, 0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(clebsch_gordan(1, -1, 1, 1, 0, 0) == doctest::Approx(-std::sqrt(0.5)));
    // <1 1; 1 -1 | 2 0> = 1/sqrt6
    CHECK(clebsch_gordan(2, 2, 2, -2, 4, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
}

TEST_CASE("Gell-Mann algebra") {
    auto t = gell_mann_site();
    REQUIRE(t.size() == 8);
    const double c = trace_product(t[0], t[0]);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
            CHECK(std::abs(trace_product(t[a], t[b]) - (a == b ? c : 0.0)) < 1e-12);
            MatrixXc comm = t[a] * t[b] - t[b] * t[a];
            MatrixXc anti = t[a] * t[b] + t[b] * t[a];
            MatrixXc rc = MatrixXc::Zero(3, 3), ra = (4.0 / 3.0) * (a == b) * MatrixXc::Identity(3, 3);
            for (int k = 0; k < 8; ++k) {
                rc += cplx(0, 2) * su3_f(a, b, k) * t[k];
                ra += 2.0 * su3_d(a, b, k) * t[k];
            }
            CHECK((comm - rc).norm() < 1e-12);
            CHECK((anti - ra).norm() < 1e-12);
        }
    // expressible in the spin-1 site basis
    SiteOperatorBasis b = single_site_basis(Spin::one());
    for (const auto& g : t) {
        MatrixXc proj = MatrixXc::Zero(3, 3);
        for (const auto& e : b.elements) proj += (e * g).trace() * e;
        CHECK((proj - g).norm() < 1e-12);
    }
}

TEST_CASE("locality degrees") {
    SiteOperatorBasis b = single_site_basis(Spin::half());
    const int z = 3, x = 1;
    auto deg = [&](std::vector<int> sites, std::vector<int> ops) {
        return locality_degrees(std::span<const int>(sites), std::span<const int>(ops), 12, b);
    };
    CHECK(deg({0, 1}, {z, z}) == Locality{2, 2, 2});
    CHECK(deg({0, 2}, {x, x}) == Locality{2, 3, 2});
    CHECK(deg({0, 11}, {x, x}) == Locality{2, 2, 2});
    CHECK(deg({0, 4, 8}, {x, x, x}).k_sp == 9);

    // spin-1: k_int adds the internal degrees of the sites
    SiteOperatorBasis b1 = single_site_basis(Spin::one());
    int quad = -1, dip = -1;
    for (int i = 0; i < b1.size(); ++i) {
        if (b1.internal_degree[i] == 2 && quad < 0) quad = i;
        if (b1.internal_degree[i] == 1 && dip < 0) dip = i;
    }
    std::vector<int> s2{0, 1}, o2{quad, dip};
    CHECK(locality_degrees(std::span<const int>(s2), std::span<const int>(o2), 5, b1) == Locality{2, 2, 3});
}

TEST_CASE("generator counts") {
    // Sum over l <= k of 3^l C(L, l) when k_sp = L
    for (int L : {6, 8, 12})
        for (int k : {1, 2, 3}) {
            if (L == 12 && k == 3) continue;
            GeneratorSet g = build_generator_set(L, Spin::half(), Threshold{k, L, 0}, Convention::T2);
            double expect = 0;
            for (int l = 1; l <= k; ++l) expect += std::pow(3.0, l) * binom(L, l);
            CHECK(double(g.n_loc()) == expect);
        }
    // T1(2) at L = 12: 36 single-site plus 12 * 9 adjacent pairs
    GeneratorSet t1 = build_generator_set(12, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    CHECK(t1.n_loc() == 144);
    for (int k : {2, 3}) {
        GeneratorSet a = build_generator_set(12, Spin::half(), Threshold{k, k, 0}, Convention::T1);
        GeneratorSet c = build_generator_set(12, Spin::half(), Threshold{k, k, 0}, Convention::T3);
        CHECK(c.n_loc() == a.n_loc() - std::size_t(std::pow(3, k)));
    }
    // total traceless count through the hard iterator, L = 4
    GeneratorSet g4 = build_generator_set(4, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    std::size_t hard = 0;
    g4.for_each_hard([&](const GeneratorDescriptor&) { ++hard; });
    CHECK(hard + g4.easy.size() == 255);
    // T1(k) inside T2(k), equal at k = 6
    GeneratorSet a = build_generator_set(8, Spin::half(), Threshold{3, 3, 0}, Convention::T1);
    GeneratorSet c = build_generator_set(8, Spin::half(), Threshold{3, 6, 0}, Convention::T2);
    for (const auto& d : a.easy) CHECK(c.is_easy(d));
    GeneratorSet a6 = build_generator_set(7, Spin::half(), Threshold{6, 6, 0}, Convention::T1);
    GeneratorSet c6 = build_generator_set(7, Spin::half(), Threshold{6, 6, 0}, Convention::T2);
    CHECK(a6.n_loc() == c6.n_loc());

    CHECK_THROWS_AS(build_generator_set(4, Spin::half(), Threshold{5, 5, 0}, Convention::T1), ConfigError);
    CHECK_THROWS_AS(build_generator_set(4, Spin::half(), Threshold{0, 1, 0}, Convention::T3), ConfigError);
    CHECK_THROWS_AS(build_generator_set(15, Spin::half(), Threshold{2, 2, 0}, Convention::T1), ResourceError);
}

TEST_CASE("canonical ordering is by k_op, then sites, then operators") {
    SiteOperatorBasis b = single_site_basis(Spin::half());
    std::vector<GeneratorDescriptor> all;
    for_each_descriptor(3, b, [&](const GeneratorDescriptor& d) {
        all.push_back(d);
        return true;
    });
    CHECK(all.size() == 63);
    for (std::size_t i = 1; i < all.size(); ++i) {
        const auto &p = all[i - 1], &q = all[i];
        bool ordered = p.sites.size() < q.sites.size() ||
                       (p.sites.size() == q.sites.size() &&
                        (p.sites < q.sites || (p.sites == q.sites && p.site_ops < q.site_ops)));
        CHECK(ordered);
    }
}

TEST_CASE("materialized generators are trace-orthonormal") {
    SiteOperatorBasis b = single_site_basis(Spin::half());
    GeneratorDescriptor z0{{0}, {3}, {}};
    MatrixXc m = materialize(z0, 2, b);
    CHECK((m - Eigen::Vector4cd(1, 1, -1, -1).asDiagonal().toDenseMatrix() / 2.0).norm() < 1e-15);
    MatrixXc id = materialize(GeneratorDescriptor{}, 3, b);
    CHECK((id - MatrixXc::Identity(8, 8) / std::sqrt(8.0)).norm() < 1e-15);

    for (Spin s : {Spin::half(), Spin::one()}) {
        const int L = s.twice == 1 ? 5 : 3;
        SiteOperatorBasis sb = single_site_basis(s);
        std::vector<GeneratorDescriptor> all;
        for_each_descriptor(L, sb, [&](const GeneratorDescriptor& d) {
            all.push_back(d);
            return true;
        });
        std::mt19937 rng(5);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        for (int trial = 0; trial < 200; ++trial) {
            const auto& a = all[pick(rng)];
            const auto& c = all[pick(rng)];
            MatrixXc ma = materialize(a, L, sb), mc = materialize(c, L, sb);
            CHECK(std::abs(trace_product(ma, mc) - (a == c ? 1.0 : 0.0)) < 1e-12);
            // fast application agrees with the dense matrix
            MatrixXc in = MatrixXc::Random(ma.rows(), 3), out;
            apply_generator(a, L, sb, in, out);
            CHECK((out - ma * in).norm() < 1e-12);
        }
    }
}

TEST_CASE("Pauli-string trace identities") {
    SiteOperatorBasis b = single_site_basis(Spin::half());
    const int L = 4;
    const double D = 16;
    std::vector<GeneratorDescriptor> all;
    for_each_descriptor(L, b, [&](const GeneratorDescriptor& d) {
        all.push_back(d);
        return true;
    });
    std::mt19937 rng(9);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    for (int trial = 0; trial < 100; ++trial) {
        MatrixXc A = materialize(all[pick(rng)], L, b), B = materialize(all[pick(rng)], L, b);
        CHECK(std::abs((A * A * B * B).trace().real() - 1.0 / D) < 1e-12);
        CHECK(std::abs(std::abs((A * B * A * B).trace().real()) - 1.0 / D) < 1e-12);
    }
}

TEST_CASE("manifest") {
    GeneratorSet g = build_generator_set(4, Spin::half(), Threshold{1, 1, 0}, Convention::T1);
    auto m = g.manifest();
    CHECK(m["N_loc"] == 12);
    CHECK(m["easy"].size() == 12);
    CHECK(m["convention"] == "T1");
}
