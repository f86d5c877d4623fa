#include "qcb/degenerate.hpp"
#include "qcb/model_zoo.hpp"
#include "qcb/qmatrix.hpp"
#include "qcb/spectral.hpp"

#include "doctest.h"

#include <cmath>
#include <numeric>

using namespace qcb;

namespace {

SpectralDecomposition eigenbasis(const ModelSpec& spec, bool split = true) {
    auto nh = normalize_hamiltonian(build_hamiltonian(spec));
    auto dec = diagonalize(nh.H, 1e-8, true);
    if (!split) return dec;
    std::vector<MatrixXc> ops;
    for (auto k : default_presplit(spec)) ops.push_back(symmetry_operator(spec, k));
    return presplit(dec, ops);
}

// Q built from dense generator matrices, independent of apply_generator.
MatrixXd dense_q(const SpectralDecomposition& dec, const GeneratorSet& gens) {
    const Index D = dec.dim();
    MatrixXd M(static_cast<Index>(gens.easy.size()), D);
    for (std::size_t a = 0; a < gens.easy.size(); ++a) {
        MatrixXc T = materialize(gens.easy[a], gens.L, gens.site);
        for (Index n = 0; n < D; ++n) M(static_cast<Index>(a), n) = dec.vectors.col(n).dot(T * dec.vectors.col(n)).real();
    }
    return MatrixXd::Identity(D, D) - M.transpose() * M;
}

} // namespace

TEST_CASE("degeneracy grouping") {
    VectorXd e(6);
    e << -1.0, -1.0 + 1e-12, 0.0, 0.5, 0.5, 0.5 + 1e-11;
    auto b = group_degeneracies(e, 1e-8);
    REQUIRE(b.size() == 3);
    CHECK(b[0].size == 2);
    CHECK(b[1].size == 1);
    CHECK(b[2].begin == 3);
    CHECK(b[2].size == 3);
}

TEST_CASE("diagonalize") {
    ModelSpec spec = ModelSpec::chaotic_ising(6);
    MatrixXc H = normalize_hamiltonian(build_hamiltonian(spec)).H;
    auto dec = diagonalize(H);
    CHECK(unitarity_residual(dec.vectors) < 1e-10);
    CHECK((dec.hamiltonian() - H).norm() < 1e-10);
    CHECK(std::is_sorted(dec.energies.data(), dec.energies.data() + dec.dim()));
    MatrixXc bad = MatrixXc::Random(4, 4);
    CHECK_THROWS_AS(diagonalize(bad), NumericError);
    CHECK_THROWS_AS(diagonalize(MatrixXc::Zero(3, 4)), NumericError);
}

TEST_CASE("presplit refines blocks and keeps eigenvectors") {
    ModelSpec spec = ModelSpec::chaotic_ising(6);
    auto dec = eigenbasis(spec, false);
    auto sp = eigenbasis(spec);
    CHECK(sp.blocks.size() >= dec.blocks.size());
    CHECK(sp.max_block() <= dec.max_block());
    MatrixXc H = dec.hamiltonian();
    CHECK((sp.hamiltonian() - H).norm() < 1e-10);
    CHECK(unitarity_residual(sp.vectors) < 1e-10);
    MatrixXc P = symmetry_operator(spec, SymmetryKind::Momentum);
    MatrixXc R = sp.vectors.adjoint() * P * sp.vectors;
    for (const auto& b : sp.blocks) R.block(b.begin, b.begin, b.size, b.size).setZero();
    CHECK(R.norm() < 1e-8);
    std::size_t total = 0;
    for (const auto& b : sp.blocks) total += static_cast<std::size_t>(b.size);
    CHECK(total == static_cast<std::size_t>(sp.dim()));

    std::vector<MatrixXc> bad{MatrixXc::Random(dec.dim(), dec.dim())};
    bad[0] = (bad[0] + bad[0].adjoint()).eval();
    CHECK_THROWS_AS(presplit(dec, bad), ConfigError);
}

TEST_CASE("block rotations stay eigenvectors") {
    auto dec = eigenbasis(ModelSpec::default_xxz(6));
    MatrixXc U = random_block_rotation(dec, 7);
    CHECK(unitarity_residual(U) < 1e-10);
    auto rot = rotate_blocks(dec, U);
    CHECK((rot.hamiltonian() - dec.hamiltonian()).norm() < 1e-10);
}

TEST_CASE("Q-matrix against dense generators") {
    ModelSpec spec = ModelSpec::chaotic_ising(4);
    auto dec = eigenbasis(spec);
    auto gens = build_generator_set(4, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    QMatrix q = build_q(dec, gens);
    CHECK((q.matrix - dense_q(dec, gens)).norm() < 1e-12);
    CHECK((q.matrix - q.matrix.transpose()).norm() == 0.0);
    CHECK(q.eigenvalues.minCoeff() > -1e-10);
    CHECK(q.eigenvalues.maxCoeff() < 1.0 + 1e-10);
    CHECK(q.mean == doctest::Approx(q.matrix.trace() / 16.0));
    MatrixXd Q2 = q.matrix * q.matrix;
    CHECK(q.variance == doctest::Approx(Q2.trace() / 16.0 - q.mean * q.mean));
}

TEST_CASE("Q-matrix fixed vectors") {
    ModelSpec spec = ModelSpec::chaotic_ising(6);
    auto dec = eigenbasis(spec);
    auto gens = build_generator_set(6, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    QMatrix q = build_q(dec, gens);
    // the identity is orthogonal to traceless generators, so Q 1 = 1
    VectorXd one = VectorXd::Ones(dec.dim());
    CHECK((q.matrix * one - one).norm() < 1e-10);
    // a nearest-neighbour H is spanned by the easy generators: Q E = 0
    CHECK((q.matrix * dec.energies).norm() < 1e-10);
    CHECK(q.kernel_dim == 1);
    CHECK(rank_oracle(dec, gens) == 1);

    auto with_id = build_generator_set(6, Spin::half(), Threshold{2, 2, 0}, Convention::T1,
                                       GeneratorSetOptions{0, true, 0});
    QMatrix qi = build_q(dec, with_id);
    CHECK((qi.matrix * one).norm() < 1e-10);
    CHECK(qi.kernel_dim == 2);
}

TEST_CASE("conserved laws of the transverse Ising chain") {
    ModelSpec spec = ModelSpec::transverse_ising(6);
    auto dec = eigenbasis(spec);
    auto gens = build_generator_set(6, Spin::half(), Threshold{3, 3, 0}, Convention::T1);
    auto pb = preferred_basis(dec, gens);
    CHECK(pb.kernel_dim >= 2);
    CHECK(pb.kernel_dim == rank_oracle(pb.basis, gens));
    auto laws = extract_conserved_laws(pb.q, pb.basis, gens);
    REQUIRE(static_cast<int>(laws.size()) == pb.kernel_dim);
    for (const auto& l : laws) {
        CHECK(l.commutator_residual < 1e-9);
        CHECK(std::abs(l.quadratic_form) < 1e-9);
        CHECK(l.easy_coefficients.norm() == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("enlarged Q reproduces Q of any rotated basis") {
    ModelSpec spec = ModelSpec::default_xxz(6);
    auto dec = eigenbasis(spec);
    auto gens = build_generator_set(6, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    EnlargedQ eq = build_enlarged_q(dec, gens);
    CHECK(static_cast<std::size_t>(eq.dim()) == dec.enlarged_dim());
    CHECK(eq.eigenvalues.minCoeff() > -1e-10);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        MatrixXc U = random_block_rotation(dec, seed);
        QMatrix a = reconstruct_q_from_qtilde(eq, dec, U);
        QMatrix b = build_q(rotate_blocks(dec, U), gens);
        CHECK((a.matrix - b.matrix).norm() < 1e-9);
    }
    // kernel operators commute with H and lie in the easy span
    MatrixXc H = dec.hamiltonian();
    MatrixXd kc = kernel_easy_coefficients(eq, dec, gens);
    for (int c = 0; c < eq.kernel_dim; ++c) {
        VectorXd v = eq.kernel.col(c);
        MatrixXc O = kernel_operator(eq, dec, v).to_full(dec);
        CHECK(relative_commutator(H, O) < 1e-9);
        CHECK(kc.row(c).norm() == doctest::Approx(O.norm()).epsilon(1e-8));
    }
}

TEST_CASE("preferred basis never loses kernel") {
    ModelSpec spec = ModelSpec::default_xxz(6);
    auto dec = eigenbasis(spec);
    auto gens = build_generator_set(6, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    auto ref = preferred_basis(dec, gens);
    CHECK(ref.kernel_dim >= ref.input_kernel_dim);
    CHECK(ref.kernel_dim <= ref.enlarged_kernel_dim);
    CHECK(unitarity_residual(ref.rotation) < 1e-9);
    CHECK((ref.basis.hamiltonian() - dec.hamiltonian()).norm() < 1e-9);
    for (std::uint64_t seed : {11u, 12u}) {
        auto rot = rotate_blocks(dec, random_block_rotation(dec, seed));
        auto pb = preferred_basis(rot, gens);
        CHECK(pb.kernel_dim == ref.kernel_dim);
        CHECK(pb.kernel_dim >= build_q(rot, gens).kernel_dim);
    }
}

TEST_CASE("histogram") {
    VectorXd e(5);
    e << -1e-14, 0.1, 0.5, 0.99, 1.0 + 1e-14;
    auto h = q_histogram(e, 10);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == 5);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[1] == 1);
    CHECK(h.counts[5] == 1);
    CHECK(h.counts[9] == 2);
    CHECK_THROWS_AS(q_histogram(e, 0), ConfigError);
}

TEST_CASE("size guards") {
    auto gens = build_generator_set(3, Spin::half(), Threshold{2, 2, 0}, Convention::T1);
    auto dec = diagonalize(MatrixXc::Identity(4, 4));
    CHECK_THROWS_AS(build_q(dec, gens), ConfigError);
}
