#include "qcb/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qcb {

namespace {

MatrixXc product(const std::vector<MatrixXc>& ops) {
    MatrixXc m = MatrixXc::Identity(1, 1);
    for (const auto& o : ops) m = kron(m, o);
    return m;
}

struct Pauli {
    MatrixXc I, X, Y, Z;
    Pauli() {
        I = MatrixXc::Identity(2, 2);
        X = single_site_spin(Spin::half(), Axis::X);
        Y = single_site_spin(Spin::half(), Axis::Y);
        Z = single_site_spin(Spin::half(), Axis::Z);
    }
};

// a X X ... X b with n X's in between
MatrixXc xstring(const MatrixXc& a, int n, const MatrixXc& b, const Pauli& p) {
    std::vector<MatrixXc> ops{a};
    for (int i = 0; i < n; ++i) ops.push_back(p.X);
    ops.push_back(b);
    return product(ops);
}

// Pad a density on w sites with identities on the right up to `window` sites.
MatrixXc pad(const MatrixXc& local, int w, int window, int d) {
    MatrixXc r = local;
    for (int i = w; i < window; ++i) r = kron(r, MatrixXc::Identity(d, d));
    return r;
}

// Permutation operator |a> -> |perm(a)> where the digit of site j moves to site map[j].
MatrixXc site_permutation(const std::vector<int>& map, int L, int d) {
    const Index D = static_cast<Index>(checked_pow(d, L));
    MatrixXc P = MatrixXc::Zero(D, D);
    std::vector<int> digits(L), out(L);
    for (Index idx = 0; idx < D; ++idx) {
        Index rem = idx;
        for (int j = L - 1; j >= 0; --j) {
            digits[j] = static_cast<int>(rem % d);
            rem /= d;
        }
        for (int j = 0; j < L; ++j) out[map[j]] = digits[j];
        Index target = 0;
        for (int j = 0; j < L; ++j) target = target * d + out[j];
        P(target, idx) = 1.0;
    }
    return P;
}

std::vector<int> shift_map(int L) {
    std::vector<int> m(L);
    for (int j = 0; j < L; ++j) m[j] = (j + 1) % L;
    return m;
}

MatrixXc total_spin(const ModelSpec& spec, Axis a) {
    const int d = spec.spin().local_dim();
    return translation_sum(single_site_spin(spec.spin(), a), 1, spec.L, d);
}

// sum_a (sum_j A_a^j)^2 built from one- and two-site pieces.
MatrixXc quadratic_casimir(const std::vector<MatrixXc>& gens, int L, int d) {
    const Index D = static_cast<Index>(checked_pow(d, L));
    MatrixXc one = MatrixXc::Zero(d, d);
    MatrixXc two = MatrixXc::Zero(d * d, d * d);
    for (const auto& g : gens) {
        one += g * g;
        two += kron(g, g);
    }
    MatrixXc c = MatrixXc::Zero(D, D);
    for (int j = 0; j < L; ++j) {
        add_local(c, one, {j}, L, d);
        for (int k = 0; k < L; ++k)
            if (k != j) add_local(c, two, {j, k}, L, d);
    }
    return c;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

std::string to_string(Family f) {
    switch (f) {
    case Family::Ising: return "ising";
    case Family::XYZ: return "xyz";
    case Family::Spin1Naive: return "spin1_naive";
    case Family::Spin1Integrable: return "spin1_integrable";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    if (s == "ising") return Family::Ising;
    if (s == "xyz") return Family::XYZ;
    if (s == "spin1_naive") return Family::Spin1Naive;
    if (s == "spin1_integrable") return Family::Spin1Integrable;
    throw ConfigError("unknown model family '" + s + "'");
}

Spin ModelSpec::spin() const {
    return (family == Family::Spin1Naive || family == Family::Spin1Integrable) ? Spin::one() : Spin::half();
}

std::uint64_t ModelSpec::dimension() const { return checked_pow(spin().local_dim(), L); }

void ModelSpec::validate() const {
    require(L >= 2, "model L must be at least 2");
    require(L <= 14, "model L must be at most 14");
    for (double v : {h_x, h_z, J_x, J_y, J_z}) require(std::isfinite(v), "model couplings must be finite");
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j;
    j["family"] = to_string(family);
    j["L"] = L;
    j["spin"] = spin().value();
    switch (family) {
    case Family::Ising:
        j["h_x"] = h_x;
        j["h_z"] = h_z;
        break;
    case Family::XYZ:
        j["J_x"] = J_x;
        j["J_y"] = J_y;
        j["J_z"] = J_z;
        j["h_z"] = h_z;
        break;
    default: break;
    }
    return j;
}

ModelSpec ModelSpec::ising(int L, double h_x, double h_z) {
    ModelSpec s;
    s.family = Family::Ising;
    s.L = L;
    s.h_x = h_x;
    s.h_z = h_z;
    return s;
}

ModelSpec ModelSpec::xyz(int L, double J_x, double J_y, double J_z, double h_z) {
    ModelSpec s;
    s.family = Family::XYZ;
    s.L = L;
    s.J_x = J_x;
    s.J_y = J_y;
    s.J_z = J_z;
    s.h_z = h_z;
    return s;
}

ModelSpec ModelSpec::spin1_naive(int L) {
    ModelSpec s;
    s.family = Family::Spin1Naive;
    s.L = L;
    return s;
}

ModelSpec ModelSpec::spin1_integrable(int L) {
    ModelSpec s;
    s.family = Family::Spin1Integrable;
    s.L = L;
    return s;
}

MatrixXc translation_sum(const MatrixXc& local, int window, int L, int d) {
    if (window > L) throw ConfigError("operator window exceeds chain length");
    const Index D = static_cast<Index>(checked_pow(d, L));
    MatrixXc out = MatrixXc::Zero(D, D);
    std::vector<int> sites(window);
    for (int j = 0; j < L; ++j) {
        for (int i = 0; i < window; ++i) sites[i] = (j + i) % L;
        add_local(out, local, sites, L, d);
    }
    return out;
}

MatrixXc hamiltonian_density(const ModelSpec& spec, int* window) {
    spec.validate();
    if (window) *window = 2;
    switch (spec.family) {
    case Family::Ising: {
        Pauli p;
        return -(kron(p.Z, p.Z) + spec.h_x * kron(p.X, p.I) + spec.h_z * kron(p.Z, p.I));
    }
    case Family::XYZ: {
        Pauli p;
        return spec.J_x * kron(p.X, p.X) + spec.J_y * kron(p.Y, p.Y) + spec.J_z * kron(p.Z, p.Z) -
               spec.h_z * kron(p.Z, p.I);
    }
    case Family::Spin1Naive:
    case Family::Spin1Integrable: {
        MatrixXc x = MatrixXc::Zero(9, 9);
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            MatrixXc s = single_site_spin(Spin::one(), a);
            x += kron(s, s);
        }
        if (spec.family == Family::Spin1Naive) return x;
        return 0.5 * (x + 0.25 * x * x - (16.0 / 3.0) * MatrixXc::Identity(9, 9));
    }
    }
    throw ConfigError("unknown model family");
}

MatrixXc build_hamiltonian(const ModelSpec& spec) {
    int w = 2;
    MatrixXc h = hamiltonian_density(spec, &w);
    return translation_sum(h, w, spec.L, spec.spin().local_dim());
}

NormalizedHamiltonian normalize_hamiltonian(const MatrixXc& H) {
    double tr2 = H.squaredNorm();  // Tr[H^2] = ||H||_F^2 for Hermitian H
    if (!(tr2 > 0.0)) throw NumericError("cannot normalize a zero Hamiltonian");
    double scale = 1.0 / std::sqrt(tr2);
    return {H * scale, scale};
}

std::string to_string(SymmetryKind k) {
    switch (k) {
    case SymmetryKind::Translation: return "translation";
    case SymmetryKind::Momentum: return "momentum";
    case SymmetryKind::Parity: return "parity";
    case SymmetryKind::SpinFlip: return "spinflip";
    case SymmetryKind::Jz: return "jz";
    case SymmetryKind::J2: return "j2";
    case SymmetryKind::SU3Cartan3: return "su3_cartan3";
    case SymmetryKind::SU3Cartan8: return "su3_cartan8";
    case SymmetryKind::SU3Casimir: return "su3_casimir";
    }
    return "?";
}

SymmetryKind symmetry_from_string(const std::string& s) {
    for (SymmetryKind k : {SymmetryKind::Translation, SymmetryKind::Momentum, SymmetryKind::Parity,
                           SymmetryKind::SpinFlip, SymmetryKind::Jz, SymmetryKind::J2,
                           SymmetryKind::SU3Cartan3, SymmetryKind::SU3Cartan8, SymmetryKind::SU3Casimir})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown symmetry '" + s + "'");
}

std::vector<SymmetryKind> available_symmetries(const ModelSpec& spec) {
    std::vector<SymmetryKind> v{SymmetryKind::Translation, SymmetryKind::Momentum, SymmetryKind::Parity};
    bool spin1 = spec.spin().twice == 2;
    if (spec.family == Family::Ising && spec.h_z == 0.0) v.push_back(SymmetryKind::SpinFlip);
    if (spin1 || spec.is_xxz()) v.push_back(SymmetryKind::Jz);
    if (spin1 || (spec.is_xxz() && spec.J_z == spec.J_x && spec.h_z == 0.0)) v.push_back(SymmetryKind::J2);
    if (spec.family == Family::Spin1Integrable) {
        v.push_back(SymmetryKind::SU3Cartan3);
        v.push_back(SymmetryKind::SU3Cartan8);
        v.push_back(SymmetryKind::SU3Casimir);
    }
    return v;
}

std::vector<SymmetryKind> default_presplit(const ModelSpec& spec) {
    switch (spec.family) {
    case Family::Ising: return {SymmetryKind::Momentum};
    case Family::XYZ:
        if (spec.is_xxz() && spec.J_z == spec.J_x && spec.h_z == 0.0)
            return {SymmetryKind::Momentum, SymmetryKind::Jz, SymmetryKind::J2};
        if (spec.is_xxz()) return {SymmetryKind::Momentum, SymmetryKind::Jz};
        return {SymmetryKind::Momentum};
    case Family::Spin1Naive: return {SymmetryKind::Momentum, SymmetryKind::Jz, SymmetryKind::J2};
    case Family::Spin1Integrable:
        return {SymmetryKind::Momentum, SymmetryKind::SU3Cartan3, SymmetryKind::SU3Cartan8,
                SymmetryKind::SU3Casimir};
    }
    return {};
}

MatrixXc symmetry_operator(const ModelSpec& spec, SymmetryKind kind) {
    spec.validate();
    auto avail = available_symmetries(spec);
    if (std::find(avail.begin(), avail.end(), kind) == avail.end())
        throw ConfigError("symmetry '" + to_string(kind) + "' is not available for " + to_string(spec.family) +
                          " at these couplings");
    const int L = spec.L;
    const int d = spec.spin().local_dim();
    switch (kind) {
    case SymmetryKind::Translation: return site_permutation(shift_map(L), L, d);
    case SymmetryKind::Momentum: {
        // P = i log T = -sum_q theta_q Pi_q, Pi_q = (1/L) sum_r e^{-i theta_q r} T^r, theta_q in (-pi, pi]
        std::vector<cplx> c(L, 0.0);
        for (int q = -((L - 1) / 2); q <= L / 2; ++q) {
            double theta = 2.0 * std::numbers::pi * q / L;
            for (int r = 0; r < L; ++r) c[r] -= theta * std::exp(cplx(0, -theta * r)) / double(L);
        }
        const Index D = static_cast<Index>(checked_pow(d, L));
        MatrixXc T = site_permutation(shift_map(L), L, d);
        MatrixXc P = MatrixXc::Zero(D, D);
        MatrixXc Tr = MatrixXc::Identity(D, D);
        for (int r = 0; r < L; ++r) {
            P += c[r] * Tr;
            Tr = T * Tr;
        }
        return 0.5 * (P + P.adjoint());
    }
    case SymmetryKind::Parity: {
        std::vector<int> m(L);
        for (int j = 0; j < L; ++j) m[j] = L - 1 - j;
        return site_permutation(m, L, d);
    }
    case SymmetryKind::SpinFlip: {
        std::vector<std::pair<int, MatrixXc>> f;
        for (int j = 0; j < L; ++j) f.emplace_back(j, single_site_spin(Spin::half(), Axis::X));
        return embed_sites(f, L, d);
    }
    case SymmetryKind::Jz: return total_spin(spec, Axis::Z);
    case SymmetryKind::J2: {
        std::vector<MatrixXc> g;
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) g.push_back(single_site_spin(spec.spin(), a));
        return quadratic_casimir(g, L, d);
    }
    case SymmetryKind::SU3Cartan3: return translation_sum(gell_mann_site()[2], 1, L, d);
    case SymmetryKind::SU3Cartan8: return translation_sum(gell_mann_site()[7], 1, L, d);
    case SymmetryKind::SU3Casimir: return quadratic_casimir(gell_mann_site(), L, d);
    }
    throw ConfigError("unknown symmetry");
}

Charge charge_density(const ModelSpec& spec, int index) {
    spec.validate();
    Charge c;
    switch (spec.family) {
    case Family::Ising: {
        if (spec.h_z != 0.0) throw ConfigError("no conserved tower: Ising with h_z != 0 is chaotic");
        if (index < 1 || index > 6) throw ConfigError("Ising tower implemented for I_1..I_6");
        Pauli p;
        const double hx = spec.h_x;
        if (index % 2 == 1) {
            int l = (index + 1) / 2;
            c.window = l + 1;
            c.density = xstring(p.Y, l - 1, p.Z, p) - xstring(p.Z, l - 1, p.Y, p);
            c.declared = {l + 1, l + 1, l + 1};
        } else {
            int l = index / 2;
            c.window = l + 2;
            MatrixXc top = xstring(p.Z, l, p.Z, p);
            MatrixXc yy = pad(xstring(p.Y, l - 1, p.Y, p), l + 1, l + 2, 2);
            MatrixXc zz = pad(xstring(p.Z, l - 1, p.Z, p), l + 1, l + 2, 2);
            MatrixXc tail = (l == 1) ? pad(-p.X, 1, 3, 2) : pad(xstring(p.Y, l - 2, p.Y, p), l, l + 2, 2);
            c.density = top - hx * yy - hx * zz + tail;
            c.declared = {l + 2, l + 2, l + 2};
        }
        c.label = "I_" + std::to_string(index);
        return c;
    }
    case Family::XYZ: {
        if (spec.h_z != 0.0) throw ConfigError("no conserved tower: XYZ with a field is chaotic");
        if (index != 1) throw ConfigError("XYZ tower implemented for I_1 only");
        Pauli p;
        const MatrixXc S[3] = {p.X, p.Y, p.Z};
        const double J[3] = {spec.J_x, spec.J_y, spec.J_z};
        MatrixXc dens = MatrixXc::Zero(8, 8);
        // (S^ x S~) . S^ = eps_abc J_a J_c S_a S_b S_c
        const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
        for (int i = 0; i < 6; ++i) {
            int a = perms[i][0], b = perms[i][1], cc = perms[i][2];
            double eps = i < 3 ? 1.0 : -1.0;
            dens += eps * J[a] * J[cc] * product({S[a], S[b], S[cc]});
        }
        c.label = "I_1";
        c.window = 3;
        c.density = dens;
        c.declared = {3, 3, 3};
        return c;
    }
    case Family::Spin1Integrable: {
        if (index < 3 || index > 4) throw ConfigError("spin-1 tower implemented for H_3 and H_4");
        auto t = gell_mann_site();
        if (index == 3) {
            MatrixXc dens = MatrixXc::Zero(27, 27);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b)
                    for (int e = 0; e < 8; ++e) {
                        double f = su3_f(a, b, e);
                        if (f != 0.0 && std::abs(f) > 1e-14) dens += f * product({t[a], t[b], t[e]});
                    }
            c.label = "H_3";
            c.window = 3;
            c.density = dens;
            c.declared = {3, 3, 5};
        } else {
            MatrixXc dens = MatrixXc::Zero(81, 81);
            MatrixXc id = MatrixXc::Identity(3, 3);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b) {
                    MatrixXc ab;
                    for (int q = 0; q < 8; ++q) {
                        double f1 = su3_f(a, b, q);
                        if (std::abs(f1) < 1e-14) continue;
                        if (ab.size() == 0) ab = kron(t[a], t[b]);
                        for (int cc = 0; cc < 8; ++cc)
                            for (int e = 0; e < 8; ++e) {
                                double f2 = su3_f(q, cc, e);
                                if (std::abs(f2) < 1e-14) continue;
                                dens += (f1 * f2) * kron(ab, kron(t[cc], t[e]));
                            }
                    }
                }
            for (int a = 0; a < 8; ++a) dens += product({t[a], id, t[a], id});
            c.label = "H_4";
            c.window = 4;
            c.density = dens;
            c.declared = {4, 4, 8};
        }
        return c;
    }
    case Family::Spin1Naive: throw ConfigError("no conserved tower for the non-integrable spin-1 chain");
    }
    throw ConfigError("unknown model family");
}

ChargeTower conserved_tower(const ModelSpec& spec, int n_charges) {
    ChargeTower tower;
    tower.family = spec.family;
    const int d = spec.spin().local_dim();
    int first = spec.family == Family::Spin1Integrable ? 3 : 1;
    for (int i = 0; i < n_charges; ++i) {
        Charge c = charge_density(spec, first + i);
        c.op = translation_sum(c.density, c.window, spec.L, d);
        tower.charges.push_back(std::move(c));
    }
    return tower;
}

Locality expansion_locality(const MatrixXc& local, int window, const SiteOperatorBasis& basis,
                            double tol) {
    const int nb = basis.size();
    std::vector<int> idx(window, 0);
    Locality best;
    while (true) {
        std::vector<MatrixXc> ops;
        for (int i = 0; i < window; ++i) ops.push_back(basis.elements[idx[i]]);
        MatrixXc A = product(ops);
        // Tr[A O] with A Hermitian
        cplx coeff = (A.transpose().array() * local.array()).sum();
        if (std::abs(coeff) > tol) {
            int kop = 0, kint = 0, lo = window, hi = -1;
            for (int i = 0; i < window; ++i) {
                if (idx[i] == basis.identity_index) continue;
                ++kop;
                kint += basis.internal_degree[idx[i]];
                lo = std::min(lo, i);
                hi = std::max(hi, i);
            }
            int ksp = hi >= lo ? hi - lo + 1 : 0;
            best.k_op = std::max(best.k_op, kop);
            best.k_sp = std::max(best.k_sp, ksp);
            best.k_int = std::max(best.k_int, kint);
        }
        int p = window - 1;
        while (p >= 0 && ++idx[p] == nb) idx[p--] = 0;
        if (p < 0) break;
    }
    return best;
}

double relative_commutator(const MatrixXc& a, const MatrixXc& b) {
    MatrixXc c = a * b - b * a;
    double den = a.norm() * b.norm();
    return den > 0 ? c.norm() / den : 0.0;
}

} // namespace qcb
