#pragma once

#include "qcb/operator_basis.hpp"
#include "qcb/types.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace qcb {

enum class Family { Ising, XYZ, Spin1Naive, Spin1Integrable };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ModelSpec {
    Family family = Family::Ising;
    int L = 8;
    double h_x = 0.0;
    double h_z = 0.0;
    double J_x = 0.0;
    double J_y = 0.0;
    double J_z = 0.0;

    Spin spin() const;
    std::uint64_t dimension() const;
    bool is_xxz() const { return family == Family::XYZ && J_x == J_y; }
    void validate() const;
    nlohmann::json to_json() const;
    bool operator==(const ModelSpec&) const = default;

    static ModelSpec ising(int L, double h_x, double h_z);
    static ModelSpec xyz(int L, double J_x, double J_y, double J_z, double h_z = 0.0);
    static ModelSpec spin1_naive(int L);
    static ModelSpec spin1_integrable(int L);

    // Parameter points used throughout the numerics.
    static ModelSpec chaotic_ising(int L) { return ising(L, -1.05, 0.5); }
    static ModelSpec transverse_ising(int L) { return ising(L, -1.05, 0.0); }
    static ModelSpec default_xyz(int L) { return xyz(L, -0.35, 0.5, -0.1); }
    static ModelSpec default_xxz(int L) { return xyz(L, -0.35, -0.35, -0.1); }
    static ModelSpec chaotic_xyz(int L) { return xyz(L, -0.35, 0.5, -0.1, 0.8); }
};

// Translation-invariant operator sum_j tau^j(local) where `local` acts on `window`
// consecutive sites starting at j (periodic).
MatrixXc translation_sum(const MatrixXc& local, int window, int L, int d);

// Two-site (or k-site) density of the Hamiltonian, acting on consecutive sites.
MatrixXc hamiltonian_density(const ModelSpec& spec, int* window = nullptr);
MatrixXc build_hamiltonian(const ModelSpec& spec);

struct NormalizedHamiltonian {
    MatrixXc H;
    double scale = 1.0;  // H_normalized = scale * H
};
NormalizedHamiltonian normalize_hamiltonian(const MatrixXc& H);

enum class SymmetryKind { Translation, Momentum, Parity, SpinFlip, Jz, J2, SU3Cartan3, SU3Cartan8, SU3Casimir };

std::string to_string(SymmetryKind k);
SymmetryKind symmetry_from_string(const std::string& s);

// Errors with ConfigError when the symmetry is not available for the family.
MatrixXc symmetry_operator(const ModelSpec& spec, SymmetryKind kind);
std::vector<SymmetryKind> available_symmetries(const ModelSpec& spec);
// Presplit list used when the configuration does not give one.
std::vector<SymmetryKind> default_presplit(const ModelSpec& spec);

struct Charge {
    std::string label;
    MatrixXc op;
    Locality declared;
    MatrixXc density;  // acting on `window` consecutive sites
    int window = 0;
};

struct ChargeTower {
    Family family = Family::Ising;
    std::vector<Charge> charges;
};

// Ising(h_z = 0): I_1..I_6. XYZ(h_z = 0): I_1. Spin1Integrable: H_3, H_4.
ChargeTower conserved_tower(const ModelSpec& spec, int n_charges);
// Charge densities alone (no chain embedding); used for locality checks.
Charge charge_density(const ModelSpec& spec, int index);

// Locality of an operator on `window` consecutive sites, from its expansion in the
// product basis: maxima over terms with |coefficient| > tol.
Locality expansion_locality(const MatrixXc& local, int window, const SiteOperatorBasis& basis,
                            double tol = 1e-12);

// ||[A,B]||_F / (||A||_F ||B||_F)
double relative_commutator(const MatrixXc& a, const MatrixXc& b);

} // namespace qcb
