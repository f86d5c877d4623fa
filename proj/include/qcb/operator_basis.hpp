#pragma once

#include "qcb/types.hpp"

#include "json.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qcb {

enum class Axis { X, Y, Z };

// Generalized spin matrices, normalized so that [S_a, S_b] = 2i eps_abc S_c.
// Basis state j = 0..2s carries S_z eigenvalue 2(s - j).
MatrixXc single_site_spin(Spin s, Axis axis);
MatrixXc single_site_spin(double s, Axis axis);

struct SiteOperatorBasis {
    Spin spin;
    std::vector<MatrixXc> elements;  // Tr[e_i e_j] = delta_ij
    std::vector<int> internal_degree;  // multipole rank J of each element
    int identity_index = 0;

    int size() const { return static_cast<int>(elements.size()); }
    int local_dim() const { return spin.local_dim(); }
};

// Ordering: J ascending; inside a rank, M = 1..J as (cos, sin) pairs, then M = 0.
// For s = 1/2 this is {I, S_x, S_y, S_z}/sqrt(2).
SiteOperatorBasis single_site_basis(Spin s);

// Condon-Shortley Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, all arguments doubled.
double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M);

// Standard Gell-Mann matrices lambda_1..lambda_8 in the spin-1 site basis.
std::vector<MatrixXc> gell_mann_site();
// f_abc and d_abc of su(3) from [t_a,t_b] = 2i f_abc t_c, {t_a,t_b} = 4/3 delta_ab + 2 d_abc t_c.
double su3_f(int a, int b, int c);
double su3_d(int a, int b, int c);

struct Locality {
    int k_op = 0;
    int k_sp = 0;
    int k_int = 0;
    bool operator==(const Locality&) const = default;
};

struct GeneratorDescriptor {
    std::vector<int> sites;     // sorted, 0-based
    std::vector<int> site_ops;  // indices into SiteOperatorBasis, never the identity
    Locality degrees;

    bool operator==(const GeneratorDescriptor& o) const { return sites == o.sites && site_ops == o.site_ops; }
};

Locality locality_degrees(std::span<const int> sites, std::span<const int> site_ops, int L,
                          const SiteOperatorBasis& basis);
Locality locality_degrees(const GeneratorDescriptor& d, int L, const SiteOperatorBasis& basis);
int spatial_window(std::span<const int> sorted_sites, int L);

enum class Convention { T1, T2, T3, FirstN };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& s);

struct Threshold {
    int k_op = 2;
    int k_sp = 2;
    int k_int = 0;  // <= 0 means unrestricted
    bool operator==(const Threshold&) const = default;
};

struct GeneratorSetOptions {
    int removed_site = 0;        // T3: first site of the removed window
    bool identity_easy = false;  // count the identity as an easy generator
    std::size_t first_n = 0;     // FirstN: number of leading canonical descriptors
    bool operator==(const GeneratorSetOptions&) const = default;
};

// Easy/hard split of the traceless generators of U(D). Only the easy subset is stored;
// hard descriptors are produced on demand.
class GeneratorSet {
public:
    int L = 0;
    Spin spin;
    Threshold threshold;
    Convention convention = Convention::T1;
    GeneratorSetOptions options;
    SiteOperatorBasis site;
    std::vector<GeneratorDescriptor> easy;

    std::size_t n_loc() const { return easy.size() + (options.identity_easy ? 1 : 0); }
    std::uint64_t dimension() const;
    std::uint64_t total_traceless() const;  // D^2 - 1
    bool is_easy(const GeneratorDescriptor& d) const;
    void for_each_hard(const std::function<void(const GeneratorDescriptor&)>& f) const;
    std::uint64_t hash() const;
    nlohmann::json manifest() const;
};

GeneratorSet build_generator_set(int L, Spin s, Threshold threshold, Convention convention,
                                 GeneratorSetOptions options = {});

// Descriptors removed from T1(k) by T3: all-nontrivial strings on sites l..l+k-1 (periodic).
bool in_removed_window(const GeneratorDescriptor& d, int L, int k, int l);

// Visit every traceless descriptor in canonical order (k_op, sites, ops).
// Returning false from the visitor stops the walk.
void for_each_descriptor(int L, const SiteOperatorBasis& basis,
                         const std::function<bool(const GeneratorDescriptor&)>& f,
                         int max_k_op = -1, int max_k_sp = -1);

// Dense D x D matrix of a descriptor with Tr[T^2] = 1. Empty descriptor gives I/sqrt(D).
MatrixXc materialize(const GeneratorDescriptor& d, int L, const SiteOperatorBasis& basis);

// out = T * in, without forming T. in has D rows.
void apply_generator(const GeneratorDescriptor& d, int L, const SiteOperatorBasis& basis,
                     const MatrixXc& in, MatrixXc& out);

// Kronecker product of site operators placed on the given sites, identity elsewhere (no scaling).
MatrixXc embed_sites(const std::vector<std::pair<int, MatrixXc>>& factors, int L, int d);
// Embed a dense operator acting on `sites` (in that tensor order) into the chain.
MatrixXc embed_local(const MatrixXc& local, const std::vector<int>& sites, int L, int d);
// acc += coeff * embed_local(local, sites, L, d), without the temporary.
void add_local(MatrixXc& acc, const MatrixXc& local, const std::vector<int>& sites, int L, int d,
               cplx coeff = 1.0);
MatrixXc kron(const MatrixXc& a, const MatrixXc& b);

} // namespace qcb
