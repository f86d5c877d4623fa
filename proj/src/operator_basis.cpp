#include "qcb/operator_basis.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

namespace qcb {

namespace {

constexpr int kMaxSites = 14;

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Fix the overall sign: first nonzero entry (row-major) gets a positive real part,
// or a negative imaginary part when it is purely imaginary.
void fix_sign(MatrixXc& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            cplx z = m(i, j);
            if (std::abs(z) < 1e-12) continue;
            bool flip = std::abs(z.real()) > 1e-12 ? z.real() < 0 : z.imag() > 0;
            if (flip) m = -m;
            return;
        }
    }
}

void normalize_hs(MatrixXc& m) {
    double n2 = (m * m).trace().real();
    m /= std::sqrt(n2);
}

// Apply a d x d matrix on tensor factor `site` of every column of x, in place.
void apply_site(const MatrixXc& a, int site, int L, int d, MatrixXc& x) {
    const Index D = x.rows();
    Index stride = 1;
    for (int j = site + 1; j < L; ++j) stride *= d;
    const Index block = stride * d;
    std::array<cplx, 8> v{}, w{};
    for (Index c = 0; c < x.cols(); ++c) {
        cplx* col = x.col(c).data();
        for (Index base = 0; base < D; base += block) {
            for (Index r = 0; r < stride; ++r) {
                for (int p = 0; p < d; ++p) v[p] = col[base + p * stride + r];
                for (int p = 0; p < d; ++p) {
                    cplx s = 0;
                    for (int q = 0; q < d; ++q) s += a(p, q) * v[q];
                    w[p] = s;
                }
                for (int p = 0; p < d; ++p) col[base + p * stride + r] = w[p];
            }
        }
    }
}

bool canonical_less(const GeneratorDescriptor& a, const GeneratorDescriptor& b) {
    if (a.sites.size() != b.sites.size()) return a.sites.size() < b.sites.size();
    if (a.sites != b.sites) return a.sites < b.sites;
    return a.site_ops < b.site_ops;
}

std::vector<int> nontrivial_ops(const SiteOperatorBasis& basis) {
    std::vector<int> ops;
    for (int i = 0; i < basis.size(); ++i)
        if (i != basis.identity_index) ops.push_back(i);
    return ops;
}

} // namespace

MatrixXc single_site_spin(Spin s, Axis axis) {
    if (s.twice < 1) throw ConfigError("spin must be positive");
    const int n = s.local_dim();
    const double two_s = s.twice;
    MatrixXc m = MatrixXc::Zero(n, n);
    // 1-based j, k as in the defining formulas
    for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
            cplx v = 0;
            switch (axis) {
            case Axis::X:
                if (j == k - 1) v += std::sqrt(j * (two_s - j + 1));
                if (j - 1 == k) v += std::sqrt(k * (two_s - k + 1));
                break;
            case Axis::Y:
                if (j == k - 1) v += cplx(0, -1) * std::sqrt(j * (two_s - j + 1));
                if (j - 1 == k) v += cplx(0, 1) * std::sqrt(k * (two_s - k + 1));
                break;
            case Axis::Z:
                if (j == k) v = two_s - 2.0 * (j - 1);
                break;
            }
            m(j - 1, k - 1) = v;
        }
    }
    return m;
}

MatrixXc single_site_spin(double s, Axis axis) { return single_site_spin(Spin::from_double(s), axis); }

double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
    if (m1 + m2 != M) return 0.0;
    if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(M) > J) return 0.0;
    if (J > j1 + j2 || J < std::abs(j1 - j2)) return 0.0;
    if ((j1 + j2 + J) % 2 != 0 || (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (J + M) % 2 != 0)
        return 0.0;
    auto h = [](int twice) { return twice / 2; };
    double pre = std::sqrt((J + 1) * factorial(h(J + j1 - j2)) * factorial(h(J - j1 + j2)) *
                           factorial(h(j1 + j2 - J)) / factorial(h(j1 + j2 + J) + 1));
    pre *= std::sqrt(factorial(h(J + M)) * factorial(h(J - M)) * factorial(h(j1 - m1)) *
                     factorial(h(j1 + m1)) * factorial(h(j2 - m2)) * factorial(h(j2 + m2)));
    double sum = 0.0;
    for (int k = 0; k <= h(j1 + j2 + J); ++k) {
        int a = h(j1 + j2 - J) - k, b = h(j1 - m1) - k, c = h(j2 + m2) - k;
        int dd = h(J - j2 + m1) + k, e = h(J - j1 - m2) + k;
        if (a < 0 || b < 0 || c < 0 || dd < 0 || e < 0) continue;
        double term = 1.0 / (factorial(k) * factorial(a) * factorial(b) * factorial(c) *
                             factorial(dd) * factorial(e));
        sum += (k % 2 ? -term : term);
    }
    return pre * sum;
}

SiteOperatorBasis single_site_basis(Spin s) {
    if (s.twice < 1) throw ConfigError("spin must be positive");
    const int n = s.local_dim();
    SiteOperatorBasis b;
    b.spin = s;
    // Multipole operators T^J_M = sum (-1)^(s-m') <s m; s -m' | J M> |m><m'|
    auto tensor = [&](int J, int M) {
        MatrixXc t = MatrixXc::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            int m = s.twice - 2 * i;
            for (int k = 0; k < n; ++k) {
                int mp = s.twice - 2 * k;
                double sign = (k % 2) ? -1.0 : 1.0;
                t(i, k) = sign * clebsch_gordan(s.twice, m, s.twice, -mp, 2 * J, 2 * M);
            }
        }
        return t;
    };
    auto push = [&](MatrixXc e, int J) {
        normalize_hs(e);
        fix_sign(e);
        b.elements.push_back(std::move(e));
        b.internal_degree.push_back(J);
    };
    for (int J = 0; J <= s.twice; ++J) {
        for (int M = 1; M <= J; ++M) {
            MatrixXc t = tensor(J, M);
            MatrixXc td = t.adjoint();
            push(t + td, J);
            push(cplx(0, 1) * (t - td), J);
        }
        push(tensor(J, 0), J);
    }
    b.identity_index = 0;
    // Rank-1 elements are exactly the normalized spin matrices.
    if (s.twice >= 1) {
        const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
        for (int a = 0; a < 3; ++a) {
            MatrixXc e = single_site_spin(s, axes[a]);
            normalize_hs(e);
            b.elements[1 + a] = e;
        }
    }
    return b;
}

std::vector<MatrixXc> gell_mann_site() {
    std::vector<MatrixXc> t(8, MatrixXc::Zero(3, 3));
    const cplx I(0, 1);
    t[0](0, 1) = 1; t[0](1, 0) = 1;
    t[1](0, 1) = -I; t[1](1, 0) = I;
    t[2](0, 0) = 1; t[2](1, 1) = -1;
    t[3](0, 2) = 1; t[3](2, 0) = 1;
    t[4](0, 2) = -I; t[4](2, 0) = I;
    t[5](1, 2) = 1; t[5](2, 1) = 1;
    t[6](1, 2) = -I; t[6](2, 1) = I;
    const double r3 = 1.0 / std::sqrt(3.0);
    t[7](0, 0) = r3; t[7](1, 1) = r3; t[7](2, 2) = -2 * r3;
    return t;
}

namespace {
struct Su3Tables {
    double f[8][8][8];
    double d[8][8][8];
    Su3Tables() {
        auto t = gell_mann_site();
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                MatrixXc c = t[a] * t[b] - t[b] * t[a];
                MatrixXc ac = t[a] * t[b] + t[b] * t[a];
                for (int e = 0; e < 8; ++e) {
                    f[a][b][e] = ((c * t[e]).trace() / cplx(0, 4)).real();
                    d[a][b][e] = ((ac * t[e]).trace() / 4.0).real();
                }
            }
    }
};
const Su3Tables& su3_tables() {
    static const Su3Tables tables;
    return tables;
}
} // namespace

double su3_f(int a, int b, int c) { return su3_tables().f[a][b][c]; }
double su3_d(int a, int b, int c) { return su3_tables().d[a][b][c]; }

int spatial_window(std::span<const int> sorted_sites, int L) {
    if (sorted_sites.empty()) return 0;
    int max_gap = 0;
    const std::size_t n = sorted_sites.size();
    for (std::size_t i = 0; i < n; ++i) {
        int next = (i + 1 < n) ? sorted_sites[i + 1] : sorted_sites[0] + L;
        max_gap = std::max(max_gap, next - sorted_sites[i]);
    }
    return L - max_gap + 1;
}

Locality locality_degrees(std::span<const int> sites, std::span<const int> site_ops, int L,
                          const SiteOperatorBasis& basis) {
    Locality loc;
    std::vector<int> nontrivial;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (site_ops[i] == basis.identity_index) continue;
        if (sites[i] < 0 || sites[i] >= L) throw ConfigError("site index out of range");
        nontrivial.push_back(sites[i]);
        loc.k_int += basis.internal_degree[site_ops[i]];
    }
    std::sort(nontrivial.begin(), nontrivial.end());
    loc.k_op = static_cast<int>(nontrivial.size());
    loc.k_sp = spatial_window(nontrivial, L);
    return loc;
}

Locality locality_degrees(const GeneratorDescriptor& d, int L, const SiteOperatorBasis& basis) {
    return locality_degrees(d.sites, d.site_ops, L, basis);
}

std::string to_string(Convention c) {
    switch (c) {
    case Convention::T1: return "T1";
    case Convention::T2: return "T2";
    case Convention::T3: return "T3";
    case Convention::FirstN: return "FirstN";
    }
    return "?";
}

Convention convention_from_string(const std::string& s) {
    if (s == "T1") return Convention::T1;
    if (s == "T2") return Convention::T2;
    if (s == "T3") return Convention::T3;
    if (s == "FirstN") return Convention::FirstN;
    throw ConfigError("unknown convention '" + s + "'");
}

void for_each_descriptor(int L, const SiteOperatorBasis& basis,
                         const std::function<bool(const GeneratorDescriptor&)>& f, int max_k_op,
                         int max_k_sp) {
    const std::vector<int> ops = nontrivial_ops(basis);
    const int nops = static_cast<int>(ops.size());
    const int kmax = max_k_op > 0 ? std::min(max_k_op, L) : L;
    GeneratorDescriptor d;
    for (int k = 1; k <= kmax; ++k) {
        std::vector<int> comb(k);
        std::iota(comb.begin(), comb.end(), 0);
        while (true) {
            int window = spatial_window(comb, L);
            if (max_k_sp <= 0 || window <= max_k_sp) {
                std::vector<int> idx(k, 0);
                d.sites = comb;
                d.site_ops.assign(k, ops[0]);
                while (true) {
                    int kint = 0;
                    for (int i = 0; i < k; ++i) {
                        d.site_ops[i] = ops[idx[i]];
                        kint += basis.internal_degree[d.site_ops[i]];
                    }
                    d.degrees = Locality{k, window, kint};
                    if (!f(d)) return;
                    int p = k - 1;
                    while (p >= 0 && ++idx[p] == nops) idx[p--] = 0;
                    if (p < 0) break;
                }
            }
            int p = k - 1;
            while (p >= 0 && comb[p] == L - k + p) --p;
            if (p < 0) break;
            ++comb[p];
            for (int q = p + 1; q < k; ++q) comb[q] = comb[q - 1] + 1;
        }
    }
}

bool in_removed_window(const GeneratorDescriptor& d, int L, int k, int l) {
    if (static_cast<int>(d.sites.size()) != k) return false;
    std::vector<int> window(k);
    for (int i = 0; i < k; ++i) window[i] = (l + i) % L;
    std::sort(window.begin(), window.end());
    return window == d.sites;
}

std::uint64_t GeneratorSet::dimension() const { return checked_pow(spin.local_dim(), L); }

std::uint64_t GeneratorSet::total_traceless() const {
    std::uint64_t D = dimension();
    return D * D - 1;
}

bool GeneratorSet::is_easy(const GeneratorDescriptor& d) const {
    if (d.sites.empty()) return options.identity_easy;
    if (convention == Convention::FirstN) {
        if (easy.empty()) return false;
        return !canonical_less(easy.back(), d);
    }
    const Locality& g = d.degrees;
    if (g.k_op > threshold.k_op || g.k_sp > threshold.k_sp) return false;
    if (threshold.k_int > 0 && g.k_int > threshold.k_int) return false;
    if (convention == Convention::T3 && in_removed_window(d, L, threshold.k_op, options.removed_site))
        return false;
    return true;
}

void GeneratorSet::for_each_hard(const std::function<void(const GeneratorDescriptor&)>& f) const {
    for_each_descriptor(L, site, [&](const GeneratorDescriptor& d) {
        if (!is_easy(d)) f(d);
        return true;
    });
}

std::uint64_t GeneratorSet::hash() const {
    std::uint64_t h = fnv1a(std::string("GeneratorSet"));
    auto mix = [&](std::int64_t v) { h = fnv1a(&v, sizeof v, h); };
    mix(L);
    mix(spin.twice);
    mix(threshold.k_op);
    mix(threshold.k_sp);
    mix(threshold.k_int);
    mix(static_cast<int>(convention));
    mix(options.removed_site);
    mix(options.identity_easy);
    mix(static_cast<std::int64_t>(easy.size()));
    for (const auto& d : easy) {
        for (int s : d.sites) mix(s);
        mix(-1);
        for (int o : d.site_ops) mix(o);
        mix(-2);
    }
    return h;
}

nlohmann::json GeneratorSet::manifest() const {
    nlohmann::json j;
    j["L"] = L;
    j["spin"] = spin.value();
    j["threshold"] = {{"k_op", threshold.k_op}, {"k_sp", threshold.k_sp}, {"k_int", threshold.k_int}};
    j["convention"] = to_string(convention);
    j["removed_site"] = options.removed_site;
    j["identity_easy"] = options.identity_easy;
    j["N_loc"] = n_loc();
    j["hash"] = hex64(hash());
    nlohmann::json list = nlohmann::json::array();
    for (const auto& d : easy) {
        list.push_back({{"sites", d.sites},
                        {"ops", d.site_ops},
                        {"k_op", d.degrees.k_op},
                        {"k_sp", d.degrees.k_sp},
                        {"k_int", d.degrees.k_int}});
    }
    j["easy"] = std::move(list);
    return j;
}

GeneratorSet build_generator_set(int L, Spin s, Threshold threshold, Convention convention,
                                 GeneratorSetOptions options) {
    if (L < 1) throw ConfigError("L must be positive");
    if (L > kMaxSites) throw ResourceError("L exceeds the supported maximum of 14 sites");
    GeneratorSet g;
    g.L = L;
    g.spin = s;
    g.convention = convention;
    g.options = options;
    g.site = single_site_basis(s);
    if (s.twice == 1) threshold.k_int = 0;
    g.threshold = threshold;

    if (convention == Convention::FirstN) {
        const std::uint64_t total = checked_pow(s.local_dim(), 2 * L) - 1;
        if (options.first_n > total) throw ConfigError("first_n exceeds the number of generators");
        std::size_t n = options.first_n;
        if (n > 0) {
            for_each_descriptor(L, g.site, [&](const GeneratorDescriptor& d) {
                g.easy.push_back(d);
                return g.easy.size() < n;
            });
        }
        return g;
    }

    if (threshold.k_op < 1) throw ConfigError("threshold k_op must be at least 1");
    if (threshold.k_sp < threshold.k_op) throw ConfigError("threshold k_sp must be >= k_op");
    if (threshold.k_op > L || threshold.k_sp > L) throw ConfigError("threshold exceeds L");
    if (convention == Convention::T3 && (options.removed_site < 0 || options.removed_site >= L))
        throw ConfigError("T3 removed_site out of range");

    for_each_descriptor(
        L, g.site,
        [&](const GeneratorDescriptor& d) {
            if (g.is_easy(d)) g.easy.push_back(d);
            return true;
        },
        threshold.k_op, threshold.k_sp);
    return g;
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
    MatrixXc r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

MatrixXc materialize(const GeneratorDescriptor& d, int L, const SiteOperatorBasis& basis) {
    const int dd = basis.local_dim();
    checked_pow(dd, 2 * L);
    MatrixXc m = MatrixXc::Identity(1, 1);
    std::size_t p = 0;
    for (int j = 0; j < L; ++j) {
        int op = basis.identity_index;
        if (p < d.sites.size() && d.sites[p] == j) op = d.site_ops[p++];
        m = kron(m, basis.elements[op]);
    }
    return m;
}

void apply_generator(const GeneratorDescriptor& d, int L, const SiteOperatorBasis& basis,
                     const MatrixXc& in, MatrixXc& out) {
    const int dd = basis.local_dim();
    const int k = static_cast<int>(d.sites.size());
    if (basis.spin.twice == 1) {
        // Pauli strings act as a phased permutation of basis states.
        std::uint64_t xmask = 0, zymask = 0;
        int ny = 0;
        for (int i = 0; i < k; ++i) {
            std::uint64_t bit = 1ULL << (L - 1 - d.sites[i]);
            switch (d.site_ops[i]) {
            case 1: xmask |= bit; break;
            case 2: xmask |= bit; zymask |= bit; ++ny; break;
            case 3: zymask |= bit; break;
            default: break;
            }
        }
        const double scale = std::pow(2.0, -0.5 * L);
        const cplx iy[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
        const cplx base = iy[ny % 4] * scale;
        const Index D = in.rows();
        out.resize(D, in.cols());
        for (Index c = 0; c < in.cols(); ++c) {
            const cplx* src = in.col(c).data();
            cplx* dst = out.col(c).data();
            for (Index i = 0; i < D; ++i) {
                std::uint64_t j = static_cast<std::uint64_t>(i) ^ xmask;
                cplx ph = (std::popcount(j & zymask) & 1) ? -base : base;
                dst[i] = ph * src[j];
            }
        }
        return;
    }
    out = in * std::pow(1.0 / std::sqrt(static_cast<double>(dd)), L - k);
    for (int i = 0; i < k; ++i) apply_site(basis.elements[d.site_ops[i]], d.sites[i], L, dd, out);
}

void add_local(MatrixXc& acc, const MatrixXc& local, const std::vector<int>& sites, int L, int d,
               cplx coeff) {
    const int k = static_cast<int>(sites.size());
    const Index D = acc.rows();
    std::vector<Index> stride(k);
    for (int t = 0; t < k; ++t) {
        Index s = 1;
        for (int j = sites[t] + 1; j < L; ++j) s *= d;
        stride[t] = s;
    }
    const Index dk = local.rows();
    std::vector<Index> off(dk, 0);
    for (Index a = 0; a < dk; ++a) {
        Index rem = a, o = 0;
        for (int t = k - 1; t >= 0; --t) {
            o += (rem % d) * stride[t];
            rem /= d;
        }
        off[a] = o;
    }
    for (Index col = 0; col < D; ++col) {
        Index a = 0;
        for (int t = 0; t < k; ++t) a = a * d + (col / stride[t]) % d;
        const Index rest = col - off[a];
        for (Index ap = 0; ap < dk; ++ap) {
            cplx v = local(ap, a);
            if (v != cplx(0, 0)) acc(rest + off[ap], col) += coeff * v;
        }
    }
}

MatrixXc embed_local(const MatrixXc& local, const std::vector<int>& sites, int L, int d) {
    const Index D = static_cast<Index>(checked_pow(d, L));
    MatrixXc out = MatrixXc::Zero(D, D);
    add_local(out, local, sites, L, d);
    return out;
}

MatrixXc embed_sites(const std::vector<std::pair<int, MatrixXc>>& factors, int L, int d) {
    MatrixXc local = MatrixXc::Identity(1, 1);
    std::vector<int> sites;
    for (const auto& [s, m] : factors) {
        sites.push_back(s);
        local = kron(local, m);
    }
    return embed_local(local, sites, L, d);
}

} // namespace qcb
