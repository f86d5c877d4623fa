#pragma once

#include "qcb/operator_basis.hpp"
#include "qcb/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qcb {

struct RmtPrediction {
    double D = 0.0;
    double n_loc = 0.0;
    double mean_pred = 0.0;
    double var_pred = 0.0;
    double var_of_mean_pred = 0.0;
    double r = 0.0;

    // identity_easy subtracts the extra 1/D carried by an easy identity.
    static RmtPrediction make(double D, double n_loc, bool identity_easy = false);
    nlohmann::json to_json() const;
};

// pi sqrt(D mu lambda_bar / 3)
double plateau_from_mean(double lambda_bar, double mu, double D);

// Per-stream generator seeded from (seed, stream).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

// Haar unitary: complex Gaussian matrix, QR, phases of diag(R) moved into Q.
MatrixXc haar_unitary(Index D, std::mt19937_64& rng);
MatrixXc haar_unitary(Index D, std::uint64_t seed);

struct Rational {
    __int128 num = 0;
    __int128 den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    bool operator==(const Rational&) const = default;
};
Rational make_rational(__int128 num, __int128 den);

// Exact closed forms for cycle types [1,1], [2], [1,1,1,1], [1,1,2], [2,2], [1,3], [4].
Rational weingarten(std::vector<int> cycle_type, std::int64_t D);

struct MonteCarloValue {
    std::string label;
    double predicted = 0.0;
    double mean = 0.0;
    double se = 0.0;
    double imag_mean = 0.0;
    double imag_se = 0.0;
    bool pass = false;
};

struct FourPointReport {
    Index D = 0;
    std::size_t n_samples = 0;
    std::vector<MonteCarloValue> patterns;
    bool pass = false;
    nlohmann::json to_json() const;
};

// <(psi_i^n)^* (psi_k^n)^* psi_j^n psi_l^n> against (d_ij d_kl + d_il d_kj) / (D (D + 1)), 3 SE bands.
FourPointReport four_point_check(Index D, std::size_t n_samples, std::uint64_t seed);

// <(psi_i^n)^* psi_j^m> against d_ij d_nm / D, plus <|psi_i^n|^2> = 1/D, 3 SE bands.
FourPointReport two_point_check(Index D, std::size_t n_samples, std::uint64_t seed);

struct MomentReport {
    RmtPrediction prediction;
    std::size_t trials = 0;
    std::vector<double> lambda_bar;    // per trial
    std::vector<double> lambda_var;    // per trial
    double mean_lambda_bar = 0.0;
    double var_lambda_bar = 0.0;       // sample variance across trials
    double mean_lambda_var = 0.0;
    double mean_deviation_sd = 0.0;    // |<lambda_bar> - mean_pred| / sqrt(var_of_mean_pred)
    double var_ratio = 0.0;            // <Var(lambda)> / var_pred
    double var_of_mean_ratio = 0.0;    // Var(lambda_bar) / var_of_mean_pred
    bool pass_mean = false;            // deviation < 5 predicted SD
    bool pass_var = false;             // ratio in [0.2, 5]
    // D |Tr[Ta^2 Tb^2]| and D |Tr[Ta Tb Ta Tb]| over sampled pairs; the variance estimate
    // assumes both stay O(1)
    double connected_trace_max = 0.0;
    bool connected_traces_suppressed = true;  // connected_trace_max <= 10
    nlohmann::json to_json() const;
};

// Largest D-scaled connected trace over up to max_pairs deterministic generator pairs.
double connected_trace_max(const GeneratorSet& gens, std::size_t max_pairs = 32);

// Q from Haar eigenbases against the generator set (D must equal gens.dimension()).
MomentReport verify_moments(const GeneratorSet& gens, std::size_t n_trials, std::uint64_t seed, int threads = 1);

struct ConcentrationPoint {
    int L = 0;
    std::size_t D = 0;
    std::size_t n_loc = 0;
    double mean_lambda_var = 0.0;
};
struct ConcentrationTrend {
    std::vector<ConcentrationPoint> points;
    double slope = 0.0;  // d log Var / d log D, expected near -1
};
// Fixed r = N_loc / D^2 across spin-1/2 chains of the given lengths (FirstN generator sets).
ConcentrationTrend concentration_trend(const std::vector<int>& Ls, double r, std::size_t n_trials,
                                       std::uint64_t seed, int threads = 1);

} // namespace qcb
