#pragma once

#include "qcb/complexity.hpp"
#include "qcb/config.hpp"
#include "qcb/lattice.hpp"
#include "qcb/rmt.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace qcb {

// JSON summary of one experiment (validated by schemas/summary.schema.json).
nlohmann::json curve_summary(const ExperimentResult& r, const ExperimentConfig& cfg, std::uint64_t config_hash);
std::string curve_csv(const ComplexityCurve& c, std::uint64_t config_hash);

struct QSpectrumEntry {
    int k = 0;
    Threshold threshold;
    std::size_t n_loc = 0;
    QMatrix q;
    int rank_oracle_kernel = -1;  // -1 when not computed
    Histogram histogram;
};

// One Q-matrix per sweep entry; thresholds follow convention_threshold.
std::vector<QSpectrumEntry> qspectrum_sweep(const ExperimentConfig& base, const std::vector<int>& sweep, int bins,
                                            bool with_rank_oracle);
std::string qspectrum_csv(const std::vector<QSpectrumEntry>& entries, std::uint64_t config_hash);
std::string qhistogram_csv(const std::vector<QSpectrumEntry>& entries, std::uint64_t config_hash);
nlohmann::json qspectrum_summary(const std::vector<QSpectrumEntry>& entries, const ExperimentConfig& base,
                                 std::uint64_t config_hash);

struct ReferenceCharge {
    std::string label;
    double offdiag_residual = 0.0;     // part of V^dagger R V off the diagonal, relative
    double projection_residual = 0.0;  // distance of diag(V^dagger R V) from the law span, relative
    bool detected = false;
};

struct ChargeReport {
    std::vector<ConservedLaw> laws;
    std::vector<double> energy_overlap;  // |<c, E>| / (|c| |E|) per law
    std::vector<ReferenceCharge> references;
    int kernel_dim = 0;
    std::size_t n_loc = 0;
    nlohmann::json to_json(std::uint64_t config_hash) const;
};

// Laws from the Q kernel plus cross-checks against H, the tower charges and J^z where available.
ChargeReport analyze_charges(const ExperimentConfig& cfg, int tower_size, double detect_tol = 1e-6);

nlohmann::json rmt_report(const RmtSettings& s, std::uint64_t seed, int threads, std::uint64_t config_hash);

std::string cvpbench_csv(const CvpBenchResult& r, std::uint64_t config_hash);
nlohmann::json cvpbench_summary(const CvpBenchResult& r, const CvpBenchSettings& s, std::uint64_t config_hash);

} // namespace qcb
