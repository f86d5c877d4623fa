#pragma once

#include "qcb/complexity.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcb {

struct QSpectrumSettings {
    std::vector<int> sweep{2, 3, 4, 5};  // locality k for convention_threshold
    int bins = 50;
    bool rank_oracle = true;
    bool operator==(const QSpectrumSettings&) const = default;
};

struct ChargeSettings {
    int k = 3;          // locality used for the law extraction
    int tower = 4;      // tower charges cross-checked when the family has one
    bool operator==(const ChargeSettings&) const = default;
};

struct RmtSettings {
    int L = 8;                  // D = 2^L spin-1/2 chain
    std::size_t n_loc = 144;    // FirstN generator count
    std::size_t trials = 20;
    bool identity_easy = false;
    int four_point_D = 4;
    std::size_t four_point_samples = 20000;
    std::vector<int> trend_L;   // empty: skip the concentration trend
    bool operator==(const RmtSettings&) const = default;
};

struct CvpBenchSettings {
    std::vector<int> dims{4, 5, 6};
    std::size_t instances = 200;
    double mu = 16.0;
    double ratio_threshold = 1.1;
    double ratio_fraction = 0.9;
    bool operator==(const CvpBenchSettings&) const = default;
};

struct OutputSettings {
    bool export_hamiltonian = false;
    bool export_decomposition = false;
    bool export_generators = false;
    bool export_lattice = false;
    bool operator==(const OutputSettings&) const = default;
};

// Everything a CLI run depends on. The text form is flat key = value lines under [section]
// headers; '#' starts a comment.
struct RunConfig {
    ExperimentConfig experiment;
    int k = 2;  // locality level; threshold follows from convention_threshold unless given explicitly
    bool explicit_threshold = false;
    std::uint64_t seed = 1;
    std::string out = "out";
    QSpectrumSettings qspectrum;
    ChargeSettings charges;
    RmtSettings rmt;
    CvpBenchSettings cvpbench;
    OutputSettings output;

    bool operator==(const RunConfig&) const = default;

    // Resolved threshold for the experiment section.
    Threshold threshold() const;
    ExperimentConfig resolved_experiment() const;
    // Hash of the serialized form, ignoring run.out and run.threads.
    std::uint64_t hash() const;
};

// Throws ConfigError naming the offending key.
void validate_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Shortest round-trip decimal form of a double (locale independent).
std::string format_double(double v);

} // namespace qcb
