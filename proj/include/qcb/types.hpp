#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcb {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;
using VectorXc = Eigen::VectorXcd;
using Index = Eigen::Index;
using MatrixXi64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXi64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Bad input or configuration. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical stage failed (non-Hermitian input, rank deficiency, ...). Exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Size guard tripped. Exit code 3.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Spin value stored as 2s so that half-integers are exact.
struct Spin {
    int twice = 1;

    static Spin half() { return Spin{1}; }
    static Spin one() { return Spin{2}; }
    static Spin from_double(double s);

    int local_dim() const { return twice + 1; }
    double value() const { return 0.5 * twice; }
    bool operator==(const Spin&) const = default;
};

// FNV-1a, used for provenance hashes.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL);
std::string hex64(std::uint64_t h);

// Integer power with overflow guard for Hilbert-space dimensions.
std::uint64_t checked_pow(std::uint64_t base, int exp);

} // namespace qcb
