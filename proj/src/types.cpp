#include "qcb/types.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace qcb {

Spin Spin::from_double(double s) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw ConfigError("spin must be a positive half-integer");
    double twice = 2.0 * s;
    if (std::abs(twice - std::round(twice)) > 1e-12)
        throw ConfigError("spin must be a positive half-integer");
    return Spin{static_cast<int>(std::lround(twice))};
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h) { return fnv1a(s.data(), s.size(), h); }

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t checked_pow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / base)
            throw ResourceError("dimension overflow");
        r *= base;
    }
    return r;
}

} // namespace qcb
