#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace amprestore {

/// Real-valued sample or coefficient vector. Audio samples are full-scale +-1.0.
using Signal = std::vector<double>;

/// Thrown when a vector length does not match the dimension an operation expects.
class DimensionError : public std::invalid_argument {
public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
        : std::invalid_argument(what + ": expected length " + std::to_string(expected) +
                                ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

inline void require_length(const char* what, std::size_t expected, std::size_t actual) {
    if (expected != actual) throw DimensionError(what, expected, actual);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_length("dot", a.size(), b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    if (std::isfinite(acc)) return std::sqrt(acc);
    // Squares overflowed; rescale by the largest magnitude.
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    if (!std::isfinite(peak)) return peak;
    acc = 0.0;
    for (double x : v) acc += (x / peak) * (x / peak);
    return peak * std::sqrt(acc);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline std::size_t count_nonzero(std::span<const double> v) {
    std::size_t n = 0;
    for (double x : v)
        if (x != 0.0) ++n;
    return n;
}

}  // namespace amprestore
