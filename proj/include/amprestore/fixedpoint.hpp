#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "amprestore/signal.hpp"

namespace amprestore {

/// Signed two's-complement Q-format word. Overflow always saturates.
struct FixedPointFormat {
    int word_bits = 16;
    int frac_bits = 12;

    /// "Qi.f" with word_bits = 1 + i + f, e.g. "Q3.12".
    static FixedPointFormat parse(const std::string& text);
    std::string to_string() const;
    void validate() const;

    std::int64_t max_raw() const noexcept { return (std::int64_t{1} << (word_bits - 1)) - 1; }
    std::int64_t min_raw() const noexcept { return -(std::int64_t{1} << (word_bits - 1)); }
    double step() const noexcept;

    friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;
};

using FixedRaw = std::int32_t;

struct FixedVector {
    std::vector<FixedRaw> values;
    FixedPointFormat format;
};

std::int64_t saturate(std::int64_t wide, const FixedPointFormat& fmt) noexcept;

/// Arithmetic right shift by `bits` with round-half-away-from-zero.
std::int64_t round_shift(std::int64_t value, int bits) noexcept;

/// Nearest multiple of 2^-frac_bits (ties away from zero), saturated.
FixedRaw quantize(double x, const FixedPointFormat& fmt);
double dequantize(FixedRaw raw, const FixedPointFormat& fmt) noexcept;

FixedVector quantize(std::span<const double> x, const FixedPointFormat& fmt);
Signal dequantize(const FixedVector& v);

FixedRaw sat_add(FixedRaw a, FixedRaw b, const FixedPointFormat& fmt) noexcept;
FixedRaw sat_sub(FixedRaw a, FixedRaw b, const FixedPointFormat& fmt) noexcept;

/// acc + round(a * b): the exact double-width product is rounded back to the
/// format and saturated, then added to acc with saturation.
FixedRaw mac(FixedRaw acc, FixedRaw a, FixedRaw b, const FixedPointFormat& fmt) noexcept;

/// Subtract-compare-select thresholder: 0 if |v| <= lambda, else sign(v)(|v| - lambda).
FixedRaw trsh(FixedRaw v, FixedRaw lambda, const FixedPointFormat& fmt) noexcept;

}  // namespace amprestore
