#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "amprestore/fixedpoint.hpp"

namespace amprestore {

FixedPointFormat FixedPointFormat::parse(const std::string& text) {
    int int_bits = -1;
    int frac = -1;
    char tail = 0;
    if (text.size() < 4 || (text[0] != 'Q' && text[0] != 'q') ||
        std::sscanf(text.c_str() + 1, "%d.%d%c", &int_bits, &frac, &tail) != 2 || int_bits < 0 || frac < 0)
        throw std::invalid_argument("fixed-point format must look like Qi.f (e.g. Q3.12): '" + text + "'");
    FixedPointFormat fmt{1 + int_bits + frac, frac};
    fmt.validate();
    return fmt;
}

std::string FixedPointFormat::to_string() const {
    return "Q" + std::to_string(word_bits - 1 - frac_bits) + "." + std::to_string(frac_bits);
}

void FixedPointFormat::validate() const {
    if (word_bits < 8 || word_bits > 32)
        throw std::invalid_argument("fixed-point word_bits must be in [8, 32], got " + std::to_string(word_bits));
    if (frac_bits < 0 || frac_bits > word_bits - 1)
        throw std::invalid_argument("fixed-point frac_bits must be in [0, word_bits-1], got " +
                                    std::to_string(frac_bits));
}

double FixedPointFormat::step() const noexcept { return std::ldexp(1.0, -frac_bits); }

std::int64_t saturate(std::int64_t wide, const FixedPointFormat& fmt) noexcept {
    if (wide > fmt.max_raw()) return fmt.max_raw();
    if (wide < fmt.min_raw()) return fmt.min_raw();
    return wide;
}

std::int64_t round_shift(std::int64_t value, int bits) noexcept {
    if (bits <= 0) return value;
    const std::uint64_t mag = value < 0 ? 0 - static_cast<std::uint64_t>(value) : static_cast<std::uint64_t>(value);
    const std::uint64_t rounded = (mag + (std::uint64_t{1} << (bits - 1))) >> bits;
    return value < 0 ? -static_cast<std::int64_t>(rounded) : static_cast<std::int64_t>(rounded);
}

FixedRaw quantize(double x, const FixedPointFormat& fmt) {
    if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
    const double scaled = std::round(std::ldexp(x, fmt.frac_bits));
    if (scaled >= static_cast<double>(fmt.max_raw())) return static_cast<FixedRaw>(fmt.max_raw());
    if (scaled <= static_cast<double>(fmt.min_raw())) return static_cast<FixedRaw>(fmt.min_raw());
    return static_cast<FixedRaw>(scaled);
}

double dequantize(FixedRaw raw, const FixedPointFormat& fmt) noexcept {
    return std::ldexp(static_cast<double>(raw), -fmt.frac_bits);
}

FixedVector quantize(std::span<const double> x, const FixedPointFormat& fmt) {
    fmt.validate();
    FixedVector out{std::vector<FixedRaw>(x.size()), fmt};
    for (std::size_t i = 0; i < x.size(); ++i) out.values[i] = quantize(x[i], fmt);
    return out;
}

Signal dequantize(const FixedVector& v) {
    Signal out(v.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = dequantize(v.values[i], v.format);
    return out;
}

FixedRaw sat_add(FixedRaw a, FixedRaw b, const FixedPointFormat& fmt) noexcept {
    return static_cast<FixedRaw>(saturate(std::int64_t{a} + b, fmt));
}

FixedRaw sat_sub(FixedRaw a, FixedRaw b, const FixedPointFormat& fmt) noexcept {
    return static_cast<FixedRaw>(saturate(std::int64_t{a} - b, fmt));
}

FixedRaw mac(FixedRaw acc, FixedRaw a, FixedRaw b, const FixedPointFormat& fmt) noexcept {
    const std::int64_t product = saturate(round_shift(std::int64_t{a} * b, fmt.frac_bits), fmt);
    return static_cast<FixedRaw>(saturate(std::int64_t{acc} + product, fmt));
}

FixedRaw trsh(FixedRaw v, FixedRaw lambda, const FixedPointFormat&) noexcept {
    const std::int64_t mag = v < 0 ? -std::int64_t{v} : std::int64_t{v};
    const std::int64_t diff = mag - lambda;
    if (diff <= 0) return 0;
    // diff <= |v| <= 2^(w-1); the -2^(w-1) corner with lambda = 0 maps back onto itself.
    return static_cast<FixedRaw>(v < 0 ? -diff : diff);
}

}  // namespace amprestore
