#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "amprestore/linops.hpp"

namespace amprestore {

namespace {

using cplx = std::complex<double>;

std::vector<cplx>& scratch(std::size_t n) {
    thread_local std::vector<cplx> buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

}  // namespace

DctPlan::DctPlan(std::size_t length) : length_(length), fast_(std::has_single_bit(length)) {
    if (length == 0) throw std::invalid_argument("DCT length must be at least 1");
    const double m = static_cast<double>(length);
    scale_.resize(length);
    scale_[0] = std::sqrt(1.0 / m);
    for (std::size_t k = 1; k < length; ++k) scale_[k] = std::sqrt(2.0 / m);

    if (!fast_) {
        table_.resize(length * length);
        for (std::size_t k = 0; k < length; ++k)
            for (std::size_t n = 0; n < length; ++n)
                table_[k * length + n] =
                    scale_[k] * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * m));
        return;
    }

    const int bits = std::countr_zero(length);
    bitrev_.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
        std::size_t r = 0;
        for (int b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
    }
    twiddle_.resize(length / 2);
    for (std::size_t j = 0; j < length / 2; ++j)
        twiddle_[j] = std::polar(1.0, -2.0 * std::numbers::pi * j / m);
    shift_.resize(length);
    for (std::size_t k = 0; k < length; ++k)
        shift_[k] = std::polar(1.0, -std::numbers::pi * k / (2.0 * m));
}

void DctPlan::fft(std::span<cplx> data, bool inverse) const {
    const std::size_t n = length_;
    for (std::size_t i = 0; i < n; ++i)
        if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx w = twiddle_[j * step];
                if (inverse) w = std::conj(w);
                const cplx t = w * data[start + j + half];
                data[start + j + half] = data[start + j] - t;
                data[start + j] += t;
            }
        }
    }
}

void DctPlan::forward(std::span<const double> in, std::span<double> out) const {
    require_length("dct_forward input", length_, in.size());
    require_length("dct_forward output", length_, out.size());
    const std::size_t m = length_;
    if (!fast_) {
        for (std::size_t k = 0; k < m; ++k) {
            const double* row = &table_[k * m];
            double acc = 0.0;
            for (std::size_t n = 0; n < m; ++n) acc += row[n] * in[n];
            out[k] = acc;
        }
        return;
    }
    // Even samples ascending, odd samples descending, then one complex FFT.
    auto& buf = scratch(m);
    std::span<cplx> v(buf.data(), m);
    for (std::size_t n = 0; n < m / 2; ++n) {
        v[n] = in[2 * n];
        v[m - 1 - n] = in[2 * n + 1];
    }
    if (m == 1) v[0] = in[0];
    fft(v, false);
    for (std::size_t k = 0; k < m; ++k) out[k] = scale_[k] * (v[k] * shift_[k]).real();
}

void DctPlan::inverse(std::span<const double> in, std::span<double> out) const {
    require_length("dct_inverse input", length_, in.size());
    require_length("dct_inverse output", length_, out.size());
    const std::size_t m = length_;
    if (!fast_) {
        for (std::size_t n = 0; n < m; ++n) out[n] = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double* row = &table_[k * m];
            const double c = in[k];
            for (std::size_t n = 0; n < m; ++n) out[n] += row[n] * c;
        }
        return;
    }
    auto& buf = scratch(m);
    std::span<cplx> v(buf.data(), m);
    auto coeff = [&](std::size_t k) {
        return k == 0 ? scale_[0] * in[0] : 0.5 * scale_[k] * in[k];
    };
    v[0] = coeff(0);
    for (std::size_t k = 1; k < m; ++k)
        v[k] = std::conj(shift_[k]) * cplx(coeff(k), -coeff(m - k));
    fft(v, true);
    for (std::size_t n = 0; n < m / 2; ++n) {
        out[2 * n] = v[n].real();
        out[2 * n + 1] = v[m - 1 - n].real();
    }
    if (m == 1) out[0] = v[0].real();
}

Signal dct_forward(std::span<const double> x) {
    DctPlan plan(x.size());
    Signal out(x.size());
    plan.forward(x, out);
    return out;
}

Signal dct_inverse(std::span<const double> c) {
    DctPlan plan(c.size());
    Signal out(c.size());
    plan.inverse(c, out);
    return out;
}

}  // namespace amprestore
