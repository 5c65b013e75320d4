#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amprestore/fixed_amp.hpp"

namespace amprestore {

FixedOperator::FixedOperator(const LinearOperator& op, const FixedPointFormat& fmt)
    : rows_(op.rows()), cols_(op.cols()), fmt_(fmt) {
    fmt_.validate();
    if (op.kind() == OperatorKind::stacked) {
        const auto& stacked = static_cast<const Stacked&>(op);
        add_leaf(stacked.first(), 0);
        add_leaf(stacked.second(), stacked.first().cols());
    } else {
        add_leaf(op, 0);
    }
}

void FixedOperator::add_leaf(const LinearOperator& leaf, std::size_t col_offset) {
    Block b;
    b.col_offset = col_offset;
    b.cols = leaf.cols();
    switch (leaf.kind()) {
        case OperatorKind::identity:
            b.identity = true;
            break;
        case OperatorKind::dense:
        case OperatorKind::dct_synthesis: {
            const std::vector<double> dense = leaf.kind() == OperatorKind::dense
                                                  ? std::vector<double>(static_cast<const DenseMatrix&>(leaf).data().begin(),
                                                                        static_cast<const DenseMatrix&>(leaf).data().end())
                                                  : materialize(leaf);
            b.col_major.resize(rows_ * b.cols);
            b.neg_col_major.resize(rows_ * b.cols);
            for (std::size_t r = 0; r < rows_; ++r)
                for (std::size_t c = 0; c < b.cols; ++c) {
                    const FixedRaw q = quantize(dense[r * b.cols + c], fmt_);
                    b.col_major[c * rows_ + r] = q;
                    b.neg_col_major[c * rows_ + r] = static_cast<FixedRaw>(saturate(-std::int64_t{q}, fmt_));
                }
            break;
        }
        case OperatorKind::stacked:
            throw std::invalid_argument("fixed-point mode supports only one level of operator stacking");
    }
    blocks_.push_back(std::move(b));
}

void FixedOperator::adjoint_accumulate(std::span<const FixedRaw> z, std::span<FixedRaw> acc) const {
    require_length("fixed adjoint input", rows_, z.size());
    require_length("fixed adjoint output", cols_, acc.size());
    for (const auto& b : blocks_) {
        for (std::size_t c = 0; c < b.cols; ++c) {
            FixedRaw& out = acc[b.col_offset + c];
            if (b.identity) {
                out = sat_add(out, z[c], fmt_);
                continue;
            }
            const FixedRaw* col = &b.col_major[c * rows_];
            for (std::size_t r = 0; r < rows_; ++r) out = mac(out, col[r], z[r], fmt_);
        }
    }
}

void FixedOperator::forward_subtract(std::span<const FixedRaw> x, std::span<FixedRaw> acc) const {
    require_length("fixed forward input", cols_, x.size());
    require_length("fixed forward output", rows_, acc.size());
    // Column order per block; a zero coefficient contributes an exact zero product.
    for (const auto& b : blocks_) {
        for (std::size_t c = 0; c < b.cols; ++c) {
            const FixedRaw xc = x[b.col_offset + c];
            if (xc == 0) continue;
            if (b.identity) {
                acc[c] = sat_sub(acc[c], xc, fmt_);
                continue;
            }
            const FixedRaw* col = &b.neg_col_major[c * rows_];
            for (std::size_t r = 0; r < rows_; ++r) acc[r] = mac(acc[r], col[r], xc, fmt_);
        }
    }
}

namespace {

double residual_norm(const std::vector<FixedRaw>& z, const FixedPointFormat& fmt) {
    double acc = 0.0;
    for (FixedRaw v : z) {
        const double d = dequantize(v, fmt);
        acc += d * d;
    }
    return std::sqrt(acc);
}

FixedRaw quantized_lambda(const std::vector<FixedRaw>& z, const SolverConfig& cfg, const FixedPointFormat& fmt,
                          std::size_t rows) {
    AmpState view;
    view.z.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) view.z[i] = dequantize(z[i], fmt);
    return quantize(threshold_policy(view, cfg, rows), fmt);
}

}  // namespace

RecoveryResult amp_recover_fixed(std::span<const double> y, const FixedOperator& op, const SolverConfig& config) {
    config.validate();
    require_length("measurement vector", op.rows(), y.size());
    if (!all_finite(y)) throw std::invalid_argument("measurement vector contains non-finite values");
    const FixedPointFormat& fmt = op.format();
    const std::size_t m = op.rows();
    const std::size_t n = op.cols();

    const FixedVector yq = quantize(y, fmt);
    std::vector<FixedRaw> x(n, 0);
    std::vector<FixedRaw> z = yq.values;
    std::vector<FixedRaw> z_next(m);
    FixedRaw lambda = quantized_lambda(z, config, fmt, m);

    const double cap = config.effective_onsager_cap(m, n);
    const FixedRaw keep = quantize(1.0 - config.damping, fmt);
    const FixedRaw blend = quantize(config.damping, fmt);

    Trace trace;
    trace.push_back({0, residual_norm(z, fmt), dequantize(lambda, fmt), 0});
    const double stop = config.tolerance * norm2(dequantize(yq));
    bool converged = trace.back().residual_l2 <= stop;
    int t = 0;
    while (!converged && t < config.max_iters) {
        op.adjoint_accumulate(z, x);
        std::size_t support = 0;
        for (auto& v : x) {
            v = trsh(v, lambda, fmt);
            if (v != 0) ++support;
        }

        const FixedRaw onsager =
            quantize(std::min(static_cast<double>(support) / static_cast<double>(m), cap), fmt);
        std::copy(yq.values.begin(), yq.values.end(), z_next.begin());
        op.forward_subtract(x, z_next);
        for (std::size_t i = 0; i < m; ++i) {
            FixedRaw v = z_next[i];
            if (onsager != 0) v = mac(v, onsager, z[i], fmt);
            if (blend != 0) v = mac(mac(0, keep, v, fmt), blend, z[i], fmt);
            z_next[i] = v;
        }
        z.swap(z_next);
        ++t;

        lambda = quantized_lambda(z, config, fmt, m);
        const double r = residual_norm(z, fmt);
        trace.push_back({t, r, dequantize(lambda, fmt), support});
        converged = r <= stop;
    }
    return {dequantize(FixedVector{std::move(x), fmt}), std::move(trace), converged};
}

RecoveryResult amp_recover_fixed(std::span<const double> y, const LinearOperator& op, const SolverConfig& config,
                                 const FixedPointFormat& fmt) {
    return amp_recover_fixed(y, FixedOperator(op, fmt), config);
}

}  // namespace amprestore
