#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amprestore/amp.hpp"
#include "amprestore/fixedpoint.hpp"
#include "amprestore/linops.hpp"

namespace amprestore {

/// Quantized operator for the fixed-point datapath. Supports dense,
/// identity, dct_synthesis (materialized as a quantized dense matrix) and one
/// level of stacking over those.
class FixedOperator {
public:
    FixedOperator(const LinearOperator& op, const FixedPointFormat& fmt);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const FixedPointFormat& format() const noexcept { return fmt_; }

    /// out_j = acc_j + sum_i A_ij z_i through mac, for every column j.
    void adjoint_accumulate(std::span<const FixedRaw> z, std::span<FixedRaw> acc) const;
    /// out_i = acc_i - sum_j A_ij x_j through mac.
    void forward_subtract(std::span<const FixedRaw> x, std::span<FixedRaw> acc) const;

private:
    struct Block {
        std::size_t col_offset = 0;
        std::size_t cols = 0;
        bool identity = false;
        std::vector<FixedRaw> col_major;      // A, column j contiguous
        std::vector<FixedRaw> neg_col_major;  // -A, same layout
    };

    void add_leaf(const LinearOperator& leaf, std::size_t col_offset);

    std::size_t rows_;
    std::size_t cols_;
    FixedPointFormat fmt_;
    std::vector<Block> blocks_;
};

/// AMP with every multiply-accumulate through mac and every threshold through
/// trsh. lambda comes from the policy on the dequantized residual and is
/// quantized once per iterate. The estimate is dequantized on return.
RecoveryResult amp_recover_fixed(std::span<const double> y, const FixedOperator& op, const SolverConfig& config);
RecoveryResult amp_recover_fixed(std::span<const double> y, const LinearOperator& op, const SolverConfig& config,
                                 const FixedPointFormat& fmt);

}  // namespace amprestore
