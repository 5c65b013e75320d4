#include <stdexcept>

#include "amprestore/linops.hpp"

namespace amprestore {

const char* to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::dct_synthesis: return "dct_synthesis";
        case OperatorKind::identity: return "identity";
        case OperatorKind::dense: return "dense";
        case OperatorKind::stacked: return "stacked";
    }
    return "unknown";
}

LinearOperator::LinearOperator(std::size_t rows, std::size_t cols, OperatorKind kind)
    : rows_(rows), cols_(cols), kind_(kind) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("operator dimensions must be positive");
}

Signal LinearOperator::apply(std::span<const double> x) const {
    Signal out(rows_);
    apply_into(x, out);
    return out;
}

Signal LinearOperator::apply_adjoint(std::span<const double> y) const {
    Signal out(cols_);
    apply_adjoint_into(y, out);
    return out;
}

void LinearOperator::apply_into(std::span<const double> x, std::span<double> out) const {
    require_length("apply input", cols_, x.size());
    require_length("apply output", rows_, out.size());
    do_apply(x, out);
}

void LinearOperator::apply_adjoint_into(std::span<const double> y, std::span<double> out) const {
    require_length("apply_adjoint input", rows_, y.size());
    require_length("apply_adjoint output", cols_, out.size());
    do_apply_adjoint(y, out);
}

DctSynthesis::DctSynthesis(std::size_t length)
    : LinearOperator(length, length, OperatorKind::dct_synthesis), plan_(length) {}

void DctSynthesis::do_apply(std::span<const double> x, std::span<double> out) const {
    plan_.inverse(x, out);
}

void DctSynthesis::do_apply_adjoint(std::span<const double> y, std::span<double> out) const {
    plan_.forward(y, out);
}

Identity::Identity(std::size_t n) : LinearOperator(n, n, OperatorKind::identity) {}

void Identity::do_apply(std::span<const double> x, std::span<double> out) const {
    std::copy(x.begin(), x.end(), out.begin());
}

void Identity::do_apply_adjoint(std::span<const double> y, std::span<double> out) const {
    std::copy(y.begin(), y.end(), out.begin());
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : LinearOperator(rows, cols, OperatorKind::dense), data_(std::move(row_major)) {
    require_length("dense matrix data", rows * cols, data_.size());
}

void DenseMatrix::do_apply(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = cols();
    for (std::size_t r = 0; r < rows(); ++r) {
        const double* row = &data_[r * n];
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
}

void DenseMatrix::do_apply_adjoint(std::span<const double> y, std::span<double> out) const {
    const std::size_t n = cols();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r) {
        const double* row = &data_[r * n];
        const double yr = y[r];
        for (std::size_t c = 0; c < n; ++c) out[c] += row[c] * yr;
    }
}

namespace {

std::size_t stacked_rows(const OperatorPtr& a, const OperatorPtr& b) {
    if (!a || !b) throw std::invalid_argument("stacked operator needs two operands");
    if (a->rows() != b->rows()) throw DimensionError("stacked operand rows", a->rows(), b->rows());
    return a->rows();
}

}  // namespace

Stacked::Stacked(OperatorPtr first, OperatorPtr second)
    : LinearOperator(stacked_rows(first, second), first->cols() + second->cols(),
                     OperatorKind::stacked),
      first_(std::move(first)), second_(std::move(second)) {}

void Stacked::do_apply(std::span<const double> x, std::span<double> out) const {
    const std::size_t split = first_->cols();
    first_->apply_into(x.first(split), out);
    Signal tmp(rows());
    second_->apply_into(x.subspan(split), tmp);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
}

void Stacked::do_apply_adjoint(std::span<const double> y, std::span<double> out) const {
    const std::size_t split = first_->cols();
    first_->apply_adjoint_into(y, out.first(split));
    second_->apply_adjoint_into(y, out.subspan(split));
}

OperatorPtr make_dct_synthesis(std::size_t length) { return std::make_shared<DctSynthesis>(length); }
OperatorPtr make_identity(std::size_t n) { return std::make_shared<Identity>(n); }
OperatorPtr make_dense(std::size_t rows, std::size_t cols, std::vector<double> row_major) {
    return std::make_shared<DenseMatrix>(rows, cols, std::move(row_major));
}
OperatorPtr make_stacked(OperatorPtr first, OperatorPtr second) {
    return std::make_shared<Stacked>(std::move(first), std::move(second));
}

std::vector<double> materialize(const LinearOperator& op) {
    const std::size_t rows = op.rows();
    const std::size_t cols = op.cols();
    std::vector<double> out(rows * cols);
    Signal unit(cols, 0.0);
    Signal column(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        unit[c] = 1.0;
        op.apply_into(unit, column);
        unit[c] = 0.0;
        for (std::size_t r = 0; r < rows; ++r) out[r * cols + c] = column[r];
    }
    return out;
}

}  // namespace amprestore
