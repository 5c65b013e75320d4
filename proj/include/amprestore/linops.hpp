#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "amprestore/signal.hpp"

namespace amprestore {

enum class OperatorKind { dct_synthesis, identity, dense, stacked };

const char* to_string(OperatorKind kind);

/// Dimensioned linear map with forward (rows x cols) and adjoint (cols x rows)
/// application. Instances are immutable once built and safe to share between
/// threads.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    OperatorKind kind() const noexcept { return kind_; }

    Signal apply(std::span<const double> x) const;
    Signal apply_adjoint(std::span<const double> y) const;

    // Non-allocating variants. `out` must already have the right length.
    void apply_into(std::span<const double> x, std::span<double> out) const;
    void apply_adjoint_into(std::span<const double> y, std::span<double> out) const;

protected:
    LinearOperator(std::size_t rows, std::size_t cols, OperatorKind kind);

    virtual void do_apply(std::span<const double> x, std::span<double> out) const = 0;
    virtual void do_apply_adjoint(std::span<const double> y, std::span<double> out) const = 0;

private:
    std::size_t rows_;
    std::size_t cols_;
    OperatorKind kind_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// Precomputed orthonormal DCT-II / DCT-III of one length. Power-of-two
/// lengths use an FFT-based O(M log M) path, other lengths a cosine table.
class DctPlan {
public:
    explicit DctPlan(std::size_t length);

    std::size_t length() const noexcept { return length_; }
    bool is_fast() const noexcept { return fast_; }

    /// Analysis: X_k = a_k sum_n x_n cos(pi (2n+1) k / 2M).
    void forward(std::span<const double> in, std::span<double> out) const;
    /// Synthesis: transpose of forward.
    void inverse(std::span<const double> in, std::span<double> out) const;

private:
    void fft(std::span<std::complex<double>> data, bool inverse) const;

    std::size_t length_;
    bool fast_;
    std::vector<double> scale_;                  // a_k
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i j / M), j < M/2
    std::vector<std::complex<double>> shift_;    // exp(-i pi k / 2M)
    std::vector<double> table_;                  // naive path: a_k cos(...), row k
};

Signal dct_forward(std::span<const double> x);
Signal dct_inverse(std::span<const double> c);

/// Square synthesis operator s = C^T a, C the orthonormal DCT-II matrix.
class DctSynthesis final : public LinearOperator {
public:
    explicit DctSynthesis(std::size_t length);
    const DctPlan& plan() const noexcept { return plan_; }

protected:
    void do_apply(std::span<const double> x, std::span<double> out) const override;
    void do_apply_adjoint(std::span<const double> y, std::span<double> out) const override;

private:
    DctPlan plan_;
};

class Identity final : public LinearOperator {
public:
    explicit Identity(std::size_t n);

protected:
    void do_apply(std::span<const double> x, std::span<double> out) const override;
    void do_apply_adjoint(std::span<const double> y, std::span<double> out) const override;
};

/// Explicit row-major matrix.
class DenseMatrix final : public LinearOperator {
public:
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    std::span<const double> data() const noexcept { return data_; }

protected:
    void do_apply(std::span<const double> x, std::span<double> out) const override;
    void do_apply_adjoint(std::span<const double> y, std::span<double> out) const override;

private:
    std::vector<double> data_;
};

/// Horizontal concatenation [A | B]: forward A x_a + B x_b, adjoint [A^T y; B^T y].
class Stacked final : public LinearOperator {
public:
    Stacked(OperatorPtr first, OperatorPtr second);

    const LinearOperator& first() const noexcept { return *first_; }
    const LinearOperator& second() const noexcept { return *second_; }

protected:
    void do_apply(std::span<const double> x, std::span<double> out) const override;
    void do_apply_adjoint(std::span<const double> y, std::span<double> out) const override;

private:
    OperatorPtr first_;
    OperatorPtr second_;
};

OperatorPtr make_dct_synthesis(std::size_t length);
OperatorPtr make_identity(std::size_t n);
OperatorPtr make_dense(std::size_t rows, std::size_t cols, std::vector<double> row_major);
OperatorPtr make_stacked(OperatorPtr first, OperatorPtr second);

/// Row-major explicit matrix of any operator, built column by column.
std::vector<double> materialize(const LinearOperator& op);

// Plain-text matrix format: "rows cols" on the first line, then `rows` lines of
// whitespace-separated reals. Vectors are whitespace-separated reals.
std::shared_ptr<const DenseMatrix> read_dense_matrix(std::istream& in, const std::string& source = "<stream>");
std::shared_ptr<const DenseMatrix> load_dense_matrix(const std::string& path);
void write_dense_matrix(std::ostream& out, const DenseMatrix& m);
Signal read_vector(std::istream& in, const std::string& source = "<stream>");
Signal load_vector(const std::string& path);
void write_vector(std::ostream& out, std::span<const double> v);

/// Malformed text input. Carries the source name and 1-based line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& msg)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg) {}
};

}  // namespace amprestore
