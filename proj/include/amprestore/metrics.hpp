#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amprestore/amp.hpp"
#include "amprestore/linops.hpp"

namespace amprestore {

double rmse(std::span<const double> a, std::span<const double> b);

/// Upper bound reported by snr_improvement when the restored signal is exact.
inline constexpr double kSnrCapDb = 200.0;

/// 20 log10(rmse(clean, corrupted) / rmse(clean, restored)), clamped to +-kSnrCapDb.
double snr_improvement(std::span<const double> clean, std::span<const double> corrupted,
                       std::span<const double> restored);

/// Seeded Gaussian compressed-sensing instance: A has iid N(0, 1/M) entries
/// rescaled to unit-norm columns, x0 has k entries of +-1, y = A x0 + sigma w.
struct GaussianInstance {
    std::shared_ptr<const DenseMatrix> matrix;
    Signal truth;
    Signal measurements;
};

GaussianInstance make_gaussian_instance(std::size_t rows, std::size_t cols, std::size_t sparsity,
                                        double noise_sigma, std::uint64_t seed);

double relative_error(std::span<const double> estimate, std::span<const double> truth);

struct InstanceSpec {
    std::size_t rows = 128;
    std::size_t cols = 256;
    std::size_t sparsity = 12;
    double noise_sigma = 0.0;
    std::vector<std::uint64_t> seeds;
    double target_error = 1e-2;
};

struct CompareRow {
    std::string algorithm;  // "amp" or "ist"
    std::uint64_t seed = 0;
    std::optional<int> iterations_to_target;  // unset if never reached
    double final_error = 0.0;
    bool diverged = false;
};

struct CompareTable {
    std::vector<CompareRow> rows;
    // Medians over seeds; +inf when the median run never reached the target.
    double median_amp = 0.0;
    double median_ist = 0.0;
};

/// Runs amp_recover and ist_recover on the same instances and records the
/// first iterate whose relative error is below the target.
CompareTable convergence_compare(const InstanceSpec& spec, const SolverConfig& config);
void write_compare_csv(std::ostream& out, const CompareTable& table);

}  // namespace amprestore
