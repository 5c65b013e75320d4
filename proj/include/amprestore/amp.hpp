#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "amprestore/linops.hpp"
#include "amprestore/signal.hpp"

namespace amprestore {

// Threshold policies. lambda^t is recomputed from the residual after every iterate.
struct FixedThreshold {
    double lambda = 0.0;
};
/// lambda = tau * ||z||_2 / sqrt(M)
struct ResidualEnergyThreshold {
    double tau = 1.5;
};
/// lambda = tau * median(|z|) / 0.6745
struct MedianThreshold {
    double tau = 1.5;
};

using ThresholdPolicy = std::variant<FixedThreshold, ResidualEnergyThreshold, MedianThreshold>;

/// Parses "fixed:<lambda>", "residual:<tau>" or "median:<tau>"; a bare name
/// takes the default parameter.
ThresholdPolicy parse_threshold_policy(const std::string& text);
std::string to_string(const ThresholdPolicy& policy);

struct SolverConfig {
    int max_iters = 28;
    /// Stop once ||z||_2 <= tolerance * ||y||_2.
    double tolerance = 1e-6;
    ThresholdPolicy policy = ResidualEnergyThreshold{};
    /// Upper bound on the Onsager coefficient |I|/M. Unset means N/M.
    /// Zero disables the correction, which turns AMP into IST.
    std::optional<double> onsager_cap;
    /// Residual blend z = (1-d) z_new + d z_old.
    double damping = 0.0;

    void validate() const;
    double effective_onsager_cap(std::size_t rows, std::size_t cols) const;
};

struct AmpState {
    Signal x;  // estimate, length N
    Signal z;  // residual, length M
    double lambda = 0.0;
    int t = 0;
    std::size_t support_size = 0;
};

struct TraceRow {
    int t = 0;
    double residual_l2 = 0.0;
    double lambda = 0.0;
    std::size_t support = 0;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using Trace = std::vector<TraceRow>;

struct RecoveryResult {
    Signal estimate;
    Trace trace;
    bool converged = false;  // stopped on the residual tolerance rather than max_iters
};

/// Non-finite state after an iterate. Holds the trace up to (excluding) the failure.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int iteration, Trace trace)
        : std::runtime_error("solver diverged at iteration " + std::to_string(iteration)),
          iteration_(iteration), trace_(std::move(trace)) {}

    int iteration() const noexcept { return iteration_; }
    const Trace& trace() const noexcept { return trace_; }

private:
    int iteration_;
    Trace trace_;
};

/// Called with x^0/z^0 and then after every iterate.
using IterateObserver = std::function<void(const AmpState&)>;

/// Elementwise sign(v) * max(|v| - lambda, 0).
Signal soft_threshold(std::span<const double> v, double lambda);
void soft_threshold_into(std::span<const double> v, double lambda, std::span<double> out);

double threshold_policy(const AmpState& state, const SolverConfig& config, std::size_t rows);

/// x^0 = 0, z^0 = y, lambda^0 from the policy.
AmpState initial_state(std::span<const double> y, const LinearOperator& op, const SolverConfig& config);

/// One AMP step: x' = eta(x + A^T z; lambda), z' = y - A x' + min(|I'|/M, cap) z.
AmpState amp_iterate(const AmpState& state, const LinearOperator& op, std::span<const double> y,
                     const SolverConfig& config);
/// The same step without the Onsager term.
AmpState ist_iterate(const AmpState& state, const LinearOperator& op, std::span<const double> y,
                     const SolverConfig& config);

RecoveryResult amp_recover(std::span<const double> y, const LinearOperator& op, const SolverConfig& config,
                           const IterateObserver& observer = {});
RecoveryResult ist_recover(std::span<const double> y, const LinearOperator& op, const SolverConfig& config,
                           const IterateObserver& observer = {});

/// CSV with header "t,residual_l2,lambda,support".
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace amprestore
