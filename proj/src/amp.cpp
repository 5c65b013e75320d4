#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "amprestore/amp.hpp"

namespace amprestore {

namespace {

// Gaussian consistency constant: median(|N(0,1)|).
constexpr double kMadScale = 0.6745;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

enum class Correction { onsager, none };

struct Workspace {
    Signal pseudo;
    Signal forward;
};

double policy_parameter(const ThresholdPolicy& p) {
    return std::visit(overloaded{[](const FixedThreshold& f) { return f.lambda; },
                                 [](const ResidualEnergyThreshold& r) { return r.tau; },
                                 [](const MedianThreshold& m) { return m.tau; }},
                      p);
}

void step(AmpState& s, const LinearOperator& op, std::span<const double> y, const SolverConfig& cfg,
          Correction correction, Workspace& ws) {
    const std::size_t m = op.rows();
    const std::size_t n = op.cols();

    ws.pseudo.resize(n);
    op.apply_adjoint_into(s.z, ws.pseudo);
    for (std::size_t i = 0; i < n; ++i) ws.pseudo[i] = s.x[i] + ws.pseudo[i];
    soft_threshold_into(ws.pseudo, s.lambda, s.x);
    s.support_size = count_nonzero(s.x);

    double onsager = 0.0;
    if (correction == Correction::onsager)
        onsager = std::min(static_cast<double>(s.support_size) / static_cast<double>(m),
                           cfg.effective_onsager_cap(m, n));

    ws.forward.resize(m);
    op.apply_into(s.x, ws.forward);
    const double d = cfg.damping;
    for (std::size_t i = 0; i < m; ++i) {
        double z = y[i] - ws.forward[i];
        // Skipping the zero coefficient keeps the IST path bit-identical.
        if (onsager != 0.0) z += onsager * s.z[i];
        if (d != 0.0) z = (1.0 - d) * z + d * s.z[i];
        s.z[i] = z;
    }
    ++s.t;
    if (!all_finite(s.x) || !all_finite(s.z)) throw DivergenceError(s.t, {});
    s.lambda = threshold_policy(s, cfg, m);
    if (!std::isfinite(s.lambda)) throw DivergenceError(s.t, {});
}

AmpState iterate_once(const AmpState& state, const LinearOperator& op, std::span<const double> y,
                      const SolverConfig& cfg, Correction correction) {
    cfg.validate();
    require_length("measurement vector", op.rows(), y.size());
    require_length("state estimate", op.cols(), state.x.size());
    require_length("state residual", op.rows(), state.z.size());
    AmpState next = state;
    Workspace ws;
    step(next, op, y, cfg, correction, ws);
    return next;
}

RecoveryResult run(std::span<const double> y, const LinearOperator& op, const SolverConfig& cfg,
                   Correction correction, const IterateObserver& observer) {
    AmpState s = initial_state(y, op, cfg);
    Trace trace;
    trace.push_back({0, norm2(s.z), s.lambda, 0});
    if (observer) observer(s);

    const double stop = cfg.tolerance * norm2(y);
    bool converged = trace.back().residual_l2 <= stop;
    Workspace ws;
    while (!converged && s.t < cfg.max_iters) {
        try {
            step(s, op, y, cfg, correction, ws);
        } catch (const DivergenceError& e) {
            throw DivergenceError(e.iteration(), std::move(trace));
        }
        const double r = norm2(s.z);
        trace.push_back({s.t, r, s.lambda, s.support_size});
        if (observer) observer(s);
        converged = r <= stop;
    }
    return {std::move(s.x), std::move(trace), converged};
}

}  // namespace

ThresholdPolicy parse_threshold_policy(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::optional<double> value;
    if (colon != std::string::npos) {
        const std::string arg = text.substr(colon + 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
        if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("threshold policy parameter must be a nonnegative real: '" + arg + "'");
        value = v;
    }
    if (name == "fixed") {
        if (!value) throw std::invalid_argument("fixed threshold policy needs a value, e.g. fixed:0.1");
        return FixedThreshold{*value};
    }
    if (name == "residual") return ResidualEnergyThreshold{value.value_or(ResidualEnergyThreshold{}.tau)};
    if (name == "median") return MedianThreshold{value.value_or(MedianThreshold{}.tau)};
    throw std::invalid_argument("unknown threshold policy '" + name + "' (expected fixed, residual or median)");
}

std::string to_string(const ThresholdPolicy& policy) {
    std::ostringstream os;
    os << std::visit(overloaded{[](const FixedThreshold&) { return "fixed"; },
                                [](const ResidualEnergyThreshold&) { return "residual"; },
                                [](const MedianThreshold&) { return "median"; }},
                     policy)
       << ':' << policy_parameter(policy);
    return os.str();
}

void SolverConfig::validate() const {
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
    const double p = policy_parameter(policy);
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("threshold parameter must be nonnegative");
    if (onsager_cap && !(*onsager_cap >= 0.0)) throw std::invalid_argument("onsager_cap must be nonnegative");
    if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in [0, 1)");
}

double SolverConfig::effective_onsager_cap(std::size_t rows, std::size_t cols) const {
    return onsager_cap.value_or(static_cast<double>(cols) / static_cast<double>(rows));
}

void soft_threshold_into(std::span<const double> v, double lambda, std::span<double> out) {
    require_length("soft_threshold output", v.size(), out.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - lambda;
        out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
    }
}

Signal soft_threshold(std::span<const double> v, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("soft_threshold: lambda must be nonnegative");
    Signal out(v.size());
    soft_threshold_into(v, lambda, out);
    return out;
}

double threshold_policy(const AmpState& state, const SolverConfig& config, std::size_t rows) {
    require_length("threshold_policy residual", rows, state.z.size());
    return std::visit(
        overloaded{
            [](const FixedThreshold& f) { return f.lambda; },
            [&](const ResidualEnergyThreshold& r) {
                return r.tau * norm2(state.z) / std::sqrt(static_cast<double>(rows));
            },
            [&](const MedianThreshold& med) {
                Signal mags(state.z.size());
                std::transform(state.z.begin(), state.z.end(), mags.begin(), [](double v) { return std::abs(v); });
                const std::size_t mid = mags.size() / 2;
                std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
                double median = mags[mid];
                if (mags.size() % 2 == 0) {
                    const double lower = *std::max_element(mags.begin(), mags.begin() + mid);
                    median = 0.5 * (lower + median);
                }
                return med.tau * median / kMadScale;
            }},
        config.policy);
}

AmpState initial_state(std::span<const double> y, const LinearOperator& op, const SolverConfig& config) {
    config.validate();
    require_length("measurement vector", op.rows(), y.size());
    if (!all_finite(y)) throw std::invalid_argument("measurement vector contains non-finite values");
    AmpState s;
    s.x.assign(op.cols(), 0.0);
    s.z.assign(y.begin(), y.end());
    s.lambda = threshold_policy(s, config, op.rows());
    return s;
}

AmpState amp_iterate(const AmpState& state, const LinearOperator& op, std::span<const double> y,
                     const SolverConfig& config) {
    return iterate_once(state, op, y, config, Correction::onsager);
}

AmpState ist_iterate(const AmpState& state, const LinearOperator& op, std::span<const double> y,
                     const SolverConfig& config) {
    return iterate_once(state, op, y, config, Correction::none);
}

RecoveryResult amp_recover(std::span<const double> y, const LinearOperator& op, const SolverConfig& config,
                           const IterateObserver& observer) {
    return run(y, op, config, Correction::onsager, observer);
}

RecoveryResult ist_recover(std::span<const double> y, const LinearOperator& op, const SolverConfig& config,
                           const IterateObserver& observer) {
    return run(y, op, config, Correction::none, observer);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t,residual_l2,lambda,support\n" << std::setprecision(17);
    for (const auto& row : trace)
        out << row.t << ',' << row.residual_l2 << ',' << row.lambda << ',' << row.support << '\n';
}

}  // namespace amprestore
