#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "amprestore/metrics.hpp"
#include "amprestore/random.hpp"

namespace amprestore {

double rmse(std::span<const double> a, std::span<const double> b) {
    require_length("rmse", a.size(), b.size());
    if (a.empty()) throw std::invalid_argument("rmse of empty vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double snr_improvement(std::span<const double> clean, std::span<const double> corrupted,
                       std::span<const double> restored) {
    const double before = rmse(clean, corrupted);
    const double after = rmse(clean, restored);
    if (after == 0.0) return before == 0.0 ? 0.0 : kSnrCapDb;
    if (before == 0.0) return -kSnrCapDb;
    return std::clamp(20.0 * std::log10(before / after), -kSnrCapDb, kSnrCapDb);
}

GaussianInstance make_gaussian_instance(std::size_t rows, std::size_t cols, std::size_t sparsity,
                                        double noise_sigma, std::uint64_t seed) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("instance dimensions must be positive");
    if (sparsity > cols) throw std::invalid_argument("sparsity exceeds column count");
    Rng rng(seed);
    std::vector<double> a(rows * cols);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    for (double& v : a) v = scale * rng.normal();
    for (std::size_t c = 0; c < cols; ++c) {
        double n = 0.0;
        for (std::size_t r = 0; r < rows; ++r) n += a[r * cols + c] * a[r * cols + c];
        n = std::sqrt(n);
        for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] /= n;
    }
    GaussianInstance inst;
    inst.matrix = std::make_shared<DenseMatrix>(rows, cols, std::move(a));
    inst.truth.assign(cols, 0.0);
    for (std::size_t idx : rng.sample(cols, sparsity)) inst.truth[idx] = (rng.bits() & 1) ? 1.0 : -1.0;
    inst.measurements = inst.matrix->apply(inst.truth);
    if (noise_sigma > 0.0)
        for (double& v : inst.measurements) v += noise_sigma * rng.normal();
    return inst;
}

double relative_error(std::span<const double> estimate, std::span<const double> truth) {
    require_length("relative_error", truth.size(), estimate.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) diff += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
    const double ref = norm2(truth);
    return ref > 0.0 ? std::sqrt(diff) / ref : std::sqrt(diff);
}

namespace {

double median_iterations(const std::vector<CompareRow>& rows, const std::string& algorithm) {
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.algorithm == algorithm)
            v.push_back(r.iterations_to_target ? *r.iterations_to_target : std::numeric_limits<double>::infinity());
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

CompareTable convergence_compare(const InstanceSpec& spec, const SolverConfig& config) {
    CompareTable table;
    for (std::uint64_t seed : spec.seeds) {
        const GaussianInstance inst =
            make_gaussian_instance(spec.rows, spec.cols, spec.sparsity, spec.noise_sigma, seed);
        for (const char* algorithm : {"amp", "ist"}) {
            CompareRow row{algorithm, seed, std::nullopt, 0.0, false};
            auto observe = [&](const AmpState& s) {
                if (!row.iterations_to_target && relative_error(s.x, inst.truth) < spec.target_error)
                    row.iterations_to_target = s.t;
            };
            try {
                const RecoveryResult r = row.algorithm == "amp"
                                             ? amp_recover(inst.measurements, *inst.matrix, config, observe)
                                             : ist_recover(inst.measurements, *inst.matrix, config, observe);
                row.final_error = relative_error(r.estimate, inst.truth);
            } catch (const DivergenceError&) {
                row.diverged = true;
                row.final_error = std::numeric_limits<double>::infinity();
            }
            table.rows.push_back(std::move(row));
        }
    }
    table.median_amp = median_iterations(table.rows, "amp");
    table.median_ist = median_iterations(table.rows, "ist");
    return table;
}

void write_compare_csv(std::ostream& out, const CompareTable& table) {
    out << "algorithm,seed,iterations_to_tol,final_error,diverged\n" << std::setprecision(17);
    for (const auto& r : table.rows)
        out << r.algorithm << ',' << r.seed << ','
            << (r.iterations_to_target ? std::to_string(*r.iterations_to_target) : std::string("none")) << ','
            << r.final_error << ',' << (r.diverged ? 1 : 0) << '\n';
}

}  // namespace amprestore
