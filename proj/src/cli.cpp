#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "amprestore/amp.hpp"
#include "amprestore/audio.hpp"
#include "amprestore/bench.hpp"
#include "amprestore/cli.hpp"
#include "amprestore/fixed_amp.hpp"
#include "amprestore/metrics.hpp"
#include "amprestore/wav.hpp"

namespace amprestore::cli {

namespace {

struct SolverFlags {
    int iters = 28;
    double tol = 1e-6;
    std::string policy = "residual:1.5";
    std::optional<double> onsager_cap;
    double damping = 0.0;
    std::string fixed;

    SolverConfig config() const {
        SolverConfig c;
        c.max_iters = iters;
        c.tolerance = tol;
        c.policy = parse_threshold_policy(policy);
        c.onsager_cap = onsager_cap;
        c.damping = damping;
        return c;
    }
    std::optional<FixedPointFormat> format() const {
        if (fixed.empty()) return std::nullopt;
        return FixedPointFormat::parse(fixed);
    }
};

const CLI::Validator kPolicy(
    [](std::string& s) -> std::string {
        try {
            parse_threshold_policy(s);
        } catch (const std::exception& e) {
            return e.what();
        }
        return {};
    },
    "fixed:<lambda>|residual[:<tau>]|median[:<tau>]", "POLICY");

const CLI::Validator kQFormat(
    [](std::string& s) -> std::string {
        try {
            FixedPointFormat::parse(s);
        } catch (const std::exception& e) {
            return e.what();
        }
        return {};
    },
    "Qi.f", "QFORMAT");

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--iters", f.iters, "Maximum AMP iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", f.tol, "Stop when ||z|| <= tol * ||y||")->check(CLI::NonNegativeNumber);
    cmd->add_option("--policy", f.policy, "Threshold policy")->check(kPolicy);
    cmd->add_option("--onsager-cap", f.onsager_cap, "Cap on the Onsager coefficient (default N/M; 0 gives IST)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--damping", f.damping, "Residual damping in [0, 1)")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--fixed", f.fixed, "Run the fixed-point datapath in this Q format (e.g. Q3.12)")
        ->check(kQFormat);
}

// INI-style "key = value" lines; '#' and ';' start comments, [sections] are ignored.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::vector<std::string> args;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find_first_of("#;")));
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        for (char& ch : key)
            if (ch == '_') ch = '-';
        args.push_back("--" + key);
        args.push_back(trim(line.substr(eq + 1)));
    }
    return args;
}

int fail(std::ostream& err, int code, const std::string& msg) {
    err << "amprestore: " << msg << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse-recovery audio declicker: AMP over a [DCT | identity] dictionary", "amprestore"};
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "INI file of 'key = value' defaults; flags override it");

    // corrupt
    std::string in_path, out_path, aux_path;
    ClickSpec clicks{0.005, 0.5, 1, 42};
    auto* corrupt = app.add_subcommand("corrupt", "Add seeded clicks to a WAV file");
    corrupt->add_option("--in", in_path, "Input WAV")->required()->check(CLI::ExistingFile);
    corrupt->add_option("--out", out_path, "Output WAV")->required();
    corrupt->add_option("--positions", aux_path, "CSV of click positions (channel,position)");
    corrupt->add_option("--rate", clicks.rate, "Click probability per sample")->check(CLI::Range(0.0, 1.0));
    corrupt->add_option("--amplitude", clicks.amplitude, "Click amplitude (full scale)")->check(CLI::PositiveNumber);
    corrupt->add_option("--width", clicks.width, "Click width in samples")->check(CLI::PositiveNumber);
    corrupt->add_option("--seed", clicks.seed, "Generator seed");

    // restore
    SolverFlags solver;
    RestoreConfig rcfg;
    auto* restore_cmd = app.add_subcommand("restore", "Remove clicks from a WAV file");
    restore_cmd->add_option("--in", in_path, "Input WAV")->required()->check(CLI::ExistingFile);
    restore_cmd->add_option("--out", out_path, "Output WAV")->required();
    restore_cmd->add_option("--report", aux_path, "Per-block report CSV");
    restore_cmd->add_option("--block", rcfg.block_len, "Block length M")->check(CLI::PositiveNumber);
    restore_cmd->add_option("--hop", rcfg.hop, "Hop between blocks")->check(CLI::PositiveNumber);
    restore_cmd->add_option("--threads", rcfg.threads, "Worker threads (0 = all cores)");
    add_solver_flags(restore_cmd, solver);

    // recover
    std::string matrix_path, y_path, trace_path, algorithm = "amp";
    auto* recover = app.add_subcommand("recover", "Sparse recovery y = A x from text files");
    recover->add_option("--matrix", matrix_path, "Matrix file ('rows cols' header, then rows)")
        ->required()
        ->check(CLI::ExistingFile);
    recover->add_option("--y", y_path, "Measurement vector file")->required()->check(CLI::ExistingFile);
    recover->add_option("--out", out_path, "Estimate output file (default: stdout)");
    recover->add_option("--trace", trace_path, "Trace CSV (t,residual_l2,lambda,support)");
    recover->add_option("--algorithm", algorithm, "Solver")->check(CLI::IsMember({"amp", "ist"}));
    add_solver_flags(recover, solver);

    // compare
    InstanceSpec inst;
    std::size_t seed_count = 20;
    std::uint64_t first_seed = 1;
    int compare_iters = 500;
    auto* compare = app.add_subcommand("compare", "AMP vs IST iterations to a target error on Gaussian instances");
    compare->add_option("--rows", inst.rows, "Measurements M")->check(CLI::PositiveNumber);
    compare->add_option("--cols", inst.cols, "Unknowns N")->check(CLI::PositiveNumber);
    compare->add_option("--k", inst.sparsity, "Nonzeros in the true signal");
    compare->add_option("--sigma", inst.noise_sigma, "Measurement noise std")->check(CLI::NonNegativeNumber);
    compare->add_option("--seeds", seed_count, "Number of seeded trials")->check(CLI::PositiveNumber);
    compare->add_option("--first-seed", first_seed, "First seed");
    compare->add_option("--target", inst.target_error, "Relative l2 error target")->check(CLI::PositiveNumber);
    compare->add_option("--iters", compare_iters, "Iteration budget per run")->check(CLI::PositiveNumber);
    compare->add_option("--policy", solver.policy, "Threshold policy")->check(kPolicy);
    compare->add_option("--out", out_path, "CSV output (default: stdout)");

    // bench
    double duration = 10.0;
    std::size_t channels = 2;
    RestoreConfig bcfg;
    SolverFlags bench_solver;
    auto* bench = app.add_subcommand("bench", "Restoration throughput on synthesized audio");
    bench->add_option("--duration", duration, "Seconds of audio to synthesize")->check(CLI::Range(1.0, 3600.0));
    bench->add_option("--channels", channels, "Channels")->check(CLI::Range(1, 2));
    bench->add_option("--block", bcfg.block_len, "Block length M")->check(CLI::PositiveNumber);
    bench->add_option("--hop", bcfg.hop, "Hop between blocks")->check(CLI::PositiveNumber);
    bench->add_option("--threads", bcfg.threads, "Worker threads (0 = all cores)");
    bench->add_option("--csv", aux_path, "CSV output");
    add_solver_flags(bench, bench_solver);

    std::vector<std::string> args = raw_args;
    for (std::size_t i = 1; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        std::vector<std::string> injected;
        try {
            injected = config_args(args[i + 1]);
        } catch (const std::exception& e) {
            return fail(err, data_error, e.what());
        }
        // Config values go straight after the subcommand so later flags win.
        for (std::size_t j = 1; j < args.size(); ++j) {
            const auto subs = app.get_subcommands([&](const CLI::App* c) { return c->get_name() == args[j]; });
            if (subs.empty()) continue;
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(j + 1), injected.begin(), injected.end());
            break;
        }
        break;
    }
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        return fail(err, usage_error, msg);
    }
    try {
        if (corrupt->parsed()) {
            const AudioBuffer input = read_wav(in_path);
            const CorruptionResult r = corrupt_clicks(input, clicks);
            write_wav(out_path, r.corrupted);
            if (!aux_path.empty()) {
                std::ofstream pos(aux_path);
                if (!pos) return fail(err, data_error, "cannot write '" + aux_path + "'");
                write_positions_csv(pos, r);
            }
            std::size_t total = 0;
            for (const auto& p : r.positions) total += p.size();
            out << "wrote " << out_path << " with " << total << " clicks\n";
            return ok;
        }

        if (restore_cmd->parsed()) {
            if (rcfg.hop > rcfg.block_len) return fail(err, usage_error, "--hop must not exceed --block");
            rcfg.solver = solver.config();
            rcfg.fixed = solver.format();
            const AudioBuffer input = read_wav(in_path);
            const RestoreResult r = restore(input, rcfg);
            write_wav(out_path, r.restored);
            std::size_t flagged = 0;
            for (const auto& b : r.report) flagged += b.diverged;
            if (!aux_path.empty()) {
                std::ofstream rep(aux_path);
                if (!rep) return fail(err, data_error, "cannot write '" + aux_path + "'");
                write_report_csv(rep, r.report);
            }
            out << "restored " << r.report.size() << " blocks (" << flagged << " passed through) -> " << out_path
                << '\n';
            return ok;
        }

        if (recover->parsed()) {
            const SolverConfig cfg = solver.config();
            const auto fmt = solver.format();
            if (fmt && algorithm != "amp") return fail(err, usage_error, "--fixed is only available with --algorithm amp");
            const auto a = load_dense_matrix(matrix_path);
            const Signal y = load_vector(y_path);
            if (y.size() != a->rows())
                return fail(err, data_error,
                            y_path + ": expected " + std::to_string(a->rows()) + " values to match " + matrix_path +
                                ", got " + std::to_string(y.size()));
            RecoveryResult r;
            try {
                if (fmt)
                    r = amp_recover_fixed(y, *a, cfg, *fmt);
                else
                    r = algorithm == "amp" ? amp_recover(y, *a, cfg) : ist_recover(y, *a, cfg);
            } catch (const DivergenceError& e) {
                if (!trace_path.empty()) {
                    std::ofstream tr(trace_path);
                    write_trace_csv(tr, e.trace());
                }
                return fail(err, divergence, e.what());
            }
            if (!trace_path.empty()) {
                std::ofstream tr(trace_path);
                if (!tr) return fail(err, data_error, "cannot write '" + trace_path + "'");
                write_trace_csv(tr, r.trace);
            }
            if (out_path.empty()) {
                write_vector(out, r.estimate);
            } else {
                std::ofstream est(out_path);
                if (!est) return fail(err, data_error, "cannot write '" + out_path + "'");
                write_vector(est, r.estimate);
            }
            return ok;
        }

        if (compare->parsed()) {
            if (inst.sparsity > inst.cols) return fail(err, usage_error, "--k must not exceed --cols");
            for (std::size_t i = 0; i < seed_count; ++i) inst.seeds.push_back(first_seed + i);
            SolverConfig cfg;
            cfg.max_iters = compare_iters;
            cfg.tolerance = 0.0;
            cfg.policy = parse_threshold_policy(solver.policy);
            const CompareTable table = convergence_compare(inst, cfg);
            if (out_path.empty()) {
                write_compare_csv(out, table);
            } else {
                std::ofstream csv(out_path);
                if (!csv) return fail(err, data_error, "cannot write '" + out_path + "'");
                write_compare_csv(csv, table);
            }
            out << "median iterations to " << inst.target_error << ": amp " << table.median_amp << ", ist "
                << table.median_ist << '\n';
            return ok;
        }

        if (bench->parsed()) {
            if (bcfg.hop > bcfg.block_len) return fail(err, usage_error, "--hop must not exceed --block");
            bcfg.solver = bench_solver.config();
            bcfg.fixed = bench_solver.format();
            const BenchResult r = bench_throughput(duration, bcfg, channels);
            write_bench_summary(out, r);
            if (!aux_path.empty()) {
                std::ofstream csv(aux_path);
                if (!csv) return fail(err, data_error, "cannot write '" + aux_path + "'");
                write_bench_csv(csv, r);
            }
            return ok;
        }
    } catch (const WavError& e) {
        return fail(err, data_error, e.what());
    } catch (const ParseError& e) {
        return fail(err, data_error, e.what());
    } catch (const DimensionError& e) {
        return fail(err, data_error, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(err, usage_error, e.what());
    } catch (const std::exception& e) {
        return fail(err, data_error, e.what());
    }
    return fail(err, usage_error, "no subcommand given");
}

}  // namespace amprestore::cli
