#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include "amprestore/bench.hpp"

namespace amprestore {

BenchResult make_bench_result(std::size_t samples_processed, double wall_seconds, std::size_t channels,
                              int sample_rate) {
    if (!(wall_seconds > 0.0)) throw std::invalid_argument("wall time must be positive");
    if (channels == 0 || sample_rate <= 0) throw std::invalid_argument("channels and sample rate must be positive");
    BenchResult r;
    r.samples_processed = samples_processed;
    r.wall_seconds = wall_seconds;
    r.samples_per_second = static_cast<double>(samples_processed) / wall_seconds;
    r.realtime_factor = r.samples_per_second / static_cast<double>(channels) / static_cast<double>(sample_rate);
    r.channels = channels;
    r.sample_rate = sample_rate;
    return r;
}

BenchResult bench_throughput(double duration_seconds, const RestoreConfig& config, std::size_t channels) {
    if (!(duration_seconds >= 1.0)) throw std::invalid_argument("benchmark duration must be at least 1 s");
    const AudioBuffer clean = synth_test_audio(duration_seconds, channels);
    const CorruptionResult corrupted = corrupt_clicks(clean, ClickSpec{0.005, 0.5, 1, 42});

    const auto start = std::chrono::steady_clock::now();
    const RestoreResult restored = restore(corrupted.corrupted, config);
    const auto stop = std::chrono::steady_clock::now();

    BenchResult r = make_bench_result(clean.frames() * channels, std::chrono::duration<double>(stop - start).count(),
                                      channels, clean.sample_rate);
    r.threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    r.cpu_model = cpu_model();
    r.config = config;
    return r;
}

std::string cpu_model() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) return line.substr(line.find_first_not_of(' ', colon + 1));
        }
    }
    return "unknown";
}

void write_bench_csv(std::ostream& out, const BenchResult& r) {
    out << "samples_processed,wall_seconds,samples_per_second,realtime_factor,channels,threads,block_len,hop,"
           "max_iters,arithmetic,cpu_model\n"
        << std::setprecision(17) << r.samples_processed << ',' << r.wall_seconds << ',' << r.samples_per_second
        << ',' << r.realtime_factor << ',' << r.channels << ',' << r.threads << ',' << r.config.block_len << ','
        << r.config.hop << ',' << r.config.solver.max_iters << ','
        << (r.config.fixed ? r.config.fixed->to_string() : std::string("float")) << ",\"" << r.cpu_model
        << "\"\n";
}

void write_bench_summary(std::ostream& out, const BenchResult& r) {
    out << "cpu:              " << r.cpu_model << '\n'
        << "threads:          " << r.threads << '\n'
        << "config:           M=" << r.config.block_len << " hop=" << r.config.hop
        << " iters=" << r.config.solver.max_iters << " policy=" << to_string(r.config.solver.policy)
        << " arithmetic=" << (r.config.fixed ? r.config.fixed->to_string() : std::string("float")) << '\n'
        << std::fixed << std::setprecision(3) << "audio:            "
        << static_cast<double>(r.samples_processed) / static_cast<double>(r.channels) / r.sample_rate << " s x "
        << r.channels << " ch @ " << r.sample_rate << " Hz\n"
        << "wall time:        " << r.wall_seconds << " s\n"
        << "throughput:       " << std::setprecision(0) << r.samples_per_second << " samples/s\n"
        << "real-time factor: " << std::setprecision(2) << r.realtime_factor << '\n';
}

}  // namespace amprestore
