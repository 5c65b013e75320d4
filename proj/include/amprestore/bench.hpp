#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "amprestore/audio.hpp"

namespace amprestore {

struct BenchResult {
    std::size_t samples_processed = 0;  // frames x channels
    double wall_seconds = 0.0;
    double samples_per_second = 0.0;
    double realtime_factor = 0.0;  // per-channel rate over the stream sample rate
    std::size_t channels = 0;
    int sample_rate = 44100;
    unsigned threads = 0;
    std::string cpu_model;
    RestoreConfig config;
};

BenchResult make_bench_result(std::size_t samples_processed, double wall_seconds, std::size_t channels,
                              int sample_rate);

/// Times restore() on synthesized stereo three-tone audio with clicks
/// (rate 0.005, amplitude 0.5). File I/O is not part of the measurement.
BenchResult bench_throughput(double duration_seconds, const RestoreConfig& config, std::size_t channels = 2);

std::string cpu_model();

void write_bench_csv(std::ostream& out, const BenchResult& r);
void write_bench_summary(std::ostream& out, const BenchResult& r);

}  // namespace amprestore
