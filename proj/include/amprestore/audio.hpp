#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "amprestore/amp.hpp"
#include "amprestore/fixedpoint.hpp"
#include "amprestore/signal.hpp"

namespace amprestore {

struct AudioBuffer {
    int sample_rate = 44100;
    std::vector<Signal> channels;  // 1 or 2, equal length, full scale +-1.0

    std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
    void validate() const;
};

/// Impulsive corruption model: each sample starts a click with probability
/// `rate`; a click adds +-amplitude over `width` samples.
struct ClickSpec {
    double rate = 0.0;
    double amplitude = 0.5;
    std::size_t width = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CorruptionResult {
    AudioBuffer corrupted;
    std::vector<std::vector<std::size_t>> positions;  // per channel, click start indices
};

CorruptionResult corrupt_clicks(const AudioBuffer& input, const ClickSpec& spec);
void write_positions_csv(std::ostream& out, const CorruptionResult& result);

/// Blocks of length `block_len` starting at 0, hop, 2 hop, ...; the tail is zero-padded.
std::vector<Signal> segment_blocks(std::span<const double> x, std::size_t block_len, std::size_t hop);
std::size_t block_count(std::size_t length, std::size_t block_len, std::size_t hop);

/// Strictly positive Hann window 0.5 - 0.5 cos(2 pi (n + 1/2) / M).
Signal hann_window(std::size_t block_len);

/// Hann-weighted overlap-add normalized by the accumulated window, trimmed to
/// original_len. Positions with window sum < 1e-12 produce 0.
Signal overlap_add(const std::vector<Signal>& blocks, std::size_t block_len, std::size_t hop,
                   std::size_t original_len);

struct RestoreConfig {
    std::size_t block_len = 512;
    std::size_t hop = 256;
    SolverConfig solver{};
    /// Unset runs the double-precision engine.
    std::optional<FixedPointFormat> fixed;
    /// Worker threads for block solves; 0 means hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

struct BlockReport {
    std::size_t block = 0;
    std::size_t channel = 0;
    int iters = 0;
    double final_residual = 0.0;
    std::size_t support = 0;
    bool diverged = false;
};

struct RestoreResult {
    AudioBuffer restored;
    std::vector<BlockReport> report;  // ordered by (channel, block)
};

/// Per channel and block: recover [a; b] over [DCT synthesis | I], keep the
/// tonal part s = C^T a, overlap-add. Diverging blocks pass through unchanged
/// and are flagged in the report.
RestoreResult restore(const AudioBuffer& input, const RestoreConfig& config);

/// CSV with header "block,channel,iters,final_residual,support,flag".
void write_report_csv(std::ostream& out, const std::vector<BlockReport>& report);

/// Sum of sinusoids (Hz, amplitude) sampled at `sample_rate`.
Signal synth_tones(std::size_t frames, int sample_rate, std::span<const std::pair<double, double>> tones);

/// Three-tone mixture used by the benchmark and the reference runs.
AudioBuffer synth_test_audio(double seconds, std::size_t channels = 1, int sample_rate = 44100);

}  // namespace amprestore
