#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "amprestore/audio.hpp"
#include "amprestore/fixed_amp.hpp"
#include "amprestore/linops.hpp"
#include "amprestore/random.hpp"

namespace amprestore {

void AudioBuffer::validate() const {
    if (channels.empty() || channels.size() > 2)
        throw std::invalid_argument("audio buffer must have 1 or 2 channels, got " + std::to_string(channels.size()));
    if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
    for (const auto& ch : channels) {
        if (ch.size() != channels.front().size()) throw std::invalid_argument("audio channels differ in length");
        if (!all_finite(ch)) throw std::invalid_argument("audio buffer contains non-finite samples");
    }
}

void ClickSpec::validate() const {
    if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("click rate must lie in [0, 1]");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("click amplitude must be positive");
    if (width < 1) throw std::invalid_argument("click width must be at least 1");
}

CorruptionResult corrupt_clicks(const AudioBuffer& input, const ClickSpec& spec) {
    input.validate();
    spec.validate();
    CorruptionResult result{input, std::vector<std::vector<std::size_t>>(input.channels.size())};
    Rng rng(spec.seed);
    for (std::size_t c = 0; c < input.channels.size(); ++c) {
        Signal& ch = result.corrupted.channels[c];
        for (std::size_t i = 0; i < ch.size(); ++i) {
            if (!(rng.uniform() < spec.rate)) continue;
            const double delta = (rng.bits() & 1) ? spec.amplitude : -spec.amplitude;
            const std::size_t end = std::min(ch.size(), i + spec.width);
            for (std::size_t j = i; j < end; ++j) ch[j] += delta;
            result.positions[c].push_back(i);
        }
        for (double& v : ch) v = std::clamp(v, -1.0, 1.0);
    }
    return result;
}

void write_positions_csv(std::ostream& out, const CorruptionResult& result) {
    out << "channel,position\n";
    for (std::size_t c = 0; c < result.positions.size(); ++c)
        for (std::size_t p : result.positions[c]) out << c << ',' << p << '\n';
}

std::size_t block_count(std::size_t length, std::size_t block_len, std::size_t hop) {
    if (block_len == 0 || hop == 0 || hop > block_len) throw std::invalid_argument("need 1 <= hop <= block_len");
    if (length <= block_len) return 1;
    return (length - block_len + hop - 1) / hop + 1;
}

std::vector<Signal> segment_blocks(std::span<const double> x, std::size_t block_len, std::size_t hop) {
    const std::size_t count = block_count(x.size(), block_len, hop);
    std::vector<Signal> blocks(count, Signal(block_len, 0.0));
    for (std::size_t b = 0; b < count; ++b) {
        const std::size_t start = b * hop;
        const std::size_t end = std::min(x.size(), start + block_len);
        for (std::size_t i = start; i < end; ++i) blocks[b][i - start] = x[i];
    }
    return blocks;
}

Signal hann_window(std::size_t block_len) {
    Signal w(block_len);
    const double m = static_cast<double>(block_len);
    for (std::size_t n = 0; n < block_len; ++n)
        w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(n) + 0.5) / m);
    return w;
}

Signal overlap_add(const std::vector<Signal>& blocks, std::size_t block_len, std::size_t hop,
                   std::size_t original_len) {
    if (block_len == 0 || hop == 0 || hop > block_len) throw std::invalid_argument("need 1 <= hop <= block_len");
    const Signal w = hann_window(block_len);
    const std::size_t total = blocks.empty() ? 0 : (blocks.size() - 1) * hop + block_len;
    Signal acc(std::max(total, original_len), 0.0);
    Signal wsum(acc.size(), 0.0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        require_length("overlap_add block", block_len, blocks[b].size());
        const std::size_t start = b * hop;
        for (std::size_t n = 0; n < block_len; ++n) {
            acc[start + n] += w[n] * blocks[b][n];
            wsum[start + n] += w[n];
        }
    }
    Signal out(original_len);
    for (std::size_t i = 0; i < original_len; ++i) out[i] = wsum[i] < 1e-12 ? 0.0 : acc[i] / wsum[i];
    return out;
}

void RestoreConfig::validate() const {
    if (block_len == 0) throw std::invalid_argument("block length must be positive");
    if (hop == 0 || hop > block_len) throw std::invalid_argument("hop must lie in [1, block_len]");
    solver.validate();
    if (fixed) fixed->validate();
}

namespace {

template <class Fn>
void parallel_for(std::size_t jobs, unsigned threads, Fn&& fn) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
    if (workers <= 1) {
        for (std::size_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t j = next++; j < jobs; j = next++) {
                try {
                    fn(j);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

RestoreResult restore(const AudioBuffer& input, const RestoreConfig& config) {
    input.validate();
    config.validate();
    const std::size_t m = config.block_len;
    const auto dct = std::make_shared<DctSynthesis>(m);
    const auto dictionary = make_stacked(dct, make_identity(m));
    std::optional<FixedOperator> fixed_op;
    if (config.fixed) fixed_op.emplace(*dictionary, *config.fixed);

    const std::size_t nch = input.channels.size();
    std::vector<std::vector<Signal>> blocks(nch);
    for (std::size_t c = 0; c < nch; ++c) blocks[c] = segment_blocks(input.channels[c], m, config.hop);
    const std::size_t per_channel = blocks.front().size();

    std::vector<BlockReport> report(nch * per_channel);
    parallel_for(report.size(), config.threads, [&](std::size_t job) {
        const std::size_t c = job / per_channel;
        const std::size_t b = job % per_channel;
        Signal& block = blocks[c][b];
        BlockReport& rep = report[job];
        rep.block = b;
        rep.channel = c;
        try {
            RecoveryResult r = fixed_op ? amp_recover_fixed(block, *fixed_op, config.solver)
                                        : amp_recover(block, *dictionary, config.solver);
            rep.iters = r.trace.back().t;
            rep.final_residual = r.trace.back().residual_l2;
            rep.support = r.trace.back().support;
            dct->plan().inverse(std::span<const double>(r.estimate).first(m), block);
        } catch (const DivergenceError& e) {
            rep.iters = e.iteration();
            rep.final_residual = e.trace().empty() ? 0.0 : e.trace().back().residual_l2;
            rep.diverged = true;
        }
    });

    RestoreResult result;
    result.restored.sample_rate = input.sample_rate;
    result.restored.channels.resize(nch);
    for (std::size_t c = 0; c < nch; ++c) {
        Signal out = overlap_add(blocks[c], m, config.hop, input.frames());
        for (double& v : out) v = std::clamp(v, -1.0, 1.0);
        result.restored.channels[c] = std::move(out);
    }
    result.report = std::move(report);
    return result;
}

void write_report_csv(std::ostream& out, const std::vector<BlockReport>& report) {
    out << "block,channel,iters,final_residual,support,flag\n" << std::setprecision(17);
    for (const auto& r : report)
        out << r.block << ',' << r.channel << ',' << r.iters << ',' << r.final_residual << ',' << r.support << ','
            << (r.diverged ? "diverged" : "ok") << '\n';
}

Signal synth_tones(std::size_t frames, int sample_rate, std::span<const std::pair<double, double>> tones) {
    Signal out(frames, 0.0);
    for (const auto& [freq, amp] : tones)
        for (std::size_t n = 0; n < frames; ++n)
            out[n] += amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / sample_rate);
    return out;
}

AudioBuffer synth_test_audio(double seconds, std::size_t channels, int sample_rate) {
    static constexpr std::pair<double, double> kTones[] = {{440.0, 0.3}, {1250.0, 0.2}, {3100.0, 0.1}};
    const auto frames = static_cast<std::size_t>(std::llround(seconds * sample_rate));
    AudioBuffer buf;
    buf.sample_rate = sample_rate;
    for (std::size_t c = 0; c < channels; ++c) {
        Signal ch = synth_tones(frames, sample_rate, kTones);
        // Slightly different level per channel so stereo runs are not degenerate.
        const double gain = 1.0 - 0.1 * static_cast<double>(c);
        for (double& v : ch) v *= gain;
        buf.channels.push_back(std::move(ch));
    }
    return buf;
}

}  // namespace amprestore
