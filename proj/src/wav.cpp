#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "amprestore/wav.hpp"

namespace amprestore {

namespace {

std::uint32_t le32(const unsigned char* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void put16(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

bool read_exact(std::istream& in, unsigned char* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

}  // namespace

std::int16_t to_pcm16(double sample) noexcept {
    const double scaled = std::round(sample * 32768.0);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

AudioBuffer read_wav(std::istream& in) {
    std::array<unsigned char, 12> riff{};
    if (!read_exact(in, riff.data(), riff.size())) throw WavError("RIFF header", "file shorter than 12 bytes");
    if (std::memcmp(riff.data(), "RIFF", 4) != 0) throw WavError("RIFF header", "missing 'RIFF' tag");
    if (std::memcmp(riff.data() + 8, "WAVE", 4) != 0) throw WavError("RIFF header", "missing 'WAVE' tag");

    bool have_fmt = false;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    for (;;) {
        std::array<unsigned char, 8> hdr{};
        if (!read_exact(in, hdr.data(), hdr.size())) throw WavError("data chunk", "no 'data' chunk found");
        const std::uint32_t size = le32(hdr.data() + 4);
        if (std::memcmp(hdr.data(), "fmt ", 4) == 0) {
            if (size < 16) throw WavError("fmt chunk", "chunk shorter than 16 bytes");
            std::vector<unsigned char> body(size + (size & 1));
            if (!read_exact(in, body.data(), body.size())) throw WavError("fmt chunk", "truncated");
            const std::uint16_t format = le16(&body[0]);
            channels = le16(&body[2]);
            sample_rate = le32(&body[4]);
            const std::uint32_t byte_rate = le32(&body[8]);
            block_align = le16(&body[12]);
            const std::uint16_t bits = le16(&body[14]);
            if (format != 1) throw WavError("audio format", "only PCM (code 1) is supported, got " + std::to_string(format));
            if (bits != 16) throw WavError("bits per sample", "unsupported bit depth " + std::to_string(bits));
            if (channels < 1 || channels > 2)
                throw WavError("channels", "only mono or stereo is supported, got " + std::to_string(channels));
            if (sample_rate == 0) throw WavError("sample rate", "must be positive");
            if (block_align != channels * 2)
                throw WavError("block align", "expected " + std::to_string(channels * 2) + ", got " +
                                                  std::to_string(block_align));
            if (byte_rate != sample_rate * block_align)
                throw WavError("byte rate", "inconsistent with sample rate and block align");
            have_fmt = true;
        } else if (std::memcmp(hdr.data(), "data", 4) == 0) {
            if (!have_fmt) throw WavError("fmt chunk", "'data' chunk precedes 'fmt ' chunk");
            const std::size_t frames = size / block_align;
            std::vector<unsigned char> body(frames * block_align);
            if (!read_exact(in, body.data(), body.size())) throw WavError("data chunk", "truncated sample data");
            AudioBuffer buf;
            buf.sample_rate = static_cast<int>(sample_rate);
            buf.channels.assign(channels, Signal(frames));
            for (std::size_t f = 0; f < frames; ++f)
                for (std::size_t c = 0; c < channels; ++c) {
                    const auto raw = static_cast<std::int16_t>(le16(&body[(f * channels + c) * 2]));
                    buf.channels[c][f] = raw / 32768.0;
                }
            return buf;
        } else {
            in.ignore(static_cast<std::streamsize>(size) + (size & 1));
            if (!in) throw WavError("chunk " + std::string(reinterpret_cast<char*>(hdr.data()), 4), "truncated");
        }
    }
}

AudioBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError("file", "cannot open '" + path + "'");
    return read_wav(in);
}

void write_wav(std::ostream& out, const AudioBuffer& buffer) {
    buffer.validate();
    const auto channels = static_cast<std::uint16_t>(buffer.channels.size());
    const std::size_t frames = buffer.frames();
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * channels * 2);
    const auto rate = static_cast<std::uint32_t>(buffer.sample_rate);

    out.write("RIFF", 4);
    put32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put32(out, 16);
    put16(out, 1);
    put16(out, channels);
    put32(out, rate);
    put32(out, rate * channels * 2);
    put16(out, static_cast<std::uint16_t>(channels * 2));
    put16(out, 16);
    out.write("data", 4);
    put32(out, data_bytes);
    std::vector<char> body(data_bytes);
    for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t c = 0; c < channels; ++c) {
            const auto v = static_cast<std::uint16_t>(to_pcm16(buffer.channels[c][f]));
            body[(f * channels + c) * 2] = static_cast<char>(v & 0xff);
            body[(f * channels + c) * 2 + 1] = static_cast<char>(v >> 8);
        }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

void write_wav(const std::string& path, const AudioBuffer& buffer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WavError("file", "cannot create '" + path + "'");
    write_wav(out, buffer);
    if (!out) throw WavError("file", "write failed for '" + path + "'");
}

}  // namespace amprestore
