#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "amprestore/audio.hpp"

namespace amprestore {

/// Malformed or unsupported WAV input. field() names the offending header field.
class WavError : public std::runtime_error {
public:
    WavError(std::string field, const std::string& msg)
        : std::runtime_error("wav " + field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// 16-bit PCM (format code 1), mono or stereo, little-endian RIFF.
// Samples map to raw / 32768; writing rounds half away from zero and clips.
AudioBuffer read_wav(std::istream& in);
AudioBuffer read_wav(const std::string& path);
void write_wav(std::ostream& out, const AudioBuffer& buffer);
void write_wav(const std::string& path, const AudioBuffer& buffer);

std::int16_t to_pcm16(double sample) noexcept;

}  // namespace amprestore
