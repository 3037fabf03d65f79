#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace coughgate {

/// Mono sample buffer. The constructor enforces the ingestion contract:
/// non-empty, all samples finite, positive rate. Multi-channel audio is
/// downmixed before a clip exists.
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;
    std::string source_id;

    AudioClip() = default;
    AudioClip(std::vector<double> samples_, int sample_rate_, std::string source_id_);

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

enum class WavFormat { Pcm16, Float32 };

/// Reads a RIFF/WAVE file: PCM 16-bit or IEEE float 32-bit, 1 or 2
/// channels, any rate. Stereo is downmixed by per-sample channel mean;
/// 16-bit samples are scaled to [-1, 1) by 1/32768. Throws
/// UnsupportedFormatError for other codecs and IoError on truncation.
AudioClip read_wav(const std::filesystem::path& path);

void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavFormat format = WavFormat::Float32);

/// Windowed-sinc resampler (32-tap, Hann-windowed). Output length is
/// round(n * target_rate / rate). Returns the clip unchanged when the rate
/// already matches.
AudioClip resample(const AudioClip& clip, int target_rate);

/// Scales so the peak magnitude is 1. A silent clip is returned unchanged.
AudioClip peak_normalize(const AudioClip& clip);

} // namespace coughgate
