#include "coughgate/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "coughgate/error.hpp"

namespace coughgate {

namespace {

constexpr int kResampleHalfTaps = 16; // 32-tap kernel

uint16_t read_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t read_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void write_u16(std::ofstream& out, uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32(std::ofstream& out, uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace

AudioClip::AudioClip(std::vector<double> samples_, int sample_rate_, std::string source_id_)
    : samples(std::move(samples_)), sample_rate(sample_rate_), source_id(std::move(source_id_)) {
    if (samples.empty()) throw ValidationError("audio clip '" + source_id + "' has no samples");
    if (sample_rate <= 0)
        throw ValidationError("audio clip '" + source_id + "' has non-positive sample rate");
    for (double s : samples)
        if (!std::isfinite(s))
            throw ValidationError("audio clip '" + source_id + "' contains a non-finite sample");
}

AudioClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw UnsupportedFormatError("'" + path.string() + "' is not a RIFF/WAVE file");

    uint16_t format_tag = 0;
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits = 0;
    bool have_fmt = false;
    std::size_t data_offset = 0;
    uint32_t data_size = 0;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (body + 16 > bytes.size())
                throw IoError("'" + path.string() + "': truncated fmt chunk");
            format_tag = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_offset = body;
            data_size = size;
            have_data = true;
            if (body + size > bytes.size())
                throw IoError("'" + path.string() + "': data chunk declares " +
                              std::to_string(size) + " bytes but the file ends early");
        }
        pos = body + size + (size & 1); // chunks are word-aligned
    }
    if (!have_fmt || !have_data)
        throw UnsupportedFormatError("'" + path.string() + "' lacks fmt or data chunk");
    if (channels < 1 || channels > 2)
        throw UnsupportedFormatError("'" + path.string() + "': " + std::to_string(channels) +
                                     " channels (only mono and stereo are handled)");
    if (sample_rate == 0) throw UnsupportedFormatError("'" + path.string() + "': zero sample rate");

    const bool pcm16 = format_tag == 1 && bits == 16;
    const bool float32 = format_tag == 3 && bits == 32;
    if (!pcm16 && !float32)
        throw UnsupportedFormatError("'" + path.string() + "': format tag " +
                                     std::to_string(format_tag) + " at " + std::to_string(bits) +
                                     " bits (only 16-bit PCM and 32-bit float are handled)");

    const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    if (data_size % frame_bytes != 0)
        throw IoError("'" + path.string() + "': data chunk size " + std::to_string(data_size) +
                      " is not a whole number of frames");
    const std::size_t n_frames = data_size / frame_bytes;
    if (n_frames == 0) throw ValidationError("'" + path.string() + "' holds no samples");

    std::vector<double> mono(n_frames);
    const unsigned char* p = bytes.data() + data_offset;
    for (std::size_t f = 0; f < n_frames; ++f) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            const unsigned char* s = p + f * frame_bytes + static_cast<std::size_t>(c) * bytes_per_sample;
            if (pcm16) {
                const auto raw = static_cast<int16_t>(read_u16(s));
                acc += raw / 32768.0;
            } else {
                const uint32_t u = read_u32(s);
                float v;
                std::memcpy(&v, &u, 4);
                acc += v;
            }
        }
        mono[f] = acc / channels;
    }
    return AudioClip(std::move(mono), static_cast<int>(sample_rate), path.filename().string());
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");

    const bool pcm16 = format == WavFormat::Pcm16;
    const uint32_t bytes_per_sample = pcm16 ? 2 : 4;
    const auto n = static_cast<uint32_t>(clip.samples.size());
    const uint32_t data_size = n * bytes_per_sample;

    out.write("RIFF", 4);
    write_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, pcm16 ? 1 : 3);
    write_u16(out, 1); // mono
    write_u32(out, static_cast<uint32_t>(clip.sample_rate));
    write_u32(out, static_cast<uint32_t>(clip.sample_rate) * bytes_per_sample);
    write_u16(out, static_cast<uint16_t>(bytes_per_sample));
    write_u16(out, static_cast<uint16_t>(bytes_per_sample * 8));
    out.write("data", 4);
    write_u32(out, data_size);

    for (double s : clip.samples) {
        if (pcm16) {
            const double clamped = std::clamp(s, -1.0, 32767.0 / 32768.0);
            write_u16(out, static_cast<uint16_t>(static_cast<int16_t>(std::lrint(clamped * 32768.0))));
        } else {
            const auto v = static_cast<float>(s);
            uint32_t u;
            std::memcpy(&u, &v, 4);
            write_u32(out, u);
        }
    }
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

AudioClip resample(const AudioClip& clip, int target_rate) {
    if (target_rate <= 0) throw ConfigError("resample target rate must be positive");
    if (target_rate == clip.sample_rate) return clip;

    const auto n_in = static_cast<long long>(clip.samples.size());
    const auto n_out = static_cast<std::size_t>(std::llround(
        static_cast<double>(n_in) * target_rate / clip.sample_rate));
    if (n_out == 0)
        throw ValidationError("clip '" + clip.source_id + "' is too short to resample to " +
                              std::to_string(target_rate) + " Hz");

    // Anti-aliasing cutoff: when downsampling, the kernel band-limits to the
    // target Nyquist; when upsampling it passes the input band untouched.
    const double step = static_cast<double>(clip.sample_rate) / target_rate;
    const double cutoff = std::min(1.0, static_cast<double>(target_rate) / clip.sample_rate);

    std::vector<double> out(n_out);
    for (std::size_t j = 0; j < n_out; ++j) {
        const double t = static_cast<double>(j) * step;
        const auto k0 = static_cast<long long>(std::floor(t)) - (kResampleHalfTaps - 1);
        double acc = 0.0;
        for (long long k = k0; k < k0 + 2 * kResampleHalfTaps; ++k) {
            if (k < 0 || k >= n_in) continue;
            const double d = static_cast<double>(k) - t;
            const double hann = 0.5 + 0.5 * std::cos(std::numbers::pi * d / kResampleHalfTaps);
            acc += clip.samples[static_cast<std::size_t>(k)] * cutoff * sinc(cutoff * d) * hann;
        }
        out[j] = acc;
    }
    return AudioClip(std::move(out), target_rate, clip.source_id);
}

AudioClip peak_normalize(const AudioClip& clip) {
    double peak = 0.0;
    for (double s : clip.samples) peak = std::max(peak, std::abs(s));
    if (peak == 0.0) return clip;
    AudioClip out = clip;
    for (double& s : out.samples) s /= peak;
    return out;
}

} // namespace coughgate
