#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "coughgate/audio.hpp"
#include "coughgate/error.hpp"
#include "internal/rng.hpp"

using namespace coughgate;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "coughgate_audio_tests";
    fs::create_directories(dir);
    return dir;
}

// Minimal WAV writer for malformed-input tests; the production writer
// refuses to produce these layouts.
void write_raw_wav(const fs::path& path, std::uint16_t format_tag, std::uint16_t channels,
                   std::uint16_t bits, const std::vector<char>& payload,
                   std::uint32_t declared_payload = UINT32_MAX) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::uint32_t data_size =
        declared_payload == UINT32_MAX ? static_cast<std::uint32_t>(payload.size())
                                       : declared_payload;
    const std::uint32_t fmt_size = 16;
    const std::uint32_t riff_size = 4 + 8 + fmt_size + 8 + data_size;
    const std::uint32_t rate = 44100;
    const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
    const std::uint32_t byte_rate = rate * block;

    auto put16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    out.write("RIFF", 4);
    put32(riff_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put32(fmt_size);
    put16(format_tag);
    put16(channels);
    put32(rate);
    put32(byte_rate);
    put16(block);
    put16(bits);
    out.write("data", 4);
    put32(data_size);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

} // namespace

TEST_CASE("clip constructor enforces the ingestion contract") {
    CHECK_THROWS_AS(AudioClip({}, 44100, "x"), ValidationError);
    CHECK_THROWS_AS(AudioClip({0.1, 0.2}, 0, "x"), ValidationError);
    CHECK_THROWS_AS(AudioClip({0.1, std::nan("")}, 44100, "x"), ValidationError);
    CHECK_NOTHROW(AudioClip({0.1}, 8000, "x"));
}

TEST_CASE("float32 WAV round trip is exact for representable samples") {
    const fs::path path = temp_dir() / "float.wav";
    std::vector<double> samples;
    internal::Rng rng(17);
    for (int i = 0; i < 500; ++i)
        samples.push_back(static_cast<double>(static_cast<float>(rng.uniform(-1.0, 1.0))));
    write_wav(path, AudioClip(samples, 22050, "float.wav"));

    const auto clip = read_wav(path);
    CHECK(clip.sample_rate == 22050);
    CHECK(clip.source_id == "float.wav");
    REQUIRE(clip.samples.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) CHECK(clip.samples[i] == samples[i]);
}

TEST_CASE("pcm16 WAV round trip is exact on the 1/32768 grid") {
    const fs::path path = temp_dir() / "pcm.wav";
    std::vector<double> samples;
    for (int v : {-32768, -12345, -1, 0, 1, 999, 32767})
        samples.push_back(v / 32768.0);
    write_wav(path, AudioClip(samples, 44100, "pcm.wav"), WavFormat::Pcm16);

    const auto clip = read_wav(path);
    REQUIRE(clip.samples.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) CHECK(clip.samples[i] == samples[i]);
}

TEST_CASE("stereo downmix is the channel mean") {
    const fs::path path = temp_dir() / "stereo.wav";
    // Interleaved L/R = +0.5 / -0.5: the mean cancels to zero.
    std::vector<char> payload;
    auto push16 = [&](std::int16_t v) {
        char b[2];
        std::memcpy(b, &v, 2);
        payload.insert(payload.end(), b, b + 2);
    };
    for (int i = 0; i < 10; ++i) {
        push16(16384);
        push16(-16384);
    }
    write_raw_wav(path, 1, 2, 16, payload);

    const auto clip = read_wav(path);
    REQUIRE(clip.samples.size() == 10);
    for (double s : clip.samples) CHECK(s == 0.0);
}

TEST_CASE("unsupported codecs are rejected") {
    const fs::path path = temp_dir() / "alaw.wav";
    write_raw_wav(path, 6, 1, 8, std::vector<char>(100, 0));
    CHECK_THROWS_AS(read_wav(path), UnsupportedFormatError);

    const fs::path pcm8 = temp_dir() / "pcm8.wav";
    write_raw_wav(pcm8, 1, 1, 8, std::vector<char>(100, 0));
    CHECK_THROWS_AS(read_wav(pcm8), UnsupportedFormatError);
}

TEST_CASE("truncated data chunk is an IO error") {
    const fs::path path = temp_dir() / "trunc.wav";
    write_raw_wav(path, 1, 1, 16, std::vector<char>(20, 0), /*declared_payload=*/400);
    CHECK_THROWS_AS(read_wav(path), IoError);
}

TEST_CASE("missing file is an IO error") {
    CHECK_THROWS_AS(read_wav(temp_dir() / "no_such_file.wav"), IoError);
}

TEST_CASE("resampling preserves duration and dominant frequency") {
    // One second of a 1 kHz sine at 48 kHz.
    std::vector<double> samples(48000);
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i] = 0.5 * std::sin(2.0 * 3.14159265358979323846 * 1000.0 * i / 48000.0);
    const AudioClip clip(samples, 48000, "sine");

    const auto out = resample(clip, 44100);
    CHECK(out.sample_rate == 44100);
    CHECK(out.samples.size() == 44100);

    // Project onto the 1 kHz quadrature pair; the amplitude must survive.
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double angle = 2.0 * 3.14159265358979323846 * 1000.0 * i / 44100.0;
        re += out.samples[i] * std::cos(angle);
        im += out.samples[i] * std::sin(angle);
    }
    const double amplitude = 2.0 * std::hypot(re, im) / out.samples.size();
    CHECK(amplitude == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("resampling to the same rate returns the clip unchanged") {
    const AudioClip clip({0.1, -0.2, 0.3}, 44100, "id");
    const auto out = resample(clip, 44100);
    CHECK(out.samples == clip.samples);
    CHECK(out.source_id == "id");
}

TEST_CASE("output length is round(n * target / rate)") {
    std::vector<double> samples(78960, 0.01);
    const AudioClip clip(samples, 48000, "len");
    CHECK(resample(clip, 44100).samples.size() == 72545); // round(78960 * 44100 / 48000)
    CHECK(resample(clip, 8000).samples.size() == 13160);
}

TEST_CASE("peak normalization") {
    const AudioClip clip({0.25, -0.5, 0.1}, 44100, "p");
    const auto out = peak_normalize(clip);
    CHECK(out.samples[1] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(out.samples[0] == doctest::Approx(0.5).epsilon(1e-15));

    const AudioClip silent({0.0, 0.0}, 44100, "s");
    const auto same = peak_normalize(silent);
    CHECK(same.samples == silent.samples);
}
