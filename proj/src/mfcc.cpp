#include "coughgate/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "coughgate/error.hpp"

namespace coughgate {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Iterative radix-2 Cooley-Tukey, in place. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace

void MfccConfig::validate() const {
    if (!is_power_of_two(frame_length) || frame_length < 2)
        throw ConfigError("frame_length must be a power of two >= 2, got " + std::to_string(frame_length));
    if (n_mel_filters < 1)
        throw ConfigError("n_mel_filters must be >= 1");
    if (n_mfcc < 2 || n_mfcc > n_mel_filters)
        throw ConfigError("n_mfcc must lie in [2, n_mel_filters], got " + std::to_string(n_mfcc));
    if (n_segments < 0)
        throw ConfigError("n_segments must be >= 1 or kSegmentsAll");
    if (!(log_floor > 0.0))
        throw ConfigError("log_floor must be positive");
}

std::vector<double> hamming_window(int n) {
    if (n < 2) throw ConfigError("hamming_window needs n >= 2");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / n);
    return w;
}

std::vector<std::span<const double>> frame_signal(std::span<const double> samples,
                                                  int frame_length, int hop_length) {
    if (frame_length < 2) throw ConfigError("frame_length must be >= 2");
    if (hop_length < 1) throw ConfigError("hop_length must be >= 1");
    std::vector<std::span<const double>> frames;
    if (samples.size() < static_cast<std::size_t>(frame_length)) return frames;
    const std::size_t n_frames =
        (samples.size() - static_cast<std::size_t>(frame_length)) / static_cast<std::size_t>(hop_length) + 1;
    frames.reserve(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f)
        frames.push_back(samples.subspan(f * static_cast<std::size_t>(hop_length),
                                         static_cast<std::size_t>(frame_length)));
    return frames;
}

std::vector<double> power_spectrum(std::span<const double> frame) {
    const std::size_t n = frame.size();
    if (!is_power_of_two(static_cast<int>(n)))
        throw ConfigError("power_spectrum needs a power-of-two frame length");
    std::vector<std::complex<double>> buf(frame.begin(), frame.end());
    fft_radix2(buf);
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) out[k] = std::norm(buf[k]);
    return out;
}

double mel_scale(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_scale_inv(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(int n_filters, int fft_size, int sample_rate) {
    if (n_filters < 1) throw ConfigError("mel_filterbank needs n_filters >= 1");
    if (!is_power_of_two(fft_size)) throw ConfigError("mel_filterbank needs a power-of-two fft_size");
    if (sample_rate < 1) throw ConfigError("mel_filterbank needs a positive sample rate");

    MelFilterbank fb;
    fb.n_filters = n_filters;
    fb.n_bins = fft_size / 2 + 1;
    fb.weights.assign(static_cast<std::size_t>(n_filters) * fb.n_bins, 0.0);

    const double nyquist = sample_rate / 2.0;
    const double mel_max = mel_scale(nyquist);
    fb.edge_hz.resize(static_cast<std::size_t>(n_filters) + 2);
    for (int j = 0; j < n_filters + 2; ++j)
        fb.edge_hz[static_cast<std::size_t>(j)] = mel_scale_inv(mel_max * j / (n_filters + 1));
    fb.edge_hz.front() = 0.0;
    fb.edge_hz.back() = nyquist;
    fb.center_hz.assign(fb.edge_hz.begin() + 1, fb.edge_hz.end() - 1);

    const double bin_hz = static_cast<double>(sample_rate) / fft_size;
    for (int m = 0; m < n_filters; ++m) {
        const double lo = fb.edge_hz[static_cast<std::size_t>(m)];
        const double center = fb.edge_hz[static_cast<std::size_t>(m) + 1];
        const double hi = fb.edge_hz[static_cast<std::size_t>(m) + 2];
        double peak = 0.0;
        for (int k = 0; k < fb.n_bins; ++k) {
            const double f = k * bin_hz;
            double w = 0.0;
            if (f > lo && f < hi)
                w = f <= center ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
            fb.weights[static_cast<std::size_t>(m) * fb.n_bins + k] = w;
            peak = std::max(peak, w);
        }
        if (peak == 0.0)
            throw ConfigError("mel filterbank is denser than the FFT resolution: filter " +
                              std::to_string(m) + " of " + std::to_string(n_filters) +
                              " covers no bin at fft_size " + std::to_string(fft_size));
    }
    return fb;
}

std::vector<double> dct2_orthonormal(std::span<const double> x, int n_out) {
    const std::size_t n = x.size();
    if (n == 0) throw ValidationError("dct2_orthonormal: empty input");
    if (n_out < 1 || static_cast<std::size_t>(n_out) > n)
        throw ConfigError("dct2_orthonormal: n_out outside [1, n]");
    std::vector<double> out(static_cast<std::size_t>(n_out));
    const double norm0 = std::sqrt(1.0 / static_cast<double>(n));
    const double norm = std::sqrt(2.0 / static_cast<double>(n));
    for (int k = 0; k < n_out; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += x[i] * std::cos(kPi * k * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
        out[static_cast<std::size_t>(k)] = s * (k == 0 ? norm0 : norm);
    }
    return out;
}

MfccMatrix extract_mfcc(const AudioClip& clip, const MfccConfig& config,
                        const MelFilterbank* filterbank) {
    config.validate();
    if (clip.samples.size() < static_cast<std::size_t>(config.frame_length))
        throw ValidationError("clip '" + clip.source_id + "' is shorter than one frame (" +
                              std::to_string(clip.samples.size()) + " < " +
                              std::to_string(config.frame_length) + " samples)");

    MelFilterbank local;
    if (filterbank == nullptr) {
        local = mel_filterbank(config.n_mel_filters, config.fft_size(), clip.sample_rate);
        filterbank = &local;
    } else if (filterbank->n_bins != config.fft_size() / 2 + 1) {
        throw ConfigError("filterbank bin count does not match fft_size");
    }

    const auto frames = frame_signal(clip.samples, config.frame_length, config.hop_length());
    const auto window = hamming_window(config.frame_length);
    const int n_filters = filterbank->n_filters;
    // Coefficient c0 is dropped when include_c0 is false, so one extra DCT
    // coefficient is computed and the kept range shifts by one.
    const int dct_out = config.include_c0 ? config.n_mfcc : config.n_mfcc + 1;
    if (dct_out > n_filters)
        throw ConfigError("n_mfcc too large for the filter count with include_c0 = false");

    MfccMatrix m;
    m.n_coeffs = config.n_mfcc;
    m.n_frames = static_cast<int>(frames.size());
    m.config = config;
    m.values.assign(static_cast<std::size_t>(m.n_coeffs) * m.n_frames, 0.0);

    std::vector<double> windowed(static_cast<std::size_t>(config.frame_length));
    std::vector<double> log_energy(static_cast<std::size_t>(n_filters));
    for (int f = 0; f < m.n_frames; ++f) {
        const auto frame = frames[static_cast<std::size_t>(f)];
        for (int i = 0; i < config.frame_length; ++i)
            windowed[static_cast<std::size_t>(i)] = frame[static_cast<std::size_t>(i)] * window[static_cast<std::size_t>(i)];
        const auto power = power_spectrum(windowed);
        for (int flt = 0; flt < n_filters; ++flt) {
            const auto row = filterbank->row(flt);
            double e = 0.0;
            for (std::size_t k = 0; k < power.size(); ++k) e += row[k] * power[k];
            log_energy[static_cast<std::size_t>(flt)] = std::log(std::max(e, config.log_floor));
        }
        const auto coeffs = dct2_orthonormal(log_energy, dct_out);
        for (int c = 0; c < m.n_coeffs; ++c)
            m.at(c, f) = coeffs[static_cast<std::size_t>(config.include_c0 ? c : c + 1)];
    }
    return m;
}

std::vector<double> segment_average(const MfccMatrix& matrix, int n_segments, bool* truncated) {
    if (matrix.n_frames < 1 || matrix.n_coeffs < 1)
        throw ValidationError("segment_average: empty MFCC matrix");
    if (n_segments < 0) throw ConfigError("n_segments must be >= 1 or kSegmentsAll");
    int used = matrix.n_frames;
    bool was_truncated = false;
    if (n_segments != kSegmentsAll) {
        used = std::min(n_segments, matrix.n_frames);
        was_truncated = n_segments > matrix.n_frames;
    }
    if (truncated != nullptr) *truncated = was_truncated;
    std::vector<double> out(static_cast<std::size_t>(matrix.n_coeffs));
    for (int c = 0; c < matrix.n_coeffs; ++c) {
        double s = 0.0;
        for (int f = 0; f < used; ++f) s += matrix.at(c, f);
        out[static_cast<std::size_t>(c)] = s / used;
    }
    return out;
}

} // namespace coughgate
