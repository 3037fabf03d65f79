#pragma once

#include <span>
#include <string>
#include <vector>

#include "coughgate/audio.hpp"

namespace coughgate {

/// Sentinel for n_segments: average over every frame of the clip.
inline constexpr int kSegmentsAll = 0;

/// Extraction hyperparameters. The hop is always half the frame and the FFT
/// size equals the frame length, so both are derived rather than set.
struct MfccConfig {
    int frame_length = 2048;
    int n_mfcc = 19;
    int n_segments = 17; ///< kSegmentsAll averages every frame
    int n_mel_filters = 40;
    double log_floor = 1e-10;
    bool include_c0 = true; ///< keep the overall log-energy coefficient as the first MFCC

    int hop_length() const { return frame_length / 2; }
    int fft_size() const { return frame_length; }

    /// Throws ConfigError on any violated constraint (frame not a power of
    /// two, n_mfcc outside [2, n_mel_filters], bad segment count).
    void validate() const;
};

/// M x N coefficient matrix: one column per frame, row-major storage.
struct MfccMatrix {
    int n_coeffs = 0;
    int n_frames = 0;
    std::vector<double> values;
    MfccConfig config;

    double at(int coeff, int frame) const { return values[static_cast<std::size_t>(coeff) * n_frames + frame]; }
    double& at(int coeff, int frame) { return values[static_cast<std::size_t>(coeff) * n_frames + frame]; }
};

/// Periodic Hamming weights: w[i] = 0.54 - 0.46 cos(2 pi i / n).
std::vector<double> hamming_window(int n);

/// Frame start offsets 0, hop, 2*hop, ...; a trailing partial frame is
/// dropped. Empty when the signal is shorter than one frame.
std::vector<std::span<const double>> frame_signal(std::span<const double> samples,
                                                  int frame_length, int hop_length);

/// |DFT_k|^2 for k = 0..n/2. n must be a power of two.
std::vector<double> power_spectrum(std::span<const double> frame);

/// mel(f) = 2595 log10(1 + f/700).
double mel_scale(double hz);

/// Analytic inverse of mel_scale.
double mel_scale_inv(double mel);

/// Triangular mel filterbank spanning 0 Hz to Nyquist. Filters have unit
/// peak at their analytic center; weights are the triangle evaluated at the
/// FFT bin frequencies. Throws ConfigError when the filter density exceeds
/// the FFT resolution (some filter would see no bin at all).
struct MelFilterbank {
    int n_filters = 0;
    int n_bins = 0;                ///< fft_size/2 + 1
    std::vector<double> weights;   ///< row-major n_filters x n_bins
    std::vector<double> center_hz; ///< analytic centers, one per filter
    std::vector<double> edge_hz;   ///< n_filters + 2 knots including the virtual edges

    std::span<const double> row(int m) const {
        return {weights.data() + static_cast<std::size_t>(m) * n_bins, static_cast<std::size_t>(n_bins)};
    }
};

MelFilterbank mel_filterbank(int n_filters, int fft_size, int sample_rate);

/// Orthonormal DCT-II of the input, keeping the first n_out coefficients.
std::vector<double> dct2_orthonormal(std::span<const double> x, int n_out);

/// Full pipeline: frame, Hamming window, power spectrum, filterbank
/// energies, log with floor, orthonormal DCT-II, keep n_mfcc coefficients
/// (starting at c0 or c1 depending on include_c0). Throws ValidationError
/// when the clip is shorter than one frame. A caller-supplied filterbank
/// overrides the one derived from the config (it must match fft_size).
MfccMatrix extract_mfcc(const AudioClip& clip, const MfccConfig& config,
                        const MelFilterbank* filterbank = nullptr);

/// Row means over the first min(S, N) columns; kSegmentsAll uses every
/// column. When fewer columns exist than requested, *truncated is set.
std::vector<double> segment_average(const MfccMatrix& matrix, int n_segments,
                                    bool* truncated = nullptr);

} // namespace coughgate
