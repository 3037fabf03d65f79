#include "coughgate/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "coughgate/error.hpp"
#include "internal/rng.hpp"

namespace coughgate {

namespace {

constexpr int kRate = 44100;

/// Two-pole resonator: y[n] = 2 r cos(w) y[n-1] - r^2 y[n-2] + x[n].
struct Resonator {
    double c1, c2;
    double y1 = 0.0, y2 = 0.0;

    Resonator(double freq_hz, double bandwidth_hz) {
        const double r = std::exp(-std::numbers::pi * bandwidth_hz / kRate);
        c1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / kRate);
        c2 = -r * r;
    }

    double step(double x) {
        const double y = c1 * y1 + c2 * y2 + x;
        y2 = y1;
        y1 = y;
        return y;
    }
};

AudioClip make_clip(std::uint64_t seed, Label label, int index) {
    internal::Rng rng(seed ^ (0x9e3779b97f4a7c15ull *
                              (static_cast<std::uint64_t>(index) * 2 + (label == Label::Covid ? 1 : 2))));

    // Each class keeps its own resonant bands; per-clip jitter stays small so
    // within-class spread is far below the between-class gap.
    const bool covid = label == Label::Covid;
    const double f1 = (covid ? 320.0 : 640.0) * rng.uniform(0.97, 1.03);
    const double f2 = (covid ? 1100.0 : 2100.0) * rng.uniform(0.97, 1.03);
    const double f3 = (covid ? 2400.0 : 4600.0) * rng.uniform(0.97, 1.03);
    Resonator r1(f1, 90.0), r2(f2, 140.0), r3(f3, 220.0);
    const double g1 = covid ? 1.0 : 0.45;
    const double g2 = 0.8;
    const double g3 = covid ? 0.4 : 0.9;

    const auto n = static_cast<std::size_t>(std::lround(kRate * rng.uniform(1.55, 1.67)));
    const double attack_s = 0.006;
    const double decay_s = rng.uniform(0.24, 0.30);

    std::vector<double> samples(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / kRate;
        const double env = (1.0 - std::exp(-t / attack_s)) * std::exp(-t / decay_s);
        const double x = rng.gaussian() * env;
        const double s = g1 * r1.step(x) + g2 * r2.step(x) + g3 * r3.step(x) +
                         1e-4 * rng.gaussian();
        samples[i] = s;
        peak = std::max(peak, std::abs(s));
    }
    const double target_peak = rng.uniform(0.55, 0.8);
    for (double& s : samples) s *= target_peak / peak;

    char name[64];
    std::snprintf(name, sizeof name, "%s_%03d.wav", to_token(label), index);
    return AudioClip(std::move(samples), kRate, name);
}

} // namespace

AudioDataset synth_corpus(std::uint64_t seed, int per_class) {
    if (per_class < 1) throw ConfigError("synth_corpus needs per_class >= 1");
    AudioDataset out;
    out.rows.reserve(static_cast<std::size_t>(per_class) * 2);
    for (int i = 0; i < per_class; ++i)
        out.rows.push_back({make_clip(seed, Label::Covid, i), Label::Covid});
    for (int i = 0; i < per_class; ++i)
        out.rows.push_back({make_clip(seed, Label::NonCovid, i), Label::NonCovid});
    out.validate();
    return out;
}

} // namespace coughgate
