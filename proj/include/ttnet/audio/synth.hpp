#pragma once

#include <ttnet/audio/wav.hpp>

#include <numbers>
#include <random>

namespace ttnet::audio {

struct SyntheticSpeechConfig {
    double duration_s = 2.0;
    int sample_rate = 16000;
    double f0_min = 95.0;
    double f0_max = 220.0;
    double max_frequency = 1900.0; // harmonics above this are not generated
    double breath_level = 0.02;    // aspiration noise relative to the voiced peak
};

namespace detail {

// Magnitude of a second-order resonator with unit gain at DC (one formant of a cascade synthesiser).
inline double resonance(double f, double centre, double bandwidth) {
    const double d = centre * centre - f * f;
    return centre * centre / std::sqrt(d * d + bandwidth * bandwidth * f * f);
}

} // namespace detail

// Windowed-sinc lowpass (Hamming), odd length, unit DC gain.
inline std::vector<double> lowpass_taps(double cutoff_hz, int sample_rate, std::size_t length = 255) {
    if (length % 2 == 0) ++length;
    const double fc = cutoff_hz / sample_rate;
    if (!(fc > 0.0 && fc < 0.5)) throw ValueError("lowpass cutoff must lie between 0 and Nyquist");
    std::vector<double> h(length);
    const double mid = static_cast<double>(length - 1) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i) - mid;
        const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
        const double win = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (length - 1));
        h[i] = sinc * win;
        sum += h[i];
    }
    for (double& v : h) v /= sum;
    return h;
}

// Zero-phase-aligned FIR: output sample i is centred on input sample i.
inline std::vector<double> fir_filter(std::span<const double> x, std::span<const double> h) {
    const std::size_t half = h.size() / 2;
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i + half) - static_cast<std::ptrdiff_t>(k);
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(x.size())) acc += h[k] * x[static_cast<std::size_t>(j)];
        }
        y[i] = acc;
    }
    return y;
}

// Gaussian noise, optionally lowpassed (cutoff_hz <= 0 leaves it white). Unit RMS before filtering.
inline Waveform synthetic_noise(std::size_t length, int sample_rate, std::uint64_t seed, double cutoff_hz = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Waveform w{std::vector<double>(length), sample_rate};
    for (double& v : w.samples) v = gauss(rng);
    if (cutoff_hz > 0.0) w.samples = fir_filter(w.samples, lowpass_taps(cutoff_hz, sample_rate));
    return w;
}

// Harmonic-plus-noise babble: voiced syllables with gliding pitch shaped by three cascade formants,
// separated by short pauses, plus a little band-limited aspiration noise. Peak normalised to 0.5.
inline Waveform synthetic_speech(const SyntheticSpeechConfig& cfg, std::uint64_t seed) {
    if (!(cfg.duration_s > 0.0) || cfg.sample_rate <= 0) throw ValueError("synthetic speech needs a positive duration and rate");
    const auto n = static_cast<std::size_t>(cfg.duration_s * cfg.sample_rate);
    const double fs = cfg.sample_rate;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Waveform w{std::vector<double>(n, 0.0), cfg.sample_rate};
    std::size_t pos = static_cast<std::size_t>(between(0.02, 0.12) * fs);
    while (pos < n) {
        const auto len = std::min(n - pos, static_cast<std::size_t>(between(0.12, 0.32) * fs));
        const double f0_start = between(cfg.f0_min, cfg.f0_max);
        const double f0_end = f0_start * between(0.8, 1.2);
        const double f1 = between(300.0, 800.0), f2 = between(900.0, 1800.0), f3 = between(2200.0, 2800.0);
        const double bw1 = between(60.0, 120.0), bw2 = between(80.0, 160.0), bw3 = between(120.0, 200.0);
        const double level = between(0.4, 1.0);
        const std::size_t harmonics = static_cast<std::size_t>(cfg.max_frequency / cfg.f0_min);
        std::vector<double> phase(harmonics + 1);
        for (auto& p : phase) p = between(0.0, 2.0 * std::numbers::pi);

        for (std::size_t i = 0; i < len; ++i) {
            const double u = static_cast<double>(i) / static_cast<double>(len);
            const double f0 = f0_start + (f0_end - f0_start) * u;
            const double env = level * std::sin(std::numbers::pi * u) * std::sin(std::numbers::pi * u);
            double s = 0.0;
            for (std::size_t h = 1; h <= harmonics; ++h) {
                const double f = f0 * static_cast<double>(h);
                phase[h] += 2.0 * std::numbers::pi * f / fs;
                if (f >= cfg.max_frequency) continue;
                // cascade formants on a -6 dB/octave source
                const double amp = detail::resonance(f, f1, bw1) * detail::resonance(f, f2, bw2) *
                                   detail::resonance(f, f3, bw3) / static_cast<double>(h);
                s += amp * std::sin(phase[h]);
            }
            w.samples[pos + i] += env * s;
        }
        pos += len + static_cast<std::size_t>(between(0.03, 0.12) * fs);
    }

    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        for (double& v : w.samples) v *= 0.5 / peak;
    }
    if (cfg.breath_level > 0.0) {
        const Waveform breath = synthetic_noise(n, cfg.sample_rate, seed ^ 0x9E3779B97F4A7C15ull, cfg.max_frequency);
        for (std::size_t i = 0; i < n; ++i) w.samples[i] += 0.5 * cfg.breath_level * breath.samples[i];
    }
    return w;
}

} // namespace ttnet::audio
