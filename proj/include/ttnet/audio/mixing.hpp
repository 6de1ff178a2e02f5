#pragma once

#include <ttnet/audio/wav.hpp>

#include <array>
#include <optional>
#include <random>

namespace ttnet::audio {

inline double energy(std::span<const double> x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

// Repeats or truncates to exactly n samples.
inline Waveform fit_length(const Waveform& w, std::size_t n, std::size_t offset = 0) {
    if (w.samples.empty()) throw ValueError("cannot loop an empty waveform");
    Waveform out{std::vector<double>(n), w.sample_rate};
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = w.samples[(i + offset) % w.size()];
    return out;
}

inline Waveform delay(const Waveform& w, std::size_t d) {
    if (d > w.size()) {
        throw ValueError("delay of " + std::to_string(d) + " samples exceeds signal length " + std::to_string(w.size()));
    }
    Waveform out{std::vector<double>(w.size(), 0.0), w.sample_rate};
    std::copy(w.samples.begin(), w.samples.end() - static_cast<std::ptrdiff_t>(d),
              out.samples.begin() + static_cast<std::ptrdiff_t>(d));
    return out;
}

inline Waveform scaled(Waveform w, double g) {
    for (double& v : w.samples) v *= g;
    return w;
}

inline double snr_db(std::span<const double> signal, std::span<const double> noise) {
    return 10.0 * std::log10(energy(signal) / energy(noise));
}

// Gain that puts `noise` at `snr_db` below `clean`; noise must already match the clean length.
inline double noise_gain_for_snr(std::span<const double> clean, std::span<const double> noise, double target_snr_db) {
    const double ec = energy(clean);
    const double en = energy(noise);
    if (!(ec > 0.0)) throw ValueError("mix_at_snr: clean signal is silent");
    if (!(en > 0.0)) throw ValueError("mix_at_snr: noise signal is silent");
    if (!std::isfinite(target_snr_db)) throw ValueError("mix_at_snr: SNR must be finite");
    return std::sqrt(ec / (en * std::pow(10.0, target_snr_db / 10.0)));
}

struct Mixture {
    Waveform mix;
    Waveform scaled_noise;
};

inline Mixture mix_components(const Waveform& clean, const Waveform& noise, double target_snr_db) {
    validate(clean);
    validate(noise);
    if (clean.sample_rate != noise.sample_rate) throw ValueError("mix_at_snr: sample rates differ");
    Waveform n = fit_length(noise, clean.size());
    const double alpha = noise_gain_for_snr(clean.samples, n.samples, target_snr_db);
    for (double& v : n.samples) v *= alpha;
    Waveform mix = clean;
    for (std::size_t i = 0; i < mix.size(); ++i) mix.samples[i] += n.samples[i];
    return {std::move(mix), std::move(n)};
}

inline Waveform mix_at_snr(const Waveform& clean, const Waveform& noise, double target_snr_db) {
    return mix_components(clean, noise, target_snr_db).mix;
}

struct SinrSnrPreset {
    double sinr_db;
    double snr_db;
};

// interference / noise pairings of the multi-speaker setup
inline constexpr std::array<SinrSnrPreset, 4> sinr_snr_presets{{{5, 10}, {5, 15}, {10, 15}, {15, 20}}};

struct MixtureScene {
    Waveform clean;
    Waveform noise;
    std::optional<Waveform> interferer;
    double snr_db = 5.0;
    std::optional<double> sinr_db;
    std::size_t channels = 1;
    std::vector<std::size_t> delays;            // per channel, empty = all zero
    std::vector<double> gains;                  // per channel, empty = all one
    std::vector<std::size_t> interferer_delays; // per channel, empty = same as delays
    std::uint64_t seed = 0;

    std::size_t delay_of(std::size_t b) const { return delays.empty() ? 0 : delays[b]; }
    double gain_of(std::size_t b) const { return gains.empty() ? 1.0 : gains[b]; }
    std::size_t interferer_delay_of(std::size_t b) const {
        return interferer_delays.empty() ? delay_of(b) : interferer_delays[b];
    }

    void validate() const {
        if (channels < 1) throw ValueError("scene needs at least one channel");
        if (!delays.empty() && delays.size() != channels) throw ValueError("scene: one delay per channel expected");
        if (!gains.empty() && gains.size() != channels) throw ValueError("scene: one gain per channel expected");
        if (!interferer_delays.empty() && interferer_delays.size() != channels) {
            throw ValueError("scene: one interferer delay per channel expected");
        }
        for (double g : gains) {
            if (!(g > 0.0) || !std::isfinite(g)) throw ValueError("scene gains must be positive");
        }
        audio::validate(clean);
        audio::validate(noise);
        if (interferer) audio::validate(*interferer);
        if (interferer.has_value() != sinr_db.has_value()) throw ValueError("scene: interferer and SINR go together");
        if (sinr_db && *sinr_db > snr_db) throw ValueError("scene: SINR cannot exceed SNR");
        for (std::size_t b = 0; b < channels; ++b) {
            if (delay_of(b) > clean.size() || interferer_delay_of(b) > clean.size()) {
                throw ValueError("scene: channel delay exceeds signal length");
            }
        }
    }
};

struct MultichannelMixture {
    std::vector<Waveform> noisy;
    std::vector<Waveform> clean_images; // gain_b * delay(clean, d_b), the per-channel target
};

// Delay-and-gain propagation. Channel 0 uses the scene noise as given; other channels read it from
// seeded circular offsets so the channels carry different noise realisations. Noise (and interference)
// are scaled per channel against that channel's speech image.
inline MultichannelMixture simulate_multichannel(const MixtureScene& scene) {
    scene.validate();
    const std::size_t n = scene.clean.size();
    std::mt19937_64 rng(scene.seed);
    std::uniform_int_distribution<std::size_t> offset_dist(0, scene.noise.size() - 1);

    MultichannelMixture out;
    for (std::size_t b = 0; b < scene.channels; ++b) {
        const std::size_t offset = b == 0 ? 0 : offset_dist(rng);
        Waveform image = scaled(delay(scene.clean, scene.delay_of(b)), scene.gain_of(b));
        Waveform noise = fit_length(scene.noise, n, offset);
        noise = scaled(std::move(noise), noise_gain_for_snr(image.samples, noise.samples, scene.snr_db));

        Waveform mix = image;
        for (std::size_t i = 0; i < n; ++i) mix.samples[i] += noise.samples[i];
        if (scene.interferer) {
            // SINR = S / (I + N) with N fixed by the SNR, so I = S (10^(-sinr/10) - 10^(-snr/10))
            const double s = energy(image.samples);
            const double target = s * (std::pow(10.0, -*scene.sinr_db / 10.0) - std::pow(10.0, -scene.snr_db / 10.0));
            if (target > 0.0) {
                Waveform inter = scaled(delay(fit_length(*scene.interferer, n), scene.interferer_delay_of(b)), scene.gain_of(b));
                const double ei = energy(inter.samples);
                if (!(ei > 0.0)) throw ValueError("scene: interferer is silent on channel " + std::to_string(b));
                const double g = std::sqrt(target / ei);
                for (std::size_t i = 0; i < n; ++i) mix.samples[i] += g * inter.samples[i];
            }
        }
        out.noisy.push_back(std::move(mix));
        out.clean_images.push_back(std::move(image));
    }
    return out;
}

} // namespace ttnet::audio
