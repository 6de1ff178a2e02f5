#pragma once

#include <ttnet/audio/features.hpp>
#include <ttnet/nn.hpp>

namespace ttnet::metrics {

inline constexpr double si_sdr_cap = 100.0;

// Scale-invariant SDR in dB, clipped to [-100, 100].
inline double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
    if (estimate.size() != reference.size()) {
        throw ShapeError("si_sdr: lengths differ (" + std::to_string(estimate.size()) + " vs " +
                         std::to_string(reference.size()) + ")");
    }
    double ss = 0.0, es = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        ss += reference[i] * reference[i];
        es += estimate[i] * reference[i];
    }
    if (!(ss > 0.0)) throw ValueError("si_sdr: reference is silent");
    const double alpha = es / ss;
    double target = 0.0, residual = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double t = alpha * reference[i];
        target += t * t;
        residual += (t - estimate[i]) * (t - estimate[i]);
    }
    if (residual == 0.0) return si_sdr_cap;
    if (target == 0.0) return -si_sdr_cap;
    return std::clamp(10.0 * std::log10(target / residual), -si_sdr_cap, si_sdr_cap);
}

inline double si_sdr(const audio::Waveform& estimate, const audio::Waveform& reference) {
    return si_sdr(std::span<const double>(estimate.samples), std::span<const double>(reference.samples));
}

struct SegmentalSnrConfig {
    std::size_t frame = 256;
    double floor_db = -10.0;
    double ceil_db = 35.0;
    double silence_energy = 1e-10; // reference frames at or below this are skipped
};

// Mean clamped per-frame SNR over non-overlapping frames; a trailing partial frame is included.
inline double segmental_snr(std::span<const double> estimate, std::span<const double> reference, const SegmentalSnrConfig& cfg = {}) {
    if (estimate.size() != reference.size()) throw ShapeError("segmental_snr: lengths differ");
    if (cfg.frame == 0) throw ValueError("segmental_snr: frame length must be positive");
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t start = 0; start < reference.size(); start += cfg.frame) {
        const std::size_t end = std::min(reference.size(), start + cfg.frame);
        double sig = 0.0, err = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            sig += reference[i] * reference[i];
            err += (estimate[i] - reference[i]) * (estimate[i] - reference[i]);
        }
        if (sig <= cfg.silence_energy) continue;
        const double snr = err == 0.0 ? cfg.ceil_db : 10.0 * std::log10(sig / err);
        total += std::clamp(snr, cfg.floor_db, cfg.ceil_db);
        ++counted;
    }
    if (counted == 0) throw ValueError("segmental_snr: every reference frame is silent");
    return total / static_cast<double>(counted);
}

inline double segmental_snr(const audio::Waveform& estimate, const audio::Waveform& reference, const SegmentalSnrConfig& cfg = {}) {
    return segmental_snr(std::span<const double>(estimate.samples), std::span<const double>(reference.samples), cfg);
}

inline double feature_mse(const audio::FeatureMatrix& pred, const audio::FeatureMatrix& clean) {
    return mse_loss(pred.values, clean.values);
}

} // namespace ttnet::metrics
