#pragma once

#include <ttnet/audio/features.hpp>
#include <ttnet/nn.hpp>

namespace ttnet::audio {

// What happens to bins above the modelled range: keep the noisy LPS, or silence them.
enum class HighBand : std::uint8_t { passthrough, zero };

struct EnhancementModel {
    std::string name = "model";
    Network net;
    FeatureConfig features;
    FeatureStats stats;
    HighBand high_band = HighBand::passthrough;
    std::optional<std::vector<std::size_t>> input_modes;

    void validate() const {
        features.validate();
        if (net.input_dim() != features.input_dim()) {
            throw ShapeError("model '" + name + "' expects " + std::to_string(net.input_dim()) +
                             " inputs but the feature geometry gives " + std::to_string(features.input_dim()));
        }
        if (net.output_dim() != features.target_dim()) {
            throw ShapeError("model '" + name + "' produces " + std::to_string(net.output_dim()) +
                             " outputs, the feature geometry needs " + std::to_string(features.target_dim()));
        }
        if (stats.input.bins() != num_bins || stats.target.bins() != num_bins) {
            throw ShapeError("model '" + name + "' carries stats of the wrong size");
        }
    }
};

// Writes predicted (raw, denormalised) frames into a full 257-bin LPS matrix built on the noisy reference.
// In tt mode bin 0 is never touched, so it stays the noisy reference DC value bit for bit.
inline FeatureMatrix assemble_lps(const DenseTensor& predicted_normalised, const FeatureMatrix& noisy_ref,
                                  const FeatureConfig& cfg, const FeatureStats& stats, HighBand high_band) {
    const std::size_t width = cfg.frame_width();
    const std::size_t lo = cfg.first_bin();
    if (predicted_normalised.rows() != noisy_ref.frames() || predicted_normalised.cols() != width) {
        throw ShapeError("assemble_lps: prediction is " + shape_string(predicted_normalised.shape()));
    }
    FeatureMatrix out{noisy_ref.values, std::nullopt};
    const double floor = std::log(lps_epsilon);
    for (std::size_t t = 0; t < out.frames(); ++t) {
        for (std::size_t k = 0; k < width; ++k) {
            const std::size_t bin = lo + k;
            out.values(t, bin) = predicted_normalised(t, k) * stats.target.stddev[bin] + stats.target.mean[bin];
        }
        if (high_band == HighBand::zero) {
            for (std::size_t bin = lo + width; bin < num_bins; ++bin) out.values(t, bin) = floor;
        }
    }
    return out;
}

inline Waveform synthesize(const FeatureMatrix& lps_frames, const Spectrogram& noisy_ref) {
    return istft(lps_invert(lps_frames, noisy_ref));
}

struct EnhancementTrace {
    std::vector<Spectrogram> spectra;
    std::vector<FeatureMatrix> noisy_lps;
    FeatureMatrix enhanced_lps;
};

inline EnhancementTrace enhance_features(const EnhancementModel& model, std::span<const Waveform> noisy) {
    model.validate();
    if (noisy.size() != model.features.channels) {
        throw ShapeError("enhance: model '" + model.name + "' wants " + std::to_string(model.features.channels) +
                         " channels, got " + std::to_string(noisy.size()));
    }
    EnhancementTrace tr;
    for (const auto& w : noisy) {
        if (w.size() != noisy[0].size()) throw ShapeError("enhance: channels differ in length");
        tr.spectra.push_back(stft(w));
        tr.noisy_lps.push_back(lps(tr.spectra.back()));
    }
    const RegressionDataset ds = build_dataset(tr.noisy_lps, nullptr, model.features, model.stats, model.input_modes);
    const DenseTensor pred = predict(model.net, ds.inputs);
    tr.enhanced_lps = assemble_lps(pred, tr.noisy_lps[0], model.features, model.stats, model.high_band);
    return tr;
}

// Regresses the reference channel's clean LPS and resynthesises with the noisy reference phase.
inline Waveform enhance(const EnhancementModel& model, std::span<const Waveform> noisy) {
    const EnhancementTrace tr = enhance_features(model, noisy);
    return synthesize(tr.enhanced_lps, tr.spectra[0]);
}

inline void write_model(io::Writer& w, const EnhancementModel& m) {
    w.tag("ENHM");
    w.string(m.name);
    w.u64(m.features.context);
    w.u64(m.features.channels);
    w.u64(m.features.bins);
    w.u8(static_cast<std::uint8_t>(m.features.mode));
    w.u8(static_cast<std::uint8_t>(m.high_band));
    w.u8(m.input_modes ? 1 : 0);
    if (m.input_modes) w.sizes(*m.input_modes);
    write_feature_stats(w, m.stats);
    io::write_network(w, m.net);
}

inline EnhancementModel read_model(io::Reader& r) {
    r.expect_tag("ENHM");
    EnhancementModel m;
    m.name = r.string(4096);
    m.features.context = r.u64();
    m.features.channels = r.u64();
    m.features.bins = r.u64();
    const auto mode = r.u8();
    const auto band = r.u8();
    if (mode > 1 || band > 1) throw FormatError("model record has an unknown mode");
    m.features.mode = static_cast<InputMode>(mode);
    m.high_band = static_cast<HighBand>(band);
    if (r.u8() != 0) m.input_modes = r.sizes(64);
    m.stats = read_feature_stats(r);
    m.net = io::read_network(r);
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("model record: ") + e.what());
    }
    return m;
}

inline void save_model(const std::string& path, const EnhancementModel& m) {
    io::write_file(path, [&](io::Writer& w) { write_model(w, m); });
}
inline EnhancementModel load_model(const std::string& path) {
    return io::read_file(path, [](io::Reader& r) { return read_model(r); });
}

} // namespace ttnet::audio
