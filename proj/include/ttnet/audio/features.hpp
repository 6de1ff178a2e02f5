#pragma once

#include <ttnet/audio/stft.hpp>
#include <ttnet/serialize.hpp>
#include <ttnet/tt_matrix.hpp>

#include <optional>

namespace ttnet::audio {

inline constexpr double lps_epsilon = 1e-12;

struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t bins() const { return mean.size(); }
    bool operator==(const NormStats&) const = default;
};

// T x F log-power values; stats are set once the matrix has been normalised.
struct FeatureMatrix {
    DenseTensor values = DenseTensor::matrix(1, 1);
    std::optional<NormStats> norm_stats;

    std::size_t frames() const { return values.rows(); }
    std::size_t bins() const { return values.cols(); }
};

inline FeatureMatrix lps(const Spectrogram& s) {
    FeatureMatrix f{DenseTensor::matrix(s.frames, s.bins), std::nullopt};
    for (std::size_t t = 0; t < s.frames; ++t) {
        for (std::size_t k = 0; k < s.bins; ++k) f.values(t, k) = std::log(s.power(t, k) + lps_epsilon);
    }
    return f;
}

// Magnitude from the features, phase from `phase`. Bins where `phase` is exactly zero get phase 0.
inline Spectrogram lps_invert(const FeatureMatrix& f, const Spectrogram& phase) {
    if (f.frames() != phase.frames || f.bins() != phase.bins) {
        throw ShapeError("lps_invert: features are " + shape_string(f.values.shape()) + " but the phase spectrogram is " +
                         std::to_string(phase.frames) + "x" + std::to_string(phase.bins));
    }
    if (f.norm_stats) throw ValueError("lps_invert: features are still normalised");
    Spectrogram out = phase;
    for (std::size_t t = 0; t < phase.frames; ++t) {
        for (std::size_t k = 0; k < phase.bins; ++k) {
            const double mag = std::exp(0.5 * f.values(t, k));
            const auto z = phase.at(t, k);
            const double r = std::abs(z);
            out.set(t, k, r > 0.0 ? z * (mag / r) : std::complex<double>(mag, 0.0));
        }
    }
    return out;
}

inline constexpr double variance_floor = 1e-8;

// Per-bin mean and standard deviation pooled over every frame of every matrix.
inline NormStats fit_norm_stats(std::span<const FeatureMatrix* const> mats) {
    if (mats.empty()) throw ValueError("fit_norm_stats needs at least one feature matrix");
    const std::size_t bins = mats[0]->bins();
    std::vector<double> sum(bins, 0.0);
    std::size_t count = 0;
    for (const auto* m : mats) {
        if (m->bins() != bins) throw ShapeError("fit_norm_stats: feature matrices differ in bin count");
        for (std::size_t t = 0; t < m->frames(); ++t)
            for (std::size_t k = 0; k < bins; ++k) sum[k] += m->values(t, k);
        count += m->frames();
    }
    NormStats st{std::vector<double>(bins), std::vector<double>(bins)};
    for (std::size_t k = 0; k < bins; ++k) st.mean[k] = sum[k] / static_cast<double>(count);
    std::vector<double> sq(bins, 0.0);
    for (const auto* m : mats) {
        for (std::size_t t = 0; t < m->frames(); ++t)
            for (std::size_t k = 0; k < bins; ++k) {
                const double d = m->values(t, k) - st.mean[k];
                sq[k] += d * d;
            }
    }
    for (std::size_t k = 0; k < bins; ++k) {
        st.stddev[k] = std::sqrt(std::max(sq[k] / static_cast<double>(count), variance_floor));
    }
    return st;
}

inline NormStats fit_norm_stats(const FeatureMatrix& m) {
    const FeatureMatrix* p = &m;
    return fit_norm_stats(std::span<const FeatureMatrix* const>(&p, 1));
}

inline FeatureMatrix normalize(const FeatureMatrix& f, const NormStats& st) {
    if (f.norm_stats) throw ValueError("normalize: features are already normalised");
    if (st.bins() != f.bins() || st.stddev.size() != f.bins()) throw ShapeError("normalize: stats do not match bin count");
    FeatureMatrix out{f.values, st};
    for (std::size_t t = 0; t < f.frames(); ++t)
        for (std::size_t k = 0; k < f.bins(); ++k) out.values(t, k) = (f.values(t, k) - st.mean[k]) / st.stddev[k];
    return out;
}

// Fits stats on `f` itself.
inline FeatureMatrix normalize(const FeatureMatrix& f) { return normalize(f, fit_norm_stats(f)); }

inline FeatureMatrix denormalize(const FeatureMatrix& f) {
    if (!f.norm_stats) throw ValueError("denormalize: features carry no stats");
    const NormStats& st = *f.norm_stats;
    if (st.bins() != f.bins()) throw ShapeError("denormalize: stats do not match bin count");
    FeatureMatrix out{f.values, std::nullopt};
    for (std::size_t t = 0; t < f.frames(); ++t)
        for (std::size_t k = 0; k < f.bins(); ++k) out.values(t, k) = f.values(t, k) * st.stddev[k] + st.mean[k];
    return out;
}

enum class InputMode : std::uint8_t { dense, tt };

// Frequency range and window geometry of the regression. Dense nets see bins [0, bins]; TT nets drop the
// DC bin and see [1, bins], so F' = bins + 1 or bins respectively.
struct FeatureConfig {
    std::size_t context = 5;  // M, the window holds 2M+1 frames
    std::size_t channels = 1; // B
    std::size_t bins = 256;
    InputMode mode = InputMode::dense;

    std::size_t first_bin() const { return mode == InputMode::dense ? 0 : 1; }
    std::size_t frame_width() const { return mode == InputMode::dense ? bins + 1 : bins; }
    std::size_t window() const { return 2 * context + 1; }
    std::size_t input_dim() const { return frame_width() * window() * channels; }
    std::size_t target_dim() const { return frame_width(); }

    void validate() const {
        if (channels < 1) throw ValueError("feature config needs at least one channel");
        if (bins < 1 || bins > num_bins - 1) throw ValueError("feature config: bins must lie in [1, 256]");
    }
    bool operator==(const FeatureConfig&) const = default;
};

// Input and target statistics over all 257 bins, fitted on training features only.
struct FeatureStats {
    NormStats input;
    NormStats target;
    bool operator==(const FeatureStats&) const = default;
};

struct RegressionDataset {
    DenseTensor inputs = DenseTensor::matrix(1, 1);  // N x F'(2M+1)B, row layout (channel, offset, bin)
    DenseTensor targets = DenseTensor::matrix(1, 1); // N x F', empty-width placeholder when no clean ref
    std::optional<std::vector<std::size_t>> input_modes;
    std::vector<double> dc_channel; // raw noisy reference DC bin per frame (tt mode)
    bool has_targets = false;

    std::size_t rows() const { return inputs.rows(); }
};

inline FeatureStats fit_feature_stats(std::span<const FeatureMatrix* const> noisy, std::span<const FeatureMatrix* const> clean) {
    return {fit_norm_stats(noisy), fit_norm_stats(clean)};
}

// channels: raw LPS per microphone (reference first). clean_ref: raw clean LPS of the reference channel or
// null at inference time. Normalisation happens here with the frozen stats.
inline RegressionDataset build_dataset(std::span<const FeatureMatrix> channels, const FeatureMatrix* clean_ref,
                                       const FeatureConfig& cfg, const FeatureStats& stats,
                                       std::optional<std::vector<std::size_t>> input_modes = std::nullopt) {
    cfg.validate();
    if (channels.size() != cfg.channels) {
        throw ShapeError("build_dataset: expected " + std::to_string(cfg.channels) + " channels, got " +
                         std::to_string(channels.size()));
    }
    const std::size_t frames = channels[0].frames();
    for (const auto& c : channels) {
        if (c.frames() != frames) throw ShapeError("build_dataset: channels differ in frame count");
        if (c.bins() != num_bins) throw ShapeError("build_dataset: expected 257-bin LPS features");
        if (c.norm_stats) throw ValueError("build_dataset: pass raw (unnormalised) features");
    }
    if (clean_ref && (clean_ref->frames() != frames || clean_ref->bins() != num_bins)) {
        throw ShapeError("build_dataset: clean reference does not match the noisy channels");
    }
    if (stats.input.bins() != num_bins || stats.target.bins() != num_bins) throw ShapeError("build_dataset: stats must cover 257 bins");
    if (input_modes && shape_product(*input_modes) != cfg.input_dim()) {
        throw ShapeError("build_dataset: input modes " + shape_string(*input_modes) + " multiply to " +
                         std::to_string(shape_product(*input_modes)) + ", row width is " + std::to_string(cfg.input_dim()));
    }

    const std::size_t width = cfg.frame_width();
    const std::size_t lo = cfg.first_bin();
    const auto radius = static_cast<std::ptrdiff_t>(cfg.context);
    RegressionDataset ds;
    ds.inputs = DenseTensor::matrix(frames, cfg.input_dim());
    ds.input_modes = std::move(input_modes);
    for (std::size_t t = 0; t < frames; ++t) {
        double* row = &ds.inputs(t, 0);
        for (std::size_t b = 0; b < cfg.channels; ++b) {
            for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
                const auto src = static_cast<std::size_t>(
                    std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t) + o, 0, static_cast<std::ptrdiff_t>(frames) - 1));
                for (std::size_t k = 0; k < width; ++k) {
                    const std::size_t bin = lo + k;
                    *row++ = (channels[b].values(src, bin) - stats.input.mean[bin]) / stats.input.stddev[bin];
                }
            }
        }
    }
    if (clean_ref) {
        ds.has_targets = true;
        ds.targets = DenseTensor::matrix(frames, width);
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t k = 0; k < width; ++k) {
                const std::size_t bin = lo + k;
                ds.targets(t, k) = (clean_ref->values(t, bin) - stats.target.mean[bin]) / stats.target.stddev[bin];
            }
    }
    if (cfg.mode == InputMode::tt) {
        ds.dc_channel.resize(frames);
        for (std::size_t t = 0; t < frames; ++t) ds.dc_channel[t] = channels[0].values(t, 0);
    }
    return ds;
}

// Stacks datasets row-wise (targets required).
inline RegressionDataset concatenate(std::span<const RegressionDataset> parts) {
    if (parts.empty()) throw ValueError("concatenate: nothing to stack");
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (!p.has_targets) throw ValueError("concatenate: every part needs targets");
        if (p.inputs.cols() != parts[0].inputs.cols() || p.targets.cols() != parts[0].targets.cols()) {
            throw ShapeError("concatenate: parts differ in width");
        }
        rows += p.rows();
    }
    RegressionDataset out;
    out.has_targets = true;
    out.input_modes = parts[0].input_modes;
    out.inputs = DenseTensor::matrix(rows, parts[0].inputs.cols());
    out.targets = DenseTensor::matrix(rows, parts[0].targets.cols());
    auto in = out.inputs.data().begin();
    auto tg = out.targets.data().begin();
    for (const auto& p : parts) {
        in = std::copy(p.inputs.data().begin(), p.inputs.data().end(), in);
        tg = std::copy(p.targets.data().begin(), p.targets.data().end(), tg);
        out.dc_channel.insert(out.dc_channel.end(), p.dc_channel.begin(), p.dc_channel.end());
    }
    return out;
}

// Records for feature / stats caches.
namespace io_detail {

inline void write_stats(io::Writer& w, const NormStats& st) {
    w.tag("NRMS");
    w.u64(st.mean.size());
    w.reals(st.mean);
    w.reals(st.stddev);
}

inline NormStats read_stats(io::Reader& r) {
    r.expect_tag("NRMS");
    const std::uint64_t n = r.u64();
    if (n == 0 || n > (1u << 20)) throw FormatError("stats record has an implausible bin count");
    NormStats st{std::vector<double>(n), std::vector<double>(n)};
    r.reals(st.mean);
    r.reals(st.stddev);
    return st;
}

} // namespace io_detail

inline void write_features(io::Writer& w, const FeatureMatrix& f) {
    w.tag("LPSF");
    io::write_tensor(w, f.values);
    w.u8(f.norm_stats ? 1 : 0);
    if (f.norm_stats) io_detail::write_stats(w, *f.norm_stats);
}

inline FeatureMatrix read_features(io::Reader& r) {
    r.expect_tag("LPSF");
    FeatureMatrix f{io::read_tensor(r), std::nullopt};
    if (f.values.order() != 2) throw FormatError("feature record is not a matrix");
    if (r.u8() != 0) {
        f.norm_stats = io_detail::read_stats(r);
        if (f.norm_stats->bins() != f.bins()) throw FormatError("feature record stats do not match bin count");
    }
    return f;
}

inline void write_feature_stats(io::Writer& w, const FeatureStats& st) {
    io_detail::write_stats(w, st.input);
    io_detail::write_stats(w, st.target);
}

inline FeatureStats read_feature_stats(io::Reader& r) {
    FeatureStats st;
    st.input = io_detail::read_stats(r);
    st.target = io_detail::read_stats(r);
    return st;
}

inline void save_features(const std::string& path, const FeatureMatrix& f) {
    io::write_file(path, [&](io::Writer& w) { write_features(w, f); });
}
inline FeatureMatrix load_features(const std::string& path) {
    return io::read_file(path, [](io::Reader& r) { return read_features(r); });
}

} // namespace ttnet::audio
