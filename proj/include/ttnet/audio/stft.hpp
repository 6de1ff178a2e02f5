#pragma once

#include <ttnet/audio/wav.hpp>

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

namespace ttnet::audio {

inline constexpr std::size_t frame_length = 512;
inline constexpr std::size_t hop_length = 256;
inline constexpr std::size_t num_bins = frame_length / 2 + 1;

enum class WindowKind : std::uint8_t { hann_periodic };

inline std::vector<double> hann_periodic(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    return w;
}

// T x F complex values, interleaved (re, im). Frame t is centred on sample t * hop of the original signal.
struct Spectrogram {
    std::size_t frames = 0;
    std::size_t bins = num_bins;
    std::size_t frame_len = frame_length;
    std::size_t hop = hop_length;
    WindowKind window = WindowKind::hann_periodic;
    std::size_t signal_length = 0;
    int sample_rate = 16000;
    std::vector<double> values;

    std::complex<double> at(std::size_t t, std::size_t f) const {
        const std::size_t i = 2 * (t * bins + f);
        return {values[i], values[i + 1]};
    }
    void set(std::size_t t, std::size_t f, std::complex<double> v) {
        const std::size_t i = 2 * (t * bins + f);
        values[i] = v.real();
        values[i + 1] = v.imag();
    }
    double power(std::size_t t, std::size_t f) const {
        const std::size_t i = 2 * (t * bins + f);
        return values[i] * values[i] + values[i + 1] * values[i + 1];
    }
};

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// Real <-> half-spectrum transforms of one fixed length. FFTW's planner is not thread-safe, so plans are
// built per call site; FFTW_ESTIMATE keeps planning cheap and the transform deterministic.
class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          time_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          freq_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        const int len = static_cast<int>(n);
        forward_.reset(fftw_plan_dft_r2c_1d(len, time_.get(), freq_.get(), FFTW_ESTIMATE));
        inverse_.reset(fftw_plan_dft_c2r_1d(len, freq_.get(), time_.get(), FFTW_ESTIMATE));
        if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed");
    }

    double* time() { return time_.get(); }
    fftw_complex* freq() { return freq_.get(); }
    void forward() { fftw_execute(forward_.get()); }
    // unnormalised: the result is n times the inverse DFT; clobbers freq()
    void inverse() { fftw_execute(inverse_.get()); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::unique_ptr<double, FftwFree> time_;
    std::unique_ptr<fftw_complex, FftwFree> freq_;
    std::unique_ptr<fftw_plan_s, PlanDeleter> forward_;
    std::unique_ptr<fftw_plan_s, PlanDeleter> inverse_;
};

} // namespace detail

// Frames needed so that every original sample lies under two windows once the signal is padded by
// frame_len/2 on both sides.
inline std::size_t stft_frame_count(std::size_t length) { return (length + hop_length - 1) / hop_length + 1; }

inline Spectrogram stft(const Waveform& w) {
    validate(w);
    if (w.size() < frame_length) {
        throw ValueError("stft: signal of " + std::to_string(w.size()) + " samples is shorter than one frame (" +
                         std::to_string(frame_length) + ")");
    }
    const std::size_t pad = frame_length / 2;
    Spectrogram s;
    s.signal_length = w.size();
    s.sample_rate = w.sample_rate;
    s.frames = stft_frame_count(w.size());
    s.values.assign(2 * s.frames * s.bins, 0.0);

    const auto window = hann_periodic(frame_length);
    detail::RealFft fft(frame_length);
    for (std::size_t t = 0; t < s.frames; ++t) {
        for (std::size_t n = 0; n < frame_length; ++n) {
            const std::size_t q = t * hop_length + n; // index into the padded signal
            const bool inside = q >= pad && q - pad < w.size();
            fft.time()[n] = inside ? window[n] * w.samples[q - pad] : 0.0;
        }
        fft.forward();
        for (std::size_t f = 0; f < s.bins; ++f) s.set(t, f, {fft.freq()[f][0], fft.freq()[f][1]});
    }
    return s;
}

// Weighted overlap-add with the analysis window, divided by the summed squared window (least squares
// inverse). Exact wherever the window sum is non-zero, which covers the whole original signal.
inline Waveform istft(const Spectrogram& s) {
    if (s.frame_len != frame_length || s.hop != hop_length || s.bins != num_bins) {
        throw ShapeError("istft: unsupported spectrogram geometry");
    }
    if (s.frames == 0 || s.values.size() != 2 * s.frames * s.bins) throw ShapeError("istft: spectrogram is empty or torn");
    const std::size_t pad = frame_length / 2;
    const std::size_t padded = (s.frames - 1) * hop_length + frame_length;
    if (s.signal_length + 2 * pad > padded) throw ShapeError("istft: too few frames for the recorded signal length");

    const auto window = hann_periodic(frame_length);
    std::vector<double> acc(padded, 0.0), wsum(padded, 0.0);
    detail::RealFft fft(frame_length);
    const double scale = 1.0 / static_cast<double>(frame_length);
    for (std::size_t t = 0; t < s.frames; ++t) {
        for (std::size_t f = 0; f < s.bins; ++f) {
            const auto v = s.at(t, f);
            fft.freq()[f][0] = v.real();
            fft.freq()[f][1] = v.imag();
        }
        fft.inverse();
        for (std::size_t n = 0; n < frame_length; ++n) {
            acc[t * hop_length + n] += window[n] * fft.time()[n] * scale;
            wsum[t * hop_length + n] += window[n] * window[n];
        }
    }
    Waveform out;
    out.sample_rate = s.sample_rate;
    out.samples.resize(s.signal_length);
    for (std::size_t i = 0; i < s.signal_length; ++i) {
        const double ws = wsum[i + pad];
        out.samples[i] = ws > 1e-10 ? acc[i + pad] / ws : 0.0;
    }
    return out;
}

} // namespace ttnet::audio
