#include "test_support.hpp"

#include <ttnet/audio/enhance.hpp>
#include <ttnet/audio/mixing.hpp>
#include <ttnet/audio/synth.hpp>
#include <ttnet/metrics.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace ttnet;
using namespace ttnet::audio;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ttnet_audio_" + name)).string();
}

Waveform sine(double freq, std::size_t n, double amp = 0.5, int rate = 16000) {
    Waveform w{std::vector<double>(n), rate};
    for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
    return w;
}

Waveform white(std::size_t n, std::uint64_t seed) { return synthetic_noise(n, 16000, seed); }

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

} // namespace

TEST(Wav, SineRoundTripWithinOneLsb) {
    const Waveform w = sine(1000.0, 16000, 0.9);
    const std::string path = temp_path("sine.wav");
    write_wav(path, w);
    const auto back = read_wav(path);
    ASSERT_EQ(back.size(), 1u);
    ASSERT_EQ(back[0].size(), w.size());
    EXPECT_EQ(back[0].sample_rate, 16000);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(back[0].samples[i] - w.samples[i]));
    EXPECT_LE(worst, std::ldexp(1.0, -15));
}

TEST(Wav, ClampsOutOfRange) {
    Waveform w{{2.0, -3.0, 1.0, -1.0}, 16000};
    const auto back = parse_wav(encode_wav(std::span<const Waveform>(&w, 1)));
    EXPECT_EQ(back[0].samples[0], 32767.0 / 32768.0);
    EXPECT_EQ(back[0].samples[1], -1.0);
    EXPECT_EQ(back[0].samples[2], 32767.0 / 32768.0);
    EXPECT_EQ(back[0].samples[3], -1.0);
}

TEST(Wav, ZeroLengthFileIsMalformed) {
    const std::string path = temp_path("empty.wav");
    std::ofstream(path, std::ios::binary).close();
    EXPECT_THROW(read_wav(path), FormatError);
    EXPECT_THROW(read_wav(temp_path("does_not_exist.wav")), FormatError);
}

TEST(Wav, StereoGivesTwoEqualChannels) {
    std::vector<Waveform> ch{sine(440.0, 1000), sine(880.0, 1000, 0.25)};
    const std::string path = temp_path("stereo.wav");
    write_wav(path, ch);
    const auto back = read_wav(path);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].size(), back[1].size());
    EXPECT_NEAR(back[1].samples[10], ch[1].samples[10], 1.0 / 32768);
    EXPECT_THROW(read_wav_mono(path), FormatError);
}

TEST(Wav, RejectsOtherEncodings) {
    Waveform w = sine(440.0, 64);
    auto bytes = encode_wav(std::span<const Waveform>(&w, 1));
    auto eight_bit = bytes;
    eight_bit[34] = 8; // bits per sample
    EXPECT_THROW(parse_wav(eight_bit), FormatError);
    auto float_fmt = bytes;
    float_fmt[20] = 3; // IEEE float
    EXPECT_THROW(parse_wav(float_fmt), FormatError);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(parse_wav(bad_magic), FormatError);
}

TEST(Wav, SkipsUnknownChunks) {
    Waveform w = sine(440.0, 32);
    auto bytes = encode_wav(std::span<const Waveform>(&w, 1));
    // splice an odd-length LIST chunk (with pad byte) between fmt and data
    const std::vector<unsigned char> list{'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
    bytes.insert(bytes.begin() + 36, list.begin(), list.end());
    const auto back = parse_wav(bytes);
    ASSERT_EQ(back[0].size(), 32u);
    EXPECT_NEAR(back[0].samples[5], w.samples[5], 1.0 / 32768);
}

TEST(Stft, WhiteNoiseRoundTrip) {
    const Waveform w = white(16000, 11);
    const Spectrogram s = stft(w);
    EXPECT_EQ(s.bins, 257u);
    const Waveform back = istft(s);
    ASSERT_EQ(back.size(), w.size());
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        worst = std::max(worst, std::abs(back.samples[i] - w.samples[i]));
        peak = std::max(peak, std::abs(w.samples[i]));
    }
    EXPECT_LT(worst / peak, 1e-8);
}

TEST(Stft, OddLengthsRoundTrip) {
    for (std::size_t n : {512u, 513u, 777u, 4097u}) {
        const Waveform w = white(n, n);
        const Waveform back = istft(stft(w));
        ASSERT_EQ(back.size(), n);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(back.samples[i], w.samples[i], 1e-10);
    }
}

TEST(Stft, SineConcentratesAtBin32) {
    const Spectrogram s = stft(sine(1000.0, 16000));
    const std::size_t t = s.frames / 2;
    std::size_t best = 0;
    double total = 0.0;
    for (std::size_t f = 0; f < s.bins; ++f) {
        total += s.power(t, f);
        if (s.power(t, f) > s.power(t, best)) best = f;
    }
    EXPECT_EQ(best, 32u);
    // Hann main lobe is three bins wide
    const double lobe = s.power(t, 31) + s.power(t, 32) + s.power(t, 33);
    EXPECT_GT(lobe / total, 0.999);
}

TEST(Stft, ZeroSignalAndShortSignal) {
    const Spectrogram s = stft(Waveform{std::vector<double>(2048, 0.0), 16000});
    for (double v : s.values) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(stft(Waveform{std::vector<double>(511, 0.1), 16000}), ValueError);
}

TEST(Lps, FloorAndUnitMagnitude) {
    Spectrogram s = stft(Waveform{std::vector<double>(1024, 0.0), 16000});
    s.set(0, 3, {0.6, 0.8});
    const FeatureMatrix f = lps(s);
    EXPECT_NEAR(f.values(0, 3), 0.0, 1e-11);
    EXPECT_DOUBLE_EQ(f.values(1, 1), std::log(1e-12));
}

TEST(Lps, InvertRoundTrip) {
    const Spectrogram s = stft(white(8000, 12));
    const Spectrogram back = lps_invert(lps(s), s);
    double worst = 0.0;
    for (std::size_t t = 0; t < s.frames; ++t)
        for (std::size_t f = 0; f < s.bins; ++f) {
            const double mag = std::abs(s.at(t, f));
            if (mag < 1e-3) continue; // the floor perturbs tiny bins
            worst = std::max(worst, std::abs(back.at(t, f) - s.at(t, f)) / mag);
        }
    EXPECT_LT(worst, 1e-8);
}

TEST(Normalize, RoundTripAndMoments) {
    std::mt19937_64 rng(13);
    FeatureMatrix f{ttnet::testing::random_tensor({200, 257}, rng), std::nullopt};
    for (std::size_t t = 0; t < 200; ++t) {
        f.values(t, 7) = 4.25; // constant bin
        f.values(t, 9) = f.values(t, 9) * 30.0 - 12.0;
    }
    const FeatureMatrix n = normalize(f);
    ASSERT_TRUE(n.norm_stats.has_value());
    for (std::size_t k = 0; k < 257; ++k) {
        double mean = 0.0, var = 0.0;
        for (std::size_t t = 0; t < 200; ++t) mean += n.values(t, k);
        mean /= 200;
        for (std::size_t t = 0; t < 200; ++t) var += (n.values(t, k) - mean) * (n.values(t, k) - mean);
        EXPECT_LT(std::abs(mean), 1e-10);
        if (k != 7) {
            EXPECT_NEAR(var / 200, 1.0, 1e-10);
        }
    }
    for (std::size_t t = 0; t < 200; ++t) EXPECT_EQ(n.values(t, 7), 0.0);
    const FeatureMatrix back = denormalize(n);
    EXPECT_LT(frobenius_distance(back.values, f.values), 1e-10);
    EXPECT_THROW(normalize(n), ValueError);
    EXPECT_THROW(denormalize(f), ValueError);
}

TEST(MixAtSnr, EqualEnergiesGiveUnitGain) {
    Waveform c{{1.0, 0.0, 0.0, 0.0}, 16000};
    Waveform n{{0.0, 1.0, 0.0, 0.0}, 16000};
    const Mixture m = mix_components(c, n, 0.0);
    EXPECT_EQ(m.scaled_noise.samples, n.samples);
    EXPECT_EQ(m.mix.samples, (std::vector<double>{1.0, 1.0, 0.0, 0.0}));
}

TEST(MixAtSnr, HighSnrApproachesClean) {
    const Waveform c = sine(300.0, 4000);
    const Waveform out = mix_at_snr(c, white(1000, 14), 100.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) diff += (out.samples[i] - c.samples[i]) * (out.samples[i] - c.samples[i]);
    EXPECT_LT(std::sqrt(diff / energy(c.samples)), 1e-4);
}

TEST(MixAtSnr, MeasuredSnrMatches) {
    const Waveform c = synthetic_speech({}, 15);
    const Waveform n = white(5000, 16); // shorter, gets looped
    for (double target : {-5.0, 0.0, 5.0, 12.5, 30.0}) {
        const Mixture m = mix_components(c, n, target);
        std::vector<double> noise(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) noise[i] = m.mix.samples[i] - c.samples[i];
        EXPECT_NEAR(snr_db(c.samples, noise), target, 1e-9);
    }
    EXPECT_THROW(mix_at_snr(Waveform{std::vector<double>(100, 0.0), 16000}, n, 5.0), ValueError);
}

TEST(Simulate, DegenerateSceneEqualsMixAtSnr) {
    MixtureScene scene;
    scene.clean = synthetic_speech({.duration_s = 0.5}, 17);
    scene.noise = white(3000, 18);
    scene.snr_db = 5.0;
    const auto mc = simulate_multichannel(scene);
    ASSERT_EQ(mc.noisy.size(), 1u);
    EXPECT_EQ(mc.noisy[0].samples, mix_at_snr(scene.clean, scene.noise, 5.0).samples);
    EXPECT_EQ(mc.clean_images[0].samples, scene.clean.samples);
}

TEST(Simulate, DelayShowsInCrossCorrelation) {
    MixtureScene scene;
    scene.clean = white(4000, 19);
    scene.noise = white(4000, 20);
    scene.channels = 2;
    scene.delays = {0, 8};
    const auto mc = simulate_multichannel(scene);
    const auto& a = mc.clean_images[0].samples;
    const auto& b = mc.clean_images[1].samples;
    int best_lag = 0;
    double best = -1e300;
    for (int lag = -20; lag <= 20; ++lag) {
        double c = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto j = static_cast<std::ptrdiff_t>(i) + lag;
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(b.size())) c += a[i] * b[static_cast<std::size_t>(j)];
        }
        if (c > best) {
            best = c;
            best_lag = lag;
        }
    }
    EXPECT_EQ(best_lag, 8);
    // channel noises are different realisations
    EXPECT_NE(mc.noisy[0].samples[100] - a[100], (mc.noisy[1].samples[108] - b[108]));
}

TEST(Simulate, GainScalingLeavesSnrUnchanged) {
    MixtureScene scene;
    scene.clean = synthetic_speech({.duration_s = 0.5}, 21);
    scene.noise = white(8000, 22);
    scene.channels = 3;
    scene.delays = {0, 3, 5};
    scene.gains = {1.0, 0.7, 0.4};
    scene.snr_db = 7.0;
    auto measure = [](const MultichannelMixture& m, std::size_t b) {
        std::vector<double> n(m.noisy[b].size());
        for (std::size_t i = 0; i < n.size(); ++i) n[i] = m.noisy[b].samples[i] - m.clean_images[b].samples[i];
        return snr_db(m.clean_images[b].samples, n);
    };
    const auto base = simulate_multichannel(scene);
    scene.gains = {2.0, 1.4, 0.8};
    const auto doubled = simulate_multichannel(scene);
    for (std::size_t b = 0; b < 3; ++b) {
        EXPECT_NEAR(measure(base, b), 7.0, 1e-9);
        EXPECT_NEAR(measure(doubled, b), measure(base, b), 1e-9);
    }
}

TEST(Simulate, InterfererHitsRequestedSinr) {
    MixtureScene scene;
    scene.clean = synthetic_speech({.duration_s = 0.5}, 23);
    scene.noise = white(8000, 24);
    scene.interferer = synthetic_speech({.duration_s = 0.5}, 25);
    scene.snr_db = 15.0;
    scene.sinr_db = 5.0;
    const auto mc = simulate_multichannel(scene);
    std::vector<double> rest(scene.clean.size());
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = mc.noisy[0].samples[i] - mc.clean_images[0].samples[i];
    EXPECT_NEAR(snr_db(mc.clean_images[0].samples, rest), 5.0, 0.5); // cross terms of I and N are not controlled
}

TEST(Simulate, PresetPairs) {
    ASSERT_EQ(sinr_snr_presets.size(), 4u);
    const std::vector<std::pair<double, double>> expected{{5, 10}, {5, 15}, {10, 15}, {15, 20}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(sinr_snr_presets[i].sinr_db, expected[i].first);
        EXPECT_EQ(sinr_snr_presets[i].snr_db, expected[i].second);
    }
}

TEST(Simulate, RejectsBadScenes) {
    MixtureScene scene;
    scene.clean = white(100, 26);
    scene.noise = white(100, 27);
    scene.channels = 2;
    scene.delays = {0, 101};
    EXPECT_THROW(simulate_multichannel(scene), ValueError);
    scene.delays = {0, 1};
    scene.gains = {1.0, 0.0};
    EXPECT_THROW(simulate_multichannel(scene), ValueError);
    scene.gains.clear();
    scene.channels = 0;
    scene.delays.clear();
    EXPECT_THROW(simulate_multichannel(scene), ValueError);
}

namespace {

FeatureStats unit_stats() {
    NormStats st{std::vector<double>(257, 0.0), std::vector<double>(257, 1.0)};
    return {st, st};
}

FeatureMatrix random_lps(std::size_t frames, std::mt19937_64& rng) {
    return FeatureMatrix{ttnet::testing::random_tensor({frames, 257}, rng), std::nullopt};
}

} // namespace

TEST(BuildDataset, RowWidths) {
    std::mt19937_64 rng(28);
    const FeatureMatrix f = random_lps(6, rng);
    const std::vector<FeatureMatrix> one{f};
    const RegressionDataset d0 = build_dataset(one, &f, {.context = 0, .channels = 1, .bins = 256, .mode = InputMode::dense}, unit_stats());
    EXPECT_EQ(d0.inputs.cols(), 257u);
    EXPECT_EQ(d0.inputs, f.values); // unit stats, one frame per row
    EXPECT_EQ(d0.targets, f.values);
    const RegressionDataset d5 = build_dataset(one, &f, {.context = 5, .channels = 1}, unit_stats());
    EXPECT_EQ(d5.inputs.cols(), 2827u);

    std::vector<FeatureMatrix> eight;
    for (int b = 0; b < 8; ++b) eight.push_back(random_lps(6, rng));
    const FeatureConfig tt{.context = 5, .channels = 8, .bins = 256, .mode = InputMode::tt};
    const std::vector<std::size_t> modes{88, 16, 16};
    const RegressionDataset d8 = build_dataset(eight, &eight[0], tt, unit_stats(), modes);
    EXPECT_EQ(d8.inputs.cols(), 22528u);
    EXPECT_EQ(shape_product(*d8.input_modes), 22528u);
    EXPECT_EQ(d8.targets.cols(), 256u);
    EXPECT_THROW(build_dataset(eight, nullptr, tt, unit_stats(), std::vector<std::size_t>{88, 16, 15}), ShapeError);
}

TEST(BuildDataset, LayoutAndEdgeReplication) {
    std::mt19937_64 rng(29);
    std::vector<FeatureMatrix> ch{random_lps(4, rng), random_lps(4, rng)};
    const FeatureConfig cfg{.context = 1, .channels = 2, .bins = 8, .mode = InputMode::tt};
    const RegressionDataset d = build_dataset(ch, nullptr, cfg, unit_stats());
    ASSERT_EQ(d.inputs.cols(), 8u * 3 * 2);
    EXPECT_FALSE(d.has_targets);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t o = 0; o < 3; ++o)
                for (std::size_t k = 0; k < 8; ++k) {
                    const std::size_t src = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t + o) - 1, 0, 3);
                    ASSERT_EQ(d.inputs(t, (b * 3 + o) * 8 + k), ch[b].values(src, k + 1));
                }
    ASSERT_EQ(d.dc_channel.size(), 4u);
    for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(d.dc_channel[t], ch[0].values(t, 0));
}

TEST(BuildDataset, RejectsMismatchedChannels) {
    std::mt19937_64 rng(30);
    std::vector<FeatureMatrix> ch{random_lps(4, rng), random_lps(5, rng)};
    EXPECT_THROW(build_dataset(ch, nullptr, {.context = 0, .channels = 2}, unit_stats()), ShapeError);
    EXPECT_THROW(build_dataset(std::span(ch).first(1), nullptr, {.context = 0, .channels = 2}, unit_stats()), ShapeError);
}

namespace {

struct NoisyUtterance {
    Waveform clean;
    Waveform noisy;
};

NoisyUtterance utterance(std::uint64_t seed, double snr = 5.0) {
    NoisyUtterance u;
    u.clean = synthetic_speech({.duration_s = 1.0}, seed);
    u.noisy = mix_at_snr(u.clean, synthetic_noise(16000, 16000, seed + 1000, 2000.0), snr);
    return u;
}

FeatureStats stats_of(const NoisyUtterance& u) {
    return {fit_norm_stats(lps(stft(u.noisy))), fit_norm_stats(lps(stft(u.clean)))};
}

} // namespace

TEST(Enhance, OracleCleanMagnitudeIsPhaseLimited) {
    const NoisyUtterance u = utterance(31);
    const Spectrogram noisy = stft(u.noisy);
    const Waveform oracle = synthesize(lps(stft(u.clean)), noisy);
    const double before = metrics::si_sdr(u.noisy, u.clean);
    const double after = metrics::si_sdr(oracle, u.clean);
    EXPECT_NEAR(before, 5.0, 0.5);
    EXPECT_GT(after, 8.0);
}

TEST(Enhance, FloorOutputNetGivesNearSilence) {
    const NoisyUtterance u = utterance(32);
    EnhancementModel m;
    m.features = {.context = 1, .channels = 1, .bins = 256, .mode = InputMode::dense};
    m.stats = stats_of(u);
    DenseLayer layer{DenseTensor::matrix(m.features.input_dim(), 257), DenseTensor::matrix(1, 257)};
    for (std::size_t k = 0; k < 257; ++k) {
        (*layer.bias)(0, k) = (std::log(lps_epsilon) - m.stats.target.mean[k]) / m.stats.target.stddev[k];
    }
    m.net = Network({layer});
    const Waveform out = enhance(m, std::span(&u.noisy, 1));
    ASSERT_EQ(out.size(), u.clean.size());
    double peak = 0.0;
    for (double v : out.samples) peak = std::max(peak, std::abs(v));
    EXPECT_LT(peak, 1e-4);
    EXPECT_LT(metrics::si_sdr(out, u.clean), -5.0);
}

TEST(Enhance, TtAndDenseEquivalentModelsAgree) {
    const NoisyUtterance u = utterance(33);
    const FeatureConfig cfg{.context = 1, .channels = 1, .bins = 16, .mode = InputMode::tt};
    const ModeFactorization fact{{3, 4, 4}, {2, 2, 4}, {1, 4, 4, 1}};
    ASSERT_EQ(fact.input_dim(), cfg.input_dim());
    EnhancementModel tt_model;
    tt_model.features = cfg;
    tt_model.stats = stats_of(u);
    tt_model.input_modes = fact.input_modes;
    TTLayer tl = make_tt_layer(fact, 34);
    tt_model.net = Network({tl});

    EnhancementModel dense_model = tt_model;
    dense_model.input_modes.reset();
    dense_model.net = Network({DenseLayer{reconstruct(tl.tt), tl.bias}});

    const auto a = enhance_features(tt_model, std::span(&u.noisy, 1));
    const auto b = enhance_features(dense_model, std::span(&u.noisy, 1));
    EXPECT_LT(frobenius_distance(a.enhanced_lps.values, b.enhanced_lps.values), 1e-6);
    const Waveform wa = synthesize(a.enhanced_lps, a.spectra[0]);
    const Waveform wb = synthesize(b.enhanced_lps, b.spectra[0]);
    for (std::size_t i = 0; i < wa.size(); ++i) ASSERT_NEAR(wa.samples[i], wb.samples[i], 1e-6);

    // DC passthrough and untouched high band are bit exact
    for (std::size_t t = 0; t < a.enhanced_lps.frames(); ++t) {
        EXPECT_EQ(a.enhanced_lps.values(t, 0), a.noisy_lps[0].values(t, 0));
        EXPECT_EQ(a.enhanced_lps.values(t, 100), a.noisy_lps[0].values(t, 100));
    }
}

TEST(Enhance, GeometryMismatchThrows) {
    const NoisyUtterance u = utterance(35);
    EnhancementModel m;
    m.features = {.context = 0, .channels = 1, .bins = 8, .mode = InputMode::dense};
    m.stats = stats_of(u);
    std::mt19937_64 rng(36);
    m.net = Network({make_dense_layer(10, 9, rng)});
    EXPECT_THROW(enhance(m, std::span(&u.noisy, 1)), ShapeError);
    m.net = Network({make_dense_layer(9, 9, rng)});
    const std::vector<Waveform> two{u.noisy, u.noisy};
    EXPECT_THROW(enhance(m, two), ShapeError);
    EXPECT_NO_THROW(enhance(m, std::span(&u.noisy, 1)));
}

TEST(Enhance, CheckpointRoundTripIsExact) {
    const NoisyUtterance u = utterance(37);
    EnhancementModel m;
    m.name = "tiny";
    m.features = {.context = 2, .channels = 1, .bins = 16, .mode = InputMode::tt};
    m.stats = stats_of(u);
    m.high_band = HighBand::zero;
    m.input_modes = std::vector<std::size_t>{5, 4, 4};
    m.net = Network({make_tt_layer({{5, 4, 4}, {4, 2, 4}, {1, 3, 3, 1}}, 38), ActivationLayer{}, make_tt_layer({{4, 2, 4}, {2, 2, 4}, {1, 2, 2, 1}}, 39)});
    const std::string path = temp_path("model.bin");
    save_model(path, m);
    const EnhancementModel back = load_model(path);
    EXPECT_EQ(back.name, "tiny");
    EXPECT_EQ(back.features, m.features);
    EXPECT_EQ(back.stats, m.stats);
    EXPECT_EQ(back.high_band, HighBand::zero);
    EXPECT_EQ(enhance(back, std::span(&u.noisy, 1)).samples, enhance(m, std::span(&u.noisy, 1)).samples);
    // high band silenced
    const auto tr = enhance_features(m, std::span(&u.noisy, 1));
    EXPECT_EQ(tr.enhanced_lps.values(3, 200), std::log(lps_epsilon));
}

TEST(Features, CacheRoundTrip) {
    const NoisyUtterance u = utterance(40);
    const FeatureMatrix f = normalize(lps(stft(u.noisy)));
    const std::string path = temp_path("features.bin");
    save_features(path, f);
    const FeatureMatrix back = load_features(path);
    EXPECT_EQ(back.values, f.values);
    EXPECT_EQ(back.norm_stats, f.norm_stats);
    // byte-identical on re-save
    const std::string again = temp_path("features2.bin");
    save_features(again, back);
    EXPECT_EQ(slurp(path), slurp(again));
}

TEST(Synth, DeterministicAndBandLimited) {
    const Waveform a = synthetic_speech({}, 41);
    const Waveform b = synthetic_speech({}, 41);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, synthetic_speech({}, 42).samples);
    const Spectrogram s = stft(a);
    double low = 0.0, high = 0.0;
    for (std::size_t t = 0; t < s.frames; ++t)
        for (std::size_t f = 0; f < s.bins; ++f) (f <= 64 ? low : high) += s.power(t, f);
    EXPECT_GT(low / (low + high), 0.999);
}
