#pragma once

#include <ttnet/audio/enhance.hpp>
#include <ttnet/audio/mixing.hpp>
#include <ttnet/audio/synth.hpp>
#include <ttnet/kv_config.hpp>
#include <ttnet/metrics.hpp>

#include <cstdio>
#include <functional>

namespace ttnet {

// ---- architecture descriptions ----

struct LayerSpec {
    enum class Kind { dense, tt, relu, identity };
    Kind kind = Kind::relu;
    std::size_t units = 0;  // dense
    bool bias = true;       // dense
    ModeFactorization fact; // tt
};

struct ArchSpec {
    std::string name = "model";
    audio::FeatureConfig features;
    audio::HighBand high_band = audio::HighBand::passthrough;
    std::vector<LayerSpec> layers;

    // Input modes of the leading TT layer, recorded with the dataset.
    std::optional<std::vector<std::size_t>> input_modes() const {
        if (!layers.empty() && layers.front().kind == LayerSpec::Kind::tt) return layers.front().fact.input_modes;
        return std::nullopt;
    }

    // Checks the layer chain against the feature geometry and returns the parameter count.
    std::size_t validate() const {
        features.validate();
        if (layers.empty()) throw ValueError("architecture '" + name + "' has no layers");
        std::size_t width = features.input_dim();
        std::size_t params = 0;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& l = layers[i];
            const std::string where = "architecture '" + name + "' layer " + std::to_string(i + 1) + ": ";
            if (l.kind == LayerSpec::Kind::dense) {
                if (l.units < 1) throw ValueError(where + "dense layer needs a positive width");
                params += width * l.units + (l.bias ? l.units : 0);
                width = l.units;
            } else if (l.kind == LayerSpec::Kind::tt) {
                l.fact.validate();
                if (l.fact.has_unlimited_rank()) throw ValueError(where + "trainable TT layers need explicit ranks");
                if (l.fact.input_dim() != width) {
                    throw ShapeError(where + "TT input modes " + shape_string(l.fact.input_modes) + " multiply to " +
                                     std::to_string(l.fact.input_dim()) + ", expected " + std::to_string(width));
                }
                params += tt_param_count(l.fact) + l.fact.output_dim();
                width = l.fact.output_dim();
            }
        }
        if (width != features.target_dim()) {
            throw ShapeError("architecture '" + name + "' ends with width " + std::to_string(width) + ", targets have " +
                             std::to_string(features.target_dim()));
        }
        return params;
    }

    std::size_t param_count() const { return validate(); }

    Network build(std::uint64_t seed) const {
        validate();
        std::mt19937_64 master(seed);
        std::vector<Layer> out;
        std::size_t width = features.input_dim();
        for (const auto& l : layers) {
            const std::uint64_t layer_seed = master();
            switch (l.kind) {
            case LayerSpec::Kind::dense: {
                std::mt19937_64 rng(layer_seed);
                out.emplace_back(make_dense_layer(width, l.units, rng, l.bias));
                width = l.units;
                break;
            }
            case LayerSpec::Kind::tt:
                out.emplace_back(make_tt_layer(l.fact, layer_seed));
                width = l.fact.output_dim();
                break;
            case LayerSpec::Kind::relu:
                out.emplace_back(ActivationLayer{ActivationKind::relu});
                break;
            case LayerSpec::Kind::identity:
                out.emplace_back(ActivationLayer{ActivationKind::identity});
                break;
            }
        }
        return Network(std::move(out));
    }
};

// Largest useful bond ranks: no bond can carry more than either side of the unfolding.
inline ModeFactorization max_rank_factorization(std::vector<std::size_t> in, std::vector<std::size_t> out) {
    if (in.size() != out.size() || in.empty()) throw ValueError("input and output mode lists differ in length");
    ModeFactorization f = ModeFactorization::full_rank(std::move(in), std::move(out));
    const std::size_t k = f.order();
    for (std::size_t b = 1; b < k; ++b) {
        std::size_t left = 1, right = 1;
        for (std::size_t i = 0; i < b; ++i) left *= f.input_modes[i] * f.output_modes[i];
        for (std::size_t i = b; i < k; ++i) right *= f.input_modes[i] * f.output_modes[i];
        f.ranks[b] = std::min(left, right);
    }
    f.validate();
    return f;
}

// "dense 256", "dense 64 nobias", "tt 5,8,8 4,8,8 1,8,8,1" (or one rank for every bond, or "full"), "relu", "identity"
inline LayerSpec parse_layer(std::string_view text) {
    const auto tok = split_ws(text);
    if (tok.empty()) throw ValueError("empty layer description");
    LayerSpec l;
    if (tok[0] == "relu" || tok[0] == "identity") {
        if (tok.size() != 1) throw ValueError("activation layers take no arguments: '" + std::string(text) + "'");
        l.kind = tok[0] == "relu" ? LayerSpec::Kind::relu : LayerSpec::Kind::identity;
    } else if (tok[0] == "dense") {
        if (tok.size() < 2 || tok.size() > 3 || (tok.size() == 3 && tok[2] != "nobias")) {
            throw ValueError("expected 'dense <units> [nobias]', got '" + std::string(text) + "'");
        }
        l.kind = LayerSpec::Kind::dense;
        l.units = parse_size(tok[1], "dense width");
        l.bias = tok.size() == 2;
    } else if (tok[0] == "tt") {
        if (tok.size() != 4) throw ValueError("expected 'tt <in modes> <out modes> <ranks>', got '" + std::string(text) + "'");
        l.kind = LayerSpec::Kind::tt;
        l.fact.input_modes = parse_size_list(tok[1], "tt input modes");
        l.fact.output_modes = parse_size_list(tok[2], "tt output modes");
        if (tok[3] == "full") {
            l.fact = max_rank_factorization(l.fact.input_modes, l.fact.output_modes);
            return l;
        }
        auto ranks = parse_size_list(tok[3], "tt ranks");
        if (ranks.size() == 1) {
            l.fact = ModeFactorization::uniform(l.fact.input_modes, l.fact.output_modes, ranks[0]);
        } else {
            l.fact.ranks = std::move(ranks);
        }
        l.fact.validate();
    } else {
        throw ValueError("unknown layer kind '" + tok[0] + "'");
    }
    return l;
}

inline audio::InputMode parse_mode(std::string_view s) {
    if (s == "dense") return audio::InputMode::dense;
    if (s == "tt") return audio::InputMode::tt;
    throw ValueError("mode must be 'dense' or 'tt', got '" + std::string(s) + "'");
}

inline audio::HighBand parse_high_band(std::string_view s) {
    if (s == "passthrough") return audio::HighBand::passthrough;
    if (s == "zero") return audio::HighBand::zero;
    throw ValueError("high_band must be 'passthrough' or 'zero', got '" + std::string(s) + "'");
}

inline const std::vector<std::string> arch_keys{"name", "mode", "bins", "context", "channels", "high_band", "layer"};

// strict: reject keys that are not architecture keys (off when the file also carries other sections).
inline ArchSpec parse_arch(const KeyValueConfig& cfg, bool strict = true) {
    if (strict) cfg.require_known(arch_keys);
    ArchSpec a;
    a.name = cfg.get("name", "model");
    a.features.mode = parse_mode(cfg.get("mode", "dense"));
    a.features.bins = cfg.size("bins", 256);
    a.features.context = cfg.size("context", 5);
    a.features.channels = cfg.size("channels", 1);
    a.high_band = parse_high_band(cfg.get("high_band", "passthrough"));
    for (const auto& e : cfg.all("layer")) {
        try {
            a.layers.push_back(parse_layer(e.value));
        } catch (const std::invalid_argument& ex) {
            throw ValueError(cfg.where(e.line) + ex.what());
        }
    }
    a.validate();
    return a;
}

inline std::string format_arch(const ArchSpec& a) {
    auto join = [](const std::vector<std::size_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    std::string out = "name = " + a.name + "\n";
    out += std::string("mode = ") + (a.features.mode == audio::InputMode::dense ? "dense" : "tt") + "\n";
    out += "bins = " + std::to_string(a.features.bins) + "\n";
    out += "context = " + std::to_string(a.features.context) + "\n";
    out += "channels = " + std::to_string(a.features.channels) + "\n";
    out += std::string("high_band = ") + (a.high_band == audio::HighBand::passthrough ? "passthrough" : "zero") + "\n";
    for (const auto& l : a.layers) {
        switch (l.kind) {
        case LayerSpec::Kind::dense: out += "layer = dense " + std::to_string(l.units) + (l.bias ? "" : " nobias") + "\n"; break;
        case LayerSpec::Kind::tt:
            out += "layer = tt " + join(l.fact.input_modes) + " " + join(l.fact.output_modes) + " " + join(l.fact.ranks) + "\n";
            break;
        case LayerSpec::Kind::relu: out += "layer = relu\n"; break;
        case LayerSpec::Kind::identity: out += "layer = identity\n"; break;
        }
    }
    return out;
}

// Dense baseline: `depth` ReLU layers of `width`, linear output.
inline ArchSpec dense_arch(std::string name, audio::FeatureConfig features, std::size_t width, std::size_t depth) {
    features.mode = audio::InputMode::dense;
    ArchSpec a{std::move(name), features, audio::HighBand::passthrough, {}};
    for (std::size_t i = 0; i < depth; ++i) {
        a.layers.push_back({LayerSpec::Kind::dense, width, true, {}});
        a.layers.push_back({LayerSpec::Kind::relu, 0, true, {}});
    }
    a.layers.push_back({LayerSpec::Kind::dense, features.target_dim(), true, {}});
    return a;
}

// TT counterpart: every weight matrix in TT form. hidden_modes factor the hidden width; its tail also
// factors the frame width (F'), and the leading input mode absorbs channels x window.
inline ArchSpec tt_arch(std::string name, audio::FeatureConfig features, std::size_t depth, std::vector<std::size_t> hidden_modes,
                        std::size_t rank) {
    features.mode = audio::InputMode::tt;
    if (hidden_modes.size() < 2) throw ValueError("tt_arch: hidden modes need at least two factors");
    const std::vector<std::size_t> bin_modes(hidden_modes.begin() + 1, hidden_modes.end());
    if (shape_product(bin_modes) != features.frame_width()) {
        throw ValueError("tt_arch: hidden modes after the first must multiply to the frame width " +
                         std::to_string(features.frame_width()));
    }
    ArchSpec a{std::move(name), features, audio::HighBand::passthrough, {}};
    std::vector<std::size_t> in{features.channels * features.window()};
    in.insert(in.end(), bin_modes.begin(), bin_modes.end());
    std::vector<std::size_t> out_modes{1};
    out_modes.insert(out_modes.end(), bin_modes.begin(), bin_modes.end());
    for (std::size_t i = 0; i < depth; ++i) {
        a.layers.push_back({LayerSpec::Kind::tt, 0, true, ModeFactorization::uniform(i == 0 ? in : hidden_modes, hidden_modes, rank)});
        a.layers.push_back({LayerSpec::Kind::relu, 0, true, {}});
    }
    a.layers.push_back({LayerSpec::Kind::tt, 0, true, ModeFactorization::uniform(hidden_modes, out_modes, rank)});
    return a;
}

// ---- corpus ----

struct CorpusConfig {
    std::size_t train_utterances = 32;
    std::size_t test_utterances = 8;
    double duration_s = 2.0;
    std::size_t channels = 1;
    std::vector<std::size_t> delays{}; // empty: 0, 3, 6, ... samples
    std::vector<double> gains{};       // empty: 1, 0.9, 0.8, ...
    double train_snr_min = 0.0;
    double train_snr_max = 10.0;
    double test_snr = 5.0;
    double band_hz = 1900.0;   // speech harmonics and noise both live below this
    std::uint64_t seed = 1;

    // Recorded material. Empty lists fall back to synthetic speech / noise. Train and test clean
    // lists are used round-robin and must both be given so the two sets never share an utterance.
    std::vector<audio::Waveform> train_clean{}, test_clean{}, noise{};
    // Competing talker at the SINR/SNR presets (cycled per utterance); synthetic unless a recording is set.
    bool interference = false;
    std::optional<audio::Waveform> interferer{};

    void validate() const {
        if (train_utterances + test_utterances == 0) throw ValueError("corpus needs at least one utterance");
        if (channels < 1) throw ValueError("corpus needs at least one channel");
        if (!(duration_s > 0.0)) throw ValueError("utterance duration must be positive");
        if (train_clean.empty() != test_clean.empty()) throw ValueError("give both train and test clean recordings, or neither");
        if (!(train_snr_min <= train_snr_max)) throw ValueError("train SNR range is reversed");
        if (interferer && !interference) throw ValueError("an interferer recording needs interference enabled");
    }
};

struct Utterance {
    std::vector<audio::Waveform> noisy;
    audio::Waveform clean; // reference-channel speech image
    double snr_db = 0.0;
    std::optional<double> sinr_db;
    std::vector<audio::FeatureMatrix> noisy_lps;
    audio::FeatureMatrix clean_lps;
};

struct Corpus {
    std::vector<Utterance> train;
    std::vector<Utterance> test;
};

inline audio::MixtureScene corpus_scene(const CorpusConfig& cfg, audio::Waveform clean, audio::Waveform noise, double snr) {
    audio::MixtureScene scene;
    scene.clean = std::move(clean);
    scene.noise = std::move(noise);
    scene.snr_db = snr;
    scene.channels = cfg.channels;
    if (!cfg.delays.empty()) {
        scene.delays = cfg.delays;
    } else {
        for (std::size_t b = 0; b < cfg.channels; ++b) scene.delays.push_back(3 * b);
    }
    if (!cfg.gains.empty()) {
        scene.gains = cfg.gains;
    } else {
        for (std::size_t b = 0; b < cfg.channels; ++b) scene.gains.push_back(1.0 - 0.1 * static_cast<double>(b % 8));
    }
    return scene;
}

inline Utterance make_utterance(audio::MultichannelMixture mix, double snr) {
    Utterance u;
    u.snr_db = snr;
    u.noisy = std::move(mix.noisy);
    u.clean = std::move(mix.clean_images[0]);
    for (const auto& w : u.noisy) u.noisy_lps.push_back(audio::lps(audio::stft(w)));
    u.clean_lps = audio::lps(audio::stft(u.clean));
    return u;
}

// Scene for utterance i; train and test draw from disjoint seeds (and disjoint recordings when given).
inline audio::MixtureScene corpus_utterance_scene(const CorpusConfig& cfg, std::size_t i, std::mt19937_64& rng) {
    const std::uint64_t utt_seed = rng();
    const bool is_train = i < cfg.train_utterances;
    std::uniform_real_distribution<double> snr_draw(cfg.train_snr_min, cfg.train_snr_max);
    const double drawn = snr_draw(rng);
    const std::size_t k = is_train ? i : i - cfg.train_utterances;

    audio::Waveform clean;
    if (!cfg.train_clean.empty()) {
        const auto& pool = is_train ? cfg.train_clean : cfg.test_clean;
        clean = pool[k % pool.size()];
    } else {
        clean = audio::synthetic_speech({.duration_s = cfg.duration_s, .max_frequency = cfg.band_hz}, utt_seed);
    }
    audio::Waveform noise;
    if (!cfg.noise.empty()) {
        const auto& src = cfg.noise[i % cfg.noise.size()];
        noise = audio::fit_length(src, clean.size(), static_cast<std::size_t>(utt_seed % src.size()));
    } else {
        noise = audio::synthetic_noise(clean.size(), clean.sample_rate, utt_seed ^ 0xA5A5A5A5u, cfg.band_hz);
    }

    double level = is_train ? drawn : cfg.test_snr;
    std::optional<double> sinr;
    if (cfg.interference) {
        const auto& preset = audio::sinr_snr_presets[i % audio::sinr_snr_presets.size()];
        level = preset.snr_db;
        sinr = preset.sinr_db;
    }
    audio::MixtureScene scene = corpus_scene(cfg, std::move(clean), std::move(noise), level);
    scene.seed = utt_seed;
    if (cfg.interference) {
        const audio::Waveform talker =
            cfg.interferer ? *cfg.interferer
                           : audio::synthetic_speech({.duration_s = cfg.duration_s, .max_frequency = cfg.band_hz}, utt_seed ^ 0x5A5A5A5Au);
        scene.interferer = audio::fit_length(talker, scene.clean.size(), static_cast<std::size_t>((utt_seed >> 17) % talker.size()));
        scene.sinr_db = sinr;
    }
    return scene;
}

inline Corpus make_corpus(const CorpusConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    Corpus c;
    for (std::size_t i = 0; i < cfg.train_utterances + cfg.test_utterances; ++i) {
        const audio::MixtureScene scene = corpus_utterance_scene(cfg, i, rng);
        Utterance u = make_utterance(audio::simulate_multichannel(scene), scene.snr_db);
        u.sinr_db = scene.sinr_db;
        (i < cfg.train_utterances ? c.train : c.test).push_back(std::move(u));
    }
    return c;
}

// ---- training and evaluation ----

// Targets share the noisy-input stats: a bin the noise leaves alone then maps to itself, which
// the nets pick up far more easily than a separately standardised clean target.
inline audio::FeatureStats fit_corpus_stats(const std::vector<Utterance>& train) {
    std::vector<const audio::FeatureMatrix*> noisy;
    for (const auto& u : train) {
        for (const auto& f : u.noisy_lps) noisy.push_back(&f);
    }
    const audio::NormStats st = audio::fit_norm_stats(noisy);
    return {st, st};
}

inline audio::RegressionDataset corpus_dataset(const std::vector<Utterance>& utts, const audio::FeatureConfig& features,
                                               const audio::FeatureStats& stats,
                                               const std::optional<std::vector<std::size_t>>& modes) {
    std::vector<audio::RegressionDataset> parts;
    for (const auto& u : utts) {
        if (u.noisy_lps.size() < features.channels) throw ShapeError("corpus has fewer channels than the architecture");
        const std::span<const audio::FeatureMatrix> chans(u.noisy_lps.data(), features.channels);
        parts.push_back(audio::build_dataset(chans, &u.clean_lps, features, stats, modes));
    }
    return audio::concatenate(parts);
}

struct TrainedModel {
    audio::EnhancementModel model;
    TrainResult trace;
    double zero_loss = 0.0;     // MSE of always predicting 0 (the noisy-input mean)
    double constant_loss = 0.0; // MSE of the best constant: each output's training mean
};

inline TrainedModel train_model(const ArchSpec& arch, const std::vector<Utterance>& train_set, const audio::FeatureStats& stats,
                                const TrainConfig& cfg, std::uint64_t init_seed, const EpochCallback& on_epoch = {}) {
    const audio::RegressionDataset ds = corpus_dataset(train_set, arch.features, stats, arch.input_modes());
    TrainedModel out;
    out.model.name = arch.name;
    out.model.features = arch.features;
    out.model.stats = stats;
    out.model.high_band = arch.high_band;
    out.model.input_modes = arch.input_modes();
    out.model.net = arch.build(init_seed);
    out.zero_loss = mse_loss(DenseTensor(ds.targets.shape()), ds.targets);
    DenseTensor mean_pred(ds.targets.shape());
    as_matrix(mean_pred).rowwise() = as_matrix(ds.targets).colwise().mean();
    out.constant_loss = mse_loss(mean_pred, ds.targets);
    out.trace = train(out.model.net, ds.inputs, ds.targets, cfg, on_epoch);
    return out;
}

struct MetricRow {
    std::string model;
    std::size_t channels = 1;
    std::size_t params = 0;
    double si_sdr = 0.0;
    double seg_snr = 0.0;
    double si_sdr_gain = 0.0; // over the noisy reference channel
};

struct Scores {
    double si_sdr = 0.0;
    double seg_snr = 0.0;
};

inline Scores score(std::span<const audio::Waveform> estimates, std::span<const audio::Waveform> references) {
    if (estimates.size() != references.size() || estimates.empty()) throw ShapeError("score: need matching, non-empty lists");
    Scores s;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        s.si_sdr += metrics::si_sdr(estimates[i], references[i]);
        s.seg_snr += metrics::segmental_snr(estimates[i], references[i]);
    }
    s.si_sdr /= static_cast<double>(estimates.size());
    s.seg_snr /= static_cast<double>(estimates.size());
    return s;
}

inline Scores noisy_scores(const std::vector<Utterance>& test) {
    std::vector<audio::Waveform> est, ref;
    for (const auto& u : test) {
        est.push_back(u.noisy[0]);
        ref.push_back(u.clean);
    }
    return score(est, ref);
}

inline Scores model_scores(const audio::EnhancementModel& m, const std::vector<Utterance>& test) {
    std::vector<audio::Waveform> est, ref;
    for (const auto& u : test) {
        est.push_back(audio::enhance(m, std::span(u.noisy.data(), m.features.channels)));
        ref.push_back(u.clean);
    }
    return score(est, ref);
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Round-trips a double exactly; used for loss logs.
inline std::string format_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Delimited metric table, one row per model.
inline std::string metric_table(const std::vector<MetricRow>& rows) {
    std::string out = "model,channels,params,si_sdr_db,seg_snr_db,si_sdr_gain_db\n";
    for (const auto& r : rows) {
        out += r.model + "," + std::to_string(r.channels) + "," + std::to_string(r.params) + "," + format_double(r.si_sdr) + "," +
               format_double(r.seg_snr) + "," + format_double(r.si_sdr_gain) + "\n";
    }
    return out;
}

// ---- the dense vs TT trade-off run ----

struct TradeoffConfig {
    // 256 x 2 s of training audio: with 128 the dense baseline overfits and stays under +3 dB.
    CorpusConfig corpus{.train_utterances = 256, .test_utterances = 16};
    std::vector<std::size_t> channel_counts{1, 2};
    std::size_t bins = 64;
    std::size_t context = 2;
    std::size_t dense_width = 256;
    std::size_t depth = 3;
    // hidden 256 = 4 x 64: one small core mixes channels/context, one 64 x 64 core mixes bins
    std::vector<std::size_t> hidden_modes{4, 64};
    std::size_t small_rank = 3;
    std::size_t large_rank = 5;
    TrainConfig train{.learning_rate = 0.0002, .batch_size = 32, .epochs = 50, .seed = 7};
    std::uint64_t init_seed = 11;
};

struct TradeoffEntry {
    ArchSpec arch;
    MetricRow row;
    std::vector<double> loss;
    double dense_fraction = 1.0; // params relative to the dense model of the same channel count
};

struct TradeoffReport {
    std::vector<TradeoffEntry> entries; // per channel count: dense, ttn-small, ttn-large
    std::vector<MetricRow> noisy;       // per channel count, the unprocessed reference channel

    std::vector<MetricRow> rows() const {
        std::vector<MetricRow> out;
        for (const auto& e : entries) out.push_back(e.row);
        return out;
    }
};

inline std::vector<ArchSpec> tradeoff_archs(const TradeoffConfig& cfg, std::size_t channels) {
    audio::FeatureConfig f{.context = cfg.context, .channels = channels, .bins = cfg.bins, .mode = audio::InputMode::dense};
    const std::string suffix = "-b" + std::to_string(channels);
    return {dense_arch("dnn" + suffix, f, cfg.dense_width, cfg.depth),
            tt_arch("ttn-r" + std::to_string(cfg.small_rank) + suffix, f, cfg.depth, cfg.hidden_modes, cfg.small_rank),
            tt_arch("ttn-r" + std::to_string(cfg.large_rank) + suffix, f, cfg.depth, cfg.hidden_modes, cfg.large_rank)};
}

using ProgressFn = std::function<void(const std::string&)>;

inline TradeoffReport run_tradeoff(const TradeoffConfig& cfg, const ProgressFn& progress = {}) {
    TradeoffReport report;
    for (std::size_t channels : cfg.channel_counts) {
        CorpusConfig cc = cfg.corpus;
        cc.channels = channels;
        const Corpus corpus = make_corpus(cc);
        const audio::FeatureStats stats = fit_corpus_stats(corpus.train);
        const Scores base = noisy_scores(corpus.test);
        report.noisy.push_back({"noisy-b" + std::to_string(channels), channels, 0, base.si_sdr, base.seg_snr, 0.0});

        const auto archs = tradeoff_archs(cfg, channels);
        const double dense_params = static_cast<double>(archs[0].param_count());
        for (const auto& arch : archs) {
            TrainedModel tm = train_model(arch, corpus.train, stats, cfg.train, cfg.init_seed);
            const Scores s = model_scores(tm.model, corpus.test);
            TradeoffEntry e{arch, {arch.name, channels, count_params(tm.model.net), s.si_sdr, s.seg_snr, s.si_sdr - base.si_sdr},
                            tm.trace.epoch_loss, 0.0};
            e.dense_fraction = static_cast<double>(e.row.params) / dense_params;
            if (progress) {
                progress(arch.name + ": params " + std::to_string(e.row.params) + ", final loss " +
                         format_double(e.loss.back()) + ", SI-SDR " + format_double(s.si_sdr) + " dB (noisy " +
                         format_double(base.si_sdr) + ")");
            }
            report.entries.push_back(std::move(e));
        }
    }
    return report;
}

} // namespace ttnet
