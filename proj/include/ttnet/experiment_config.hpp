#pragma once

#include <ttnet/audio/wav.hpp>
#include <ttnet/experiment.hpp>

#include <filesystem>

namespace ttnet {

// Keys of the shared experiment file. One file may carry all sections; each command reads its part.
inline const std::vector<std::string> corpus_keys{"train_utterances", "test_utterances", "duration", "channels",
                                                  "delays", "gains", "train_snr", "test_snr", "band_hz", "seed",
                                                  "train_clean", "test_clean", "noise", "interference", "interferer"};
inline const std::vector<std::string> train_keys{"epochs", "batch", "lr", "train_seed", "init_seed"};
inline const std::vector<std::string> tradeoff_keys{"channel_counts", "bins", "context", "dense_width", "depth",
                                                    "hidden_modes", "small_rank", "large_rank"};

inline std::vector<std::string> experiment_keys() {
    std::vector<std::string> all;
    for (const auto* set : {&corpus_keys, &train_keys, &tradeoff_keys, &arch_keys}) all.insert(all.end(), set->begin(), set->end());
    return all;
}

inline bool parse_bool(std::string_view s, std::string_view what) {
    if (s == "yes" || s == "true" || s == "on" || s == "1") return true;
    if (s == "no" || s == "false" || s == "off" || s == "0") return false;
    throw ValueError(std::string(what) + ": expected yes/no, got '" + std::string(s) + "'");
}

// Relative paths in a config file are taken from the file's directory.
inline std::string resolve_path(const KeyValueConfig& cfg, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || cfg.source().empty() || cfg.source().front() == '<') return path;
    return (std::filesystem::path(cfg.source()).parent_path() / p).string();
}

inline std::vector<audio::Waveform> load_wav_list(const KeyValueConfig& cfg, std::string_view key) {
    std::vector<audio::Waveform> out;
    for (const auto& e : cfg.all(key)) {
        try {
            out.push_back(audio::read_wav_mono(resolve_path(cfg, e.value)));
        } catch (const std::exception& ex) {
            throw FormatError(cfg.where(e.line) + ex.what());
        }
    }
    return out;
}

// Starts from `base` so callers keep their own defaults for keys the file leaves out.
inline CorpusConfig parse_corpus(const KeyValueConfig& cfg, CorpusConfig base = {}) {
    CorpusConfig c = std::move(base);
    c.train_utterances = cfg.size("train_utterances", c.train_utterances);
    c.test_utterances = cfg.size("test_utterances", c.test_utterances);
    c.duration_s = cfg.number("duration", c.duration_s);
    c.channels = cfg.size("channels", c.channels);
    if (cfg.has("delays")) c.delays = cfg.sizes("delays");
    if (cfg.has("gains")) c.gains = cfg.numbers("gains");
    if (cfg.has("train_snr")) {
        const auto r = cfg.numbers("train_snr");
        if (r.size() != 2) throw ValueError(cfg.source() + ": train_snr wants 'min, max'");
        c.train_snr_min = r[0];
        c.train_snr_max = r[1];
    }
    c.test_snr = cfg.number("test_snr", c.test_snr);
    c.band_hz = cfg.number("band_hz", c.band_hz);
    c.seed = cfg.size("seed", c.seed);
    c.train_clean = load_wav_list(cfg, "train_clean");
    c.test_clean = load_wav_list(cfg, "test_clean");
    c.noise = load_wav_list(cfg, "noise");
    c.interference = parse_bool(cfg.get("interference", "no"), "interference");
    if (cfg.has("interferer")) {
        auto w = load_wav_list(cfg, "interferer");
        c.interferer = std::move(w.back());
        c.interference = true;
    }
    c.validate();
    return c;
}

inline TrainConfig parse_train(const KeyValueConfig& cfg, TrainConfig base = {}) {
    TrainConfig t = base;
    t.epochs = cfg.size("epochs", t.epochs);
    t.batch_size = cfg.size("batch", t.batch_size);
    t.learning_rate = cfg.number("lr", t.learning_rate);
    t.seed = cfg.size("train_seed", t.seed);
    t.validate();
    return t;
}

inline TradeoffConfig parse_tradeoff(const KeyValueConfig& cfg) {
    TradeoffConfig t;
    t.corpus = parse_corpus(cfg, t.corpus);
    t.train = parse_train(cfg, t.train);
    t.init_seed = cfg.size("init_seed", t.init_seed);
    if (cfg.has("channel_counts")) t.channel_counts = cfg.sizes("channel_counts");
    t.bins = cfg.size("bins", t.bins);
    t.context = cfg.size("context", t.context);
    t.dense_width = cfg.size("dense_width", t.dense_width);
    t.depth = cfg.size("depth", t.depth);
    if (cfg.has("hidden_modes")) t.hidden_modes = cfg.sizes("hidden_modes");
    t.small_rank = cfg.size("small_rank", t.small_rank);
    t.large_rank = cfg.size("large_rank", t.large_rank);
    return t;
}

} // namespace ttnet
