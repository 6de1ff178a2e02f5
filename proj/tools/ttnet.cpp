// ttnet: decompose / simulate / train / enhance / evaluate / experiment
#include <ttnet/experiment_config.hpp>
#include <ttnet/serialize.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace ttnet;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) throw FormatError("failed writing '" + path.string() + "'");
}

void make_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw FormatError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// "32,64:32,64" or "32,64" for square factorizations
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> parse_modes(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() > 2) throw ValueError("--modes: expected 'in modes:out modes', got '" + text + "'");
    auto in = parse_size_list(parts[0], "--modes");
    auto out = parts.size() == 2 ? parse_size_list(parts[1], "--modes") : in;
    if (in.size() != out.size()) throw ValueError("--modes: input and output lists differ in length");
    return {in, out};
}

// Plain-text matrix: one row per line, values split by commas or blanks.
DenseTensor read_text_matrix(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open '" + path + "'");
    std::vector<double> values;
    std::size_t rows = 0, cols = 0;
    for (std::string line; std::getline(is, line);) {
        for (char& c : line) {
            if (c == ',' || c == ';') c = ' ';
        }
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (cols == 0) cols = tok.size();
        if (tok.size() != cols) throw FormatError(path + ": row " + std::to_string(rows + 1) + " has " + std::to_string(tok.size()) + " values, expected " + std::to_string(cols));
        for (const auto& t : tok) values.push_back(parse_double(t, path));
        ++rows;
    }
    if (rows == 0) throw FormatError(path + ": no matrix rows");
    return DenseTensor::matrix(rows, cols, std::move(values));
}

DenseTensor read_weights(const std::string& path) {
    const auto ext = fs::path(path).extension().string();
    DenseTensor w = (ext == ".txt" || ext == ".csv") ? read_text_matrix(path) : io::load_tensor(path);
    if (w.order() != 2) throw ShapeError("weights in '" + path + "' are not a matrix: " + shape_string(w.shape()));
    return w;
}

// ---- decompose ----

struct DecomposeArgs {
    std::string weights, random, modes, ranks, out;
    double tol = 0.0;
    std::uint64_t seed = 1;
};

int cmd_decompose(const DecomposeArgs& a) {
    DenseTensor w;
    if (!a.weights.empty()) {
        w = read_weights(a.weights);
    } else {
        const auto dims = split(a.random, 'x');
        if (dims.size() != 2) throw ValueError("--random wants ROWSxCOLS, got '" + a.random + "'");
        const std::size_t rows = parse_size(dims[0], "--random"), cols = parse_size(dims[1], "--random");
        if (rows == 0 || cols == 0) throw ValueError("--random: dimensions must be positive");
        std::mt19937_64 rng(a.seed);
        std::normal_distribution<double> nd;
        w = DenseTensor::matrix(rows, cols);
        for (double& v : w.data()) v = nd(rng);
    }
    const auto [in, out] = parse_modes(a.modes);
    ModeFactorization fact = ModeFactorization::full_rank(in, out);
    if (!a.ranks.empty() && a.ranks != "full") {
        const auto r = parse_size_list(a.ranks, "--ranks");
        if (r.size() == 1) fact = ModeFactorization::uniform(in, out, r[0]);
        else fact.ranks = r;
    }
    fact.validate();
    if (fact.input_dim() != w.rows() || fact.output_dim() != w.cols()) {
        throw ShapeError("modes " + shape_string(in) + ":" + shape_string(out) + " factor a " + std::to_string(fact.input_dim()) + " x " +
                         std::to_string(fact.output_dim()) + " matrix, weights are " + std::to_string(w.rows()) + " x " +
                         std::to_string(w.cols()));
    }
    const TTMatrix tt = tt_svd_decompose(w, fact, a.tol);
    const double err = relative_error(reconstruct(tt), w);
    const std::size_t tt_params = tt_param_count(tt);
    const std::size_t dense_params = w.rows() * w.cols();
    std::string report = "quantity,value\n";
    report += "rows," + std::to_string(w.rows()) + "\n";
    report += "cols," + std::to_string(w.cols()) + "\n";
    report += "input_modes," + join(tt.input_modes()) + "\n";
    report += "output_modes," + join(tt.output_modes()) + "\n";
    report += "ranks," + join(tt.ranks()) + "\n";
    report += "tt_param_count," + std::to_string(tt_params) + "\n";
    report += "dense_param_count," + std::to_string(dense_params) + "\n";
    report += "compression_ratio," + format_double(static_cast<double>(dense_params) / static_cast<double>(tt_params)) + "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", err);
    report += std::string("relative_error,") + buf + "\n";
    std::cout << report;
    if (!a.out.empty()) io::save_tt(a.out, tt);
    return 0;
}

// ---- simulate ----

struct ManifestEntry {
    std::string split, noisy, clean; // paths already resolved
    double snr_db = 0.0;
    std::optional<double> sinr_db;
};

struct Manifest {
    std::size_t channels = 1;
    std::vector<ManifestEntry> entries;

    std::vector<ManifestEntry> split(const std::string& name) const {
        std::vector<ManifestEntry> out;
        for (const auto& e : entries) {
            if (e.split == name) out.push_back(e);
        }
        return out;
    }
};

Manifest read_manifest(const std::string& path) {
    const KeyValueConfig cfg = KeyValueConfig::load(path);
    cfg.require_known(std::vector<std::string>{"seed", "channels", "sample_rate", "preset", "utterance"});
    Manifest m;
    m.channels = cfg.size("channels");
    for (const auto& e : cfg.all("utterance")) {
        const auto tok = split_ws(e.value);
        if (tok.size() != 5) throw FormatError(cfg.where(e.line) + "expected 'split noisy clean snr sinr'");
        ManifestEntry u{tok[0], resolve_path(cfg, tok[1]), resolve_path(cfg, tok[2]), parse_double(tok[3], "snr"), std::nullopt};
        if (tok[4] != "none") u.sinr_db = parse_double(tok[4], "sinr");
        m.entries.push_back(std::move(u));
    }
    if (m.entries.empty()) throw FormatError(path + ": manifest lists no utterances");
    return m;
}

KeyValueConfig load_experiment_file(const std::string& path) {
    KeyValueConfig cfg = KeyValueConfig::load(path);
    cfg.require_known(experiment_keys());
    return cfg;
}

struct SimulateArgs {
    std::string scene, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> channels;
};

int cmd_simulate(const SimulateArgs& a) {
    const KeyValueConfig cfg = load_experiment_file(a.scene);
    CorpusConfig cc = parse_corpus(cfg);
    if (a.seed) cc.seed = *a.seed;
    if (a.channels) cc.channels = *a.channels;
    cc.validate();
    make_dir(a.out + "/train");
    make_dir(a.out + "/test");

    std::string manifest = "# ttnet simulate manifest; utterance = split noisy clean snr_db sinr_db\n";
    manifest += "seed = " + std::to_string(cc.seed) + "\n";
    manifest += "channels = " + std::to_string(cc.channels) + "\n";
    for (const auto& p : audio::sinr_snr_presets) {
        manifest += "preset = " + format_double(p.sinr_db) + " " + format_double(p.snr_db) + "\n";
    }
    std::string lines;
    int rate = 0;
    std::mt19937_64 rng(cc.seed);
    const std::size_t total = cc.train_utterances + cc.test_utterances;
    for (std::size_t i = 0; i < total; ++i) {
        const audio::MixtureScene scene = corpus_utterance_scene(cc, i, rng);
        const audio::MultichannelMixture mix = audio::simulate_multichannel(scene);
        const std::string split_name = i < cc.train_utterances ? "train" : "test";
        char id[32];
        std::snprintf(id, sizeof id, "u%04zu", i);
        const std::string noisy = split_name + "/" + id + "_noisy.wav";
        const std::string clean = split_name + "/" + id + "_clean.wav";
        audio::write_wav(a.out + "/" + noisy, mix.noisy);
        audio::write_wav(a.out + "/" + clean, mix.clean_images[0]);
        rate = mix.noisy[0].sample_rate;
        lines += "utterance = " + split_name + " " + noisy + " " + clean + " " + format_double(scene.snr_db) + " " +
                    (scene.sinr_db ? format_double(*scene.sinr_db) : std::string("none")) + "\n";
    }
    manifest += "sample_rate = " + std::to_string(rate) + "\n" + lines;
    write_text(a.out + "/manifest.txt", manifest);
    std::cout << "wrote " << total << " utterances (" << cc.train_utterances << " train, " << cc.test_utterances << " test, "
              << cc.channels << " channels) to " << a.out << "\n";
    return 0;
}

// ---- train ----

std::vector<Utterance> load_utterances(const std::vector<ManifestEntry>& entries) {
    std::vector<Utterance> out;
    for (const auto& e : entries) {
        audio::MultichannelMixture mix{audio::read_wav(e.noisy), {audio::read_wav_mono(e.clean)}};
        if (mix.noisy[0].size() != mix.clean_images[0].size()) {
            throw ShapeError("'" + e.noisy + "' and '" + e.clean + "' differ in length");
        }
        Utterance u = make_utterance(std::move(mix), e.snr_db);
        u.sinr_db = e.sinr_db;
        out.push_back(std::move(u));
    }
    return out;
}

struct TrainArgs {
    std::string manifest, arch = "dense", ranks, modes, out;
    std::optional<std::size_t> context, channels, epochs, batch;
    std::optional<double> lr;
    std::optional<std::uint64_t> seed;
};

ArchSpec resolve_arch(const TrainArgs& a, const KeyValueConfig* file) {
    if (!file) {
        audio::FeatureConfig f{.context = a.context.value_or(2), .channels = a.channels.value_or(1), .bins = 64, .mode = audio::InputMode::dense};
        if (a.arch == "dense") {
            if (!a.ranks.empty() || !a.modes.empty()) throw ValueError("--ranks/--modes apply to TT architectures only");
            return dense_arch("dnn", f, 256, 3);
        }
        const auto modes = a.modes.empty() ? std::vector<std::size_t>{4, 64} : parse_size_list(a.modes, "--modes");
        if (a.ranks == "full") {
            ArchSpec s = tt_arch("ttn", f, 3, modes, 1);
            for (auto& l : s.layers) {
                if (l.kind == LayerSpec::Kind::tt) l.fact = max_rank_factorization(l.fact.input_modes, l.fact.output_modes);
            }
            return s;
        }
        return tt_arch("ttn", f, 3, modes, a.ranks.empty() ? 3 : parse_size(a.ranks, "--ranks"));
    }
    ArchSpec s = parse_arch(*file, false);
    if (!a.modes.empty()) throw ValueError("--modes applies to generated TT architectures; edit the layer lines instead");
    if (a.context) s.features.context = *a.context;
    if (a.channels) s.features.channels = *a.channels;
    if (!a.ranks.empty()) {
        for (auto& l : s.layers) {
            if (l.kind != LayerSpec::Kind::tt) continue;
            if (a.ranks == "full") l.fact = max_rank_factorization(l.fact.input_modes, l.fact.output_modes);
            else l.fact = ModeFactorization::uniform(l.fact.input_modes, l.fact.output_modes, parse_size(a.ranks, "--ranks"));
        }
    }
    return s;
}

int cmd_train(const TrainArgs& a) {
    std::optional<KeyValueConfig> file;
    if (a.arch != "dense" && a.arch != "tt") file = load_experiment_file(a.arch);
    const ArchSpec arch = resolve_arch(a, file ? &*file : nullptr);
    const std::size_t params = arch.validate();

    TrainConfig tc{.learning_rate = 0.0002, .batch_size = 32, .epochs = 50, .seed = 7};
    std::uint64_t init_seed = 11;
    if (file) {
        tc = parse_train(*file, tc);
        init_seed = file->size("init_seed", init_seed);
    }
    if (a.epochs) tc.epochs = *a.epochs;
    if (a.batch) tc.batch_size = *a.batch;
    if (a.lr) tc.learning_rate = *a.lr;
    if (a.seed) {
        init_seed = *a.seed;
        tc.seed = *a.seed + 1;
    }
    tc.validate();

    const Manifest m = read_manifest(a.manifest);
    if (m.channels < arch.features.channels) {
        throw ShapeError("architecture wants " + std::to_string(arch.features.channels) + " channels, manifest has " +
                         std::to_string(m.channels));
    }
    const auto train_set = load_utterances(m.split("train"));
    if (train_set.empty()) throw ValueError("manifest has no training utterances");
    const audio::FeatureStats stats = fit_corpus_stats(train_set);

    make_dir(a.out);
    std::cout << arch.name << ": " << params << " parameters, " << train_set.size() << " training utterances\n";
    std::string log;
    const TrainedModel tm = train_model(arch, train_set, stats, tc, init_seed, [&](std::size_t epoch, double loss) {
        log += std::to_string(epoch + 1) + " " + format_exact(loss) + "\n";
    });
    write_text(a.out + "/loss.log", log);
    write_text(a.out + "/arch.cfg", format_arch(arch));
    audio::save_model(a.out + "/model.bin", tm.model);
    std::cout << "zero-predictor loss " << format_exact(tm.zero_loss) << "\n";
    std::cout << "constant-predictor loss " << format_exact(tm.constant_loss) << "\n";
    std::cout << "final loss " << format_exact(tm.trace.epoch_loss.back()) << "\n";
    return 0;
}

// ---- enhance / evaluate ----

std::vector<audio::Waveform> model_inputs(const audio::EnhancementModel& model, std::vector<audio::Waveform> noisy, const std::string& path) {
    if (noisy.size() < model.features.channels) {
        throw ShapeError("'" + path + "' has " + std::to_string(noisy.size()) + " channels, model '" + model.name + "' wants " +
                         std::to_string(model.features.channels));
    }
    noisy.resize(model.features.channels);
    return noisy;
}

struct EnhanceArgs {
    std::string model, manifest, split = "test", out;
    std::vector<std::string> files;
};

int cmd_enhance(const EnhanceArgs& a) {
    const audio::EnhancementModel model = audio::load_model(a.model);
    std::vector<std::string> inputs = a.files;
    if (!a.manifest.empty()) {
        for (const auto& e : read_manifest(a.manifest).split(a.split)) inputs.push_back(e.noisy);
    }
    if (inputs.empty()) throw ValueError("nothing to enhance: give noisy WAV files or --manifest");
    make_dir(a.out);
    for (const auto& path : inputs) {
        const auto noisy = model_inputs(model, audio::read_wav(path), path);
        audio::write_wav(a.out + "/" + fs::path(path).filename().string(), audio::enhance(model, noisy));
    }
    std::cout << "enhanced " << inputs.size() << " file(s) with " << model.name << " into " << a.out << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string clean, enhanced, manifest, split = "test", model, name = "enhanced", out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    MetricRow row{a.name, 1, 0, 0.0, 0.0, 0.0};
    if (!a.model.empty()) {
        const audio::EnhancementModel m = audio::load_model(a.model);
        row.model = m.name;
        row.channels = m.features.channels;
        row.params = count_params(m.net);
    }
    std::vector<MetricRow> rows;
    if (!a.manifest.empty()) {
        const Manifest man = read_manifest(a.manifest);
        if (a.model.empty()) row.channels = man.channels;
        std::vector<audio::Waveform> est, noisy, ref;
        for (const auto& e : man.split(a.split)) {
            ref.push_back(audio::read_wav_mono(e.clean));
            noisy.push_back(audio::read_wav(e.noisy)[0]);
            est.push_back(audio::read_wav_mono(a.enhanced + "/" + fs::path(e.noisy).filename().string()));
        }
        if (ref.empty()) throw ValueError("manifest has no '" + a.split + "' utterances");
        const Scores base = score(noisy, ref);
        const Scores s = score(est, ref);
        rows.push_back({"noisy", man.channels, 0, base.si_sdr, base.seg_snr, 0.0});
        row.si_sdr = s.si_sdr;
        row.seg_snr = s.seg_snr;
        row.si_sdr_gain = s.si_sdr - base.si_sdr;
    } else {
        if (a.clean.empty()) throw ValueError("give --clean and --enhanced files, or --manifest with an --enhanced directory");
        const std::vector<audio::Waveform> est{audio::read_wav_mono(a.enhanced)};
        const std::vector<audio::Waveform> ref{audio::read_wav_mono(a.clean)};
        const Scores s = score(est, ref);
        row.si_sdr = s.si_sdr;
        row.seg_snr = s.seg_snr;
    }
    rows.push_back(row);
    const std::string table = metric_table(rows);
    std::cout << table;
    if (!a.out.empty()) write_text(a.out, table);
    return 0;
}

// ---- experiment ----

struct ExperimentArgs {
    std::string scene, out, channels, ranks, modes;
    std::optional<std::size_t> context, epochs, batch;
    std::optional<double> lr;
    std::optional<std::uint64_t> seed;
};

int cmd_experiment(const ExperimentArgs& a) {
    TradeoffConfig cfg;
    if (!a.scene.empty()) cfg = parse_tradeoff(load_experiment_file(a.scene));
    if (!a.channels.empty()) cfg.channel_counts = parse_size_list(a.channels, "--channels");
    if (!a.ranks.empty()) {
        const auto r = parse_size_list(a.ranks, "--ranks");
        if (r.size() != 2) throw ValueError("--ranks wants 'small,large' for the experiment");
        cfg.small_rank = r[0];
        cfg.large_rank = r[1];
    }
    if (!a.modes.empty()) cfg.hidden_modes = parse_size_list(a.modes, "--modes");
    if (a.context) cfg.context = *a.context;
    if (a.epochs) cfg.train.epochs = *a.epochs;
    if (a.batch) cfg.train.batch_size = *a.batch;
    if (a.lr) cfg.train.learning_rate = *a.lr;
    if (a.seed) {
        cfg.corpus.seed = *a.seed;
        cfg.init_seed = *a.seed + 10;
        cfg.train.seed = *a.seed + 6;
    }
    cfg.train.validate();
    for (std::size_t b : cfg.channel_counts) {
        for (const auto& arch : tradeoff_archs(cfg, b)) arch.validate();
    }
    make_dir(a.out);
    const TradeoffReport report = run_tradeoff(cfg, [](const std::string& line) { std::cout << line << std::endl; });

    std::vector<MetricRow> rows;
    std::string summary = "model,channels,params,dense_fraction,si_sdr_db,si_sdr_gain_db,gap_to_dense_db\n";
    for (const auto& n : report.noisy) {
        rows.push_back(n);
        double dense_sdr = 0.0;
        for (const auto& e : report.entries) {
            if (e.row.channels != n.channels) continue;
            if (e.arch.features.mode == audio::InputMode::dense) dense_sdr = e.row.si_sdr;
            rows.push_back(e.row);
            std::string log;
            for (std::size_t i = 0; i < e.loss.size(); ++i) log += std::to_string(i + 1) + " " + format_exact(e.loss[i]) + "\n";
            write_text(a.out + "/loss_" + e.row.model + ".log", log);
        }
        for (const auto& e : report.entries) {
            if (e.row.channels != n.channels) continue;
            summary += e.row.model + "," + std::to_string(e.row.channels) + "," + std::to_string(e.row.params) + "," +
                       format_double(e.dense_fraction) + "," + format_double(e.row.si_sdr) + "," + format_double(e.row.si_sdr_gain) +
                       "," + format_double(e.row.si_sdr - dense_sdr) + "\n";
        }
    }
    const std::string table = metric_table(rows);
    write_text(a.out + "/metrics.csv", table);
    write_text(a.out + "/summary.csv", summary);
    std::cout << table;
    return 0;
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor-train compressed speech enhancement networks"};
    app.require_subcommand(1);

    DecomposeArgs dec;
    auto* decompose = app.add_subcommand("decompose", "TT-SVD a weight matrix and report the compression");
    auto* src = decompose->add_option("--weights", dec.weights, "matrix file (tensor record, or .txt/.csv text)");
    decompose->add_option("--random", dec.random, "use a seeded Gaussian ROWSxCOLS matrix instead")->excludes(src);
    decompose->add_option("--modes", dec.modes, "input modes:output modes, e.g. 32,64:32,64")->required();
    decompose->add_option("--ranks", dec.ranks, "rank caps r0,...,rK, one uniform cap, or 'full'");
    decompose->add_option("--tol", dec.tol, "relative Frobenius tolerance");
    decompose->add_option("--seed", dec.seed, "seed for --random");
    decompose->add_option("--out", dec.out, "write the TT checkpoint here");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "render noisy/clean WAV pairs and a manifest");
    simulate->add_option("--scene", sim.scene, "experiment/scene file")->required();
    simulate->add_option("--out", sim.out, "output directory")->required();
    simulate->add_option("--seed", sim.seed, "corpus seed");
    simulate->add_option("--channels", sim.channels, "microphones B");

    TrainArgs tr;
    auto* trainc = app.add_subcommand("train", "train an enhancement model from a manifest");
    trainc->add_option("--manifest", tr.manifest, "manifest written by simulate")->required();
    trainc->add_option("--arch", tr.arch, "architecture file, or 'dense' / 'tt'");
    trainc->add_option("--ranks", tr.ranks, "uniform TT rank, or 'full'");
    trainc->add_option("--modes", tr.modes, "hidden modes of a generated TT arch (default 4,64)");
    trainc->add_option("--context", tr.context, "context frames M on each side");
    trainc->add_option("--channels", tr.channels, "channels B fed to the model");
    trainc->add_option("--epochs", tr.epochs, "epochs (default 50)");
    trainc->add_option("--batch", tr.batch, "mini-batch size (default 32)");
    trainc->add_option("--lr", tr.lr, "Adam learning rate (default 0.0002)");
    trainc->add_option("--seed", tr.seed, "initialisation / shuffling seed");
    trainc->add_option("--out", tr.out, "output directory")->required();

    EnhanceArgs en;
    auto* enhancec = app.add_subcommand("enhance", "enhance noisy WAV files with a trained model");
    enhancec->add_option("--model", en.model, "model checkpoint")->required();
    enhancec->add_option("--manifest", en.manifest, "enhance every noisy file of a manifest split");
    enhancec->add_option("--split", en.split, "manifest split (default test)");
    enhancec->add_option("--out", en.out, "output directory")->required();
    enhancec->add_option("files", en.files, "noisy WAV files (multi-channel)");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "score enhanced audio: SI-SDR and segmental SNR");
    evaluate->add_option("--clean", ev.clean, "clean reference WAV");
    evaluate->add_option("--enhanced", ev.enhanced, "enhanced WAV, or directory with --manifest")->required();
    evaluate->add_option("--manifest", ev.manifest, "pair enhanced files with this manifest's references");
    evaluate->add_option("--split", ev.split, "manifest split (default test)");
    evaluate->add_option("--model", ev.model, "model checkpoint, for the name / channels / params columns");
    evaluate->add_option("--name", ev.name, "row name when no model is given");
    evaluate->add_option("--out", ev.out, "also write the table to this file");

    ExperimentArgs ex;
    auto* experiment = app.add_subcommand("experiment", "dense vs TT trade-off run on a synthetic corpus");
    experiment->add_option("--scene", ex.scene, "experiment file overriding the built-in defaults");
    experiment->add_option("--out", ex.out, "output directory")->required();
    experiment->add_option("--channels", ex.channels, "channel counts, e.g. 1,2");
    experiment->add_option("--ranks", ex.ranks, "small,large TT ranks");
    experiment->add_option("--modes", ex.modes, "hidden modes, e.g. 4,64");
    experiment->add_option("--context", ex.context, "context frames M");
    experiment->add_option("--epochs", ex.epochs, "epochs");
    experiment->add_option("--batch", ex.batch, "mini-batch size");
    experiment->add_option("--lr", ex.lr, "Adam learning rate");
    experiment->add_option("--seed", ex.seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*decompose) return cmd_decompose(dec);
        if (*simulate) return cmd_simulate(sim);
        if (*trainc) return cmd_train(tr);
        if (*enhancec) return cmd_enhance(en);
        if (*evaluate) return cmd_evaluate(ev);
        if (*experiment) return cmd_experiment(ex);
    } catch (const std::exception& e) {
        std::cerr << "ttnet: error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 1;
}
