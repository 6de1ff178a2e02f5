#pragma once

#include <ttnet/linalg.hpp>
#include <ttnet/tt_matrix.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <variant>

namespace ttnet {

enum class ActivationKind { relu, identity };

// y = x W + b with W stored [in x out].
struct DenseLayer {
    DenseTensor weights;
    std::optional<DenseTensor> bias;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

// y = x W + b with W held as a TT-matrix; the bias stays dense.
struct TTLayer {
    TTMatrix tt;
    DenseTensor bias;

    std::size_t in_dim() const { return tt.input_dim(); }
    std::size_t out_dim() const { return tt.output_dim(); }
};

struct ActivationLayer {
    ActivationKind kind = ActivationKind::relu;
};

using Layer = std::variant<DenseLayer, TTLayer, ActivationLayer>;

inline DenseLayer make_dense_layer(std::size_t in, std::size_t out, std::mt19937_64& rng, bool with_bias = true) {
    DenseLayer layer{DenseTensor::matrix(in, out), std::nullopt};
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(in)));
    for (double& v : layer.weights.data()) v = dist(rng);
    if (with_bias) layer.bias = DenseTensor(Shape{out});
    return layer;
}

inline TTLayer make_tt_layer(const ModeFactorization& fact, std::uint64_t seed) {
    TTMatrix tt = tt_random_init(fact, seed);
    const std::size_t out = tt.output_dim();
    return TTLayer{std::move(tt), DenseTensor(Shape{out})};
}

class Network {
public:
    Network() = default;

    explicit Network(std::vector<Layer> layers) : layers_(std::move(layers)) { validate(); }

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    // Structural edits invalidate outstanding forward caches.
    std::vector<Layer>& mutable_layers() {
        ++generation_;
        return layers_;
    }
    void revalidate() { validate(); }

    std::uint64_t generation() const noexcept { return generation_; }

    // Trainable parameters in a fixed order: per layer, dense weights then bias, or TT cores then bias.
    std::vector<std::span<double>> parameters() {
        ++generation_;
        std::vector<std::span<double>> out;
        for (auto& layer : layers_) {
            if (auto* d = std::get_if<DenseLayer>(&layer)) {
                out.push_back(d->weights.data());
                if (d->bias) out.push_back(d->bias->data());
            } else if (auto* t = std::get_if<TTLayer>(&layer)) {
                for (std::size_t k = 0; k < t->tt.order(); ++k) out.push_back(t->tt.core_data(k));
                out.push_back(t->bias.data());
            }
        }
        return out;
    }

    std::vector<Shape> parameter_shapes() const {
        std::vector<Shape> out;
        for (const auto& layer : layers_) {
            if (const auto* d = std::get_if<DenseLayer>(&layer)) {
                out.push_back(d->weights.shape());
                if (d->bias) out.push_back(d->bias->shape());
            } else if (const auto* t = std::get_if<TTLayer>(&layer)) {
                for (const auto& c : t->tt.cores()) out.push_back(c.shape());
                out.push_back(t->bias.shape());
            }
        }
        return out;
    }

private:
    void validate() {
        std::optional<std::size_t> width;
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const auto& layer = layers_[i];
            std::size_t in = 0;
            std::size_t out = 0;
            if (const auto* d = std::get_if<DenseLayer>(&layer)) {
                if (d->weights.order() != 2) throw ShapeError("dense layer weights must be a matrix");
                in = d->in_dim();
                out = d->out_dim();
                if (d->bias && d->bias->size() != out) throw ShapeError("dense bias length must equal output width");
            } else if (const auto* t = std::get_if<TTLayer>(&layer)) {
                in = t->in_dim();
                out = t->out_dim();
                if (t->bias.size() != out) throw ShapeError("TT bias length must equal prod(output modes)");
            } else {
                continue;
            }
            if (width && *width != in) {
                throw ShapeError("layer " + std::to_string(i) + " expects width " + std::to_string(in) +
                                 " but receives " + std::to_string(*width));
            }
            if (!first) first = in;
            width = out;
        }
        if (!first) throw ValueError("network needs at least one dense or TT layer");
        input_dim_ = *first;
        output_dim_ = *width;
    }

    std::vector<Layer> layers_;
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::uint64_t generation_ = 0;
};

inline std::size_t count_params(const Network& net) {
    std::size_t total = 0;
    for (const auto& shape : net.parameter_shapes()) total += shape_product(shape);
    return total;
}

struct ForwardCache {
    const Network* network = nullptr;
    std::uint64_t generation = 0;
    std::vector<DenseTensor> inputs;                 // input of each layer
    std::vector<std::optional<TTApplyCache>> tt;     // per layer, TT layers only
    DenseTensor output;
};

namespace detail {

inline void add_bias(DenseTensor& y, const DenseTensor& bias) {
    as_matrix(y).rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.data().data(), static_cast<Eigen::Index>(bias.size()));
}

inline DenseTensor apply_activation(ActivationKind kind, DenseTensor x) {
    if (kind == ActivationKind::relu) {
        for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
    }
    return x;
}

template <typename Visitor>
DenseTensor run_layer(const Layer& layer, const DenseTensor& x, Visitor&& on_tt) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
        DenseTensor y = matmul(x, d->weights);
        if (d->bias) add_bias(y, *d->bias);
        return y;
    }
    if (const auto* t = std::get_if<TTLayer>(&layer)) {
        DenseTensor y = tt_apply(t->tt, x, on_tt());
        add_bias(y, t->bias);
        return y;
    }
    return apply_activation(std::get<ActivationLayer>(layer).kind, x);
}

inline void column_sums(const DenseTensor& g, DenseTensor& out) {
    Eigen::Map<Eigen::RowVectorXd>(out.data().data(), static_cast<Eigen::Index>(out.size())).noalias() =
        as_matrix(g).colwise().sum();
}

} // namespace detail

inline void check_batch(const Network& net, const DenseTensor& batch) {
    if (batch.order() != 2 || batch.cols() != net.input_dim()) {
        throw ShapeError("batch " + shape_string(batch.shape()) + " does not match network input width " +
                         std::to_string(net.input_dim()));
    }
}

inline ForwardCache forward(const Network& net, const DenseTensor& batch) {
    check_batch(net, batch);
    ForwardCache cache;
    cache.network = &net;
    cache.generation = net.generation();
    cache.tt.resize(net.layers().size());
    DenseTensor x = batch;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const Layer& layer = net.layers()[i];
        DenseTensor y = detail::run_layer(layer, x, [&]() -> TTApplyCache* {
            cache.tt[i].emplace();
            return &*cache.tt[i];
        });
        cache.inputs.push_back(std::move(x));
        x = std::move(y);
    }
    cache.output = std::move(x);
    return cache;
}

// Forward pass without keeping intermediates.
// Inference only. Rows are pushed through in fixed-size chunks to bound the TT intermediates.
inline DenseTensor predict(const Network& net, const DenseTensor& batch, std::size_t chunk = 256) {
    check_batch(net, batch);
    auto run = [&](DenseTensor x) {
        for (const auto& layer : net.layers()) x = detail::run_layer(layer, x, []() -> TTApplyCache* { return nullptr; });
        return x;
    };
    if (batch.rows() <= chunk) return run(batch);
    DenseTensor out = DenseTensor::matrix(batch.rows(), net.output_dim());
    for (std::size_t start = 0; start < batch.rows(); start += chunk) {
        const std::size_t count = std::min(chunk, batch.rows() - start);
        const auto src = batch.data().subspan(start * batch.cols(), count * batch.cols());
        const DenseTensor y = run(DenseTensor(Shape{count, batch.cols()}, std::vector<double>(src.begin(), src.end())));
        std::copy(y.data().begin(), y.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(start * out.cols()));
    }
    return out;
}

// Mean over all entries of the squared difference.
inline double mse_loss(const DenseTensor& pred, const DenseTensor& target) {
    if (pred.shape() != target.shape()) {
        throw ShapeError("mse_loss: shapes " + shape_string(pred.shape()) + " and " + shape_string(target.shape()) +
                         " differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

inline DenseTensor mse_gradient(const DenseTensor& pred, const DenseTensor& target) {
    if (pred.shape() != target.shape()) throw ShapeError("mse_gradient: shape mismatch");
    DenseTensor g(pred.shape());
    const double scale = 2.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
    return g;
}

struct Gradients {
    std::vector<DenseTensor> params; // aligned with Network::parameters()
    DenseTensor input;
};

// With input_grad false the first dense layer skips its input product and Gradients::input stays empty.
inline Gradients backward(const Network& net, const ForwardCache& cache, const DenseTensor& output_grad,
                          bool input_grad = true) {
    if (cache.network != &net || cache.inputs.size() != net.layers().size()) {
        throw ValueError("backward: forward cache is missing or belongs to another network");
    }
    if (cache.generation != net.generation()) throw ValueError("backward: forward cache is stale");
    if (output_grad.shape() != cache.output.shape()) throw ShapeError("backward: output gradient shape mismatch");

    std::vector<std::vector<DenseTensor>> per_layer(net.layers().size());
    DenseTensor g = output_grad;
    for (std::size_t i = net.layers().size(); i-- > 0;) {
        const Layer& layer = net.layers()[i];
        const DenseTensor& x = cache.inputs[i];
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            per_layer[i].push_back(matmul(x, g, Op::transpose));
            if (d->bias) {
                DenseTensor db(Shape{d->out_dim()});
                detail::column_sums(g, db);
                per_layer[i].push_back(std::move(db));
            }
            if (i > 0 || input_grad) g = matmul(g, d->weights, Op::none, Op::transpose);
            else g = DenseTensor::matrix(1, 1);
        } else if (const auto* t = std::get_if<TTLayer>(&layer)) {
            if (!cache.tt[i]) throw ValueError("backward: TT cache missing");
            TTApplyGradients tg = tt_apply_backward(t->tt, *cache.tt[i], g);
            DenseTensor db(Shape{t->out_dim()});
            detail::column_sums(g, db);
            for (auto& c : tg.cores) per_layer[i].push_back(std::move(c));
            per_layer[i].push_back(std::move(db));
            g = std::move(tg.input);
        } else if (std::get<ActivationLayer>(layer).kind == ActivationKind::relu) {
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (!(x[k] > 0.0)) g[k] = 0.0;
            }
        }
    }
    Gradients out;
    for (auto& grads : per_layer) {
        for (auto& t : grads) out.params.push_back(std::move(t));
    }
    if (input_grad) out.input = std::move(g);
    return out;
}

struct AdamState {
    double learning_rate = 0.0002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<AlignedVector> first_moment;
    std::vector<AlignedVector> second_moment;
};

inline AdamState make_adam_state(const Network& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                                 double epsilon = 1e-8) {
    if (!(learning_rate > 0.0)) throw ValueError("learning rate must be positive");
    AdamState s{learning_rate, beta1, beta2, epsilon, 0, {}, {}};
    for (const auto& shape : net.parameter_shapes()) {
        s.first_moment.emplace_back(shape_product(shape), 0.0);
        s.second_moment.emplace_back(shape_product(shape), 0.0);
    }
    return s;
}

// Bias-corrected Adam update, in place.
inline void adam_step(std::span<const std::span<double>> params, std::span<const DenseTensor> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw ShapeError("adam_step: parameter, gradient and state counts differ");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& m = state.first_moment[p];
        auto& v = state.second_moment[p];
        const auto g = grads[p].data();
        auto w = params[p];
        if (g.size() != w.size() || m.size() != w.size()) throw ShapeError("adam_step: parameter shape mismatch");
        using Arr = Eigen::Map<Eigen::ArrayXd>;
        const auto n = static_cast<Eigen::Index>(w.size());
        Arr ma(m.data(), n), va(v.data(), n), wa(w.data(), n);
        const Eigen::Map<const Eigen::ArrayXd> ga(g.data(), n);
        ma = state.beta1 * ma + (1.0 - state.beta1) * ga;
        va = state.beta2 * va + (1.0 - state.beta2) * ga * ga;
        wa -= state.learning_rate * (ma / c1) / ((va / c2).sqrt() + state.epsilon);
    }
}

struct TrainConfig {
    double learning_rate = 0.0002;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ValueError("learning rate must be positive");
        if (batch_size < 1) throw ValueError("batch size must be >= 1");
    }
};

struct TrainResult {
    std::vector<double> epoch_loss; // mean training MSE seen during each epoch
};

inline DenseTensor gather_rows(const DenseTensor& m, std::span<const std::size_t> rows) {
    DenseTensor out = DenseTensor::matrix(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = m.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Mini-batch Adam on the MSE loss, reshuffling with a seeded generator every epoch.
inline TrainResult train(Network& net, const DenseTensor& inputs, const DenseTensor& targets, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {}) {
    cfg.validate();
    check_batch(net, inputs);
    if (targets.order() != 2 || targets.cols() != net.output_dim()) throw ShapeError("targets do not match output width");
    if (inputs.rows() != targets.rows()) throw ShapeError("input and target row counts differ");
    const std::size_t n = inputs.rows();
    if (n == 0) throw ValueError("empty dataset");

    AdamState state = make_adam_state(net, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double weighted = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            const std::span<const std::size_t> idx(order.data() + start, count);
            const DenseTensor xb = gather_rows(inputs, idx);
            const DenseTensor yb = gather_rows(targets, idx);
            const ForwardCache cache = forward(net, xb);
            weighted += mse_loss(cache.output, yb) * static_cast<double>(count);
            const Gradients grads = backward(net, cache, mse_gradient(cache.output, yb), false);
            const auto params = net.parameters();
            adam_step(params, grads.params, state);
        }
        result.epoch_loss.push_back(weighted / static_cast<double>(n));
        if (on_epoch) on_epoch(epoch, result.epoch_loss.back());
    }
    return result;
}

// MSE of the network over a full dataset, evaluated in chunks.
inline double evaluate_mse(const Network& net, const DenseTensor& inputs, const DenseTensor& targets,
                           std::size_t chunk = 1024) {
    if (inputs.rows() != targets.rows()) throw ShapeError("input and target row counts differ");
    double acc = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < inputs.rows(); start += chunk) {
        const std::size_t count = std::min(chunk, inputs.rows() - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        const DenseTensor pred = predict(net, gather_rows(inputs, idx));
        acc += mse_loss(pred, gather_rows(targets, idx)) * static_cast<double>(count);
    }
    return acc / static_cast<double>(inputs.rows());
}

} // namespace ttnet
