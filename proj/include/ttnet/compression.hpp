#pragma once

#include <ttnet/linalg.hpp>
#include <ttnet/nn.hpp>

namespace ttnet {

struct FactoredDense {
    DenseLayer first;  // [in x rank], no bias
    DenseLayer second; // [rank x out], carries the original bias
};

// Best rank-r approximation W ~ (U sqrt(S)) (sqrt(S) V^T).
inline FactoredDense svd_compress_layer(const DenseLayer& layer, std::size_t rank) {
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    if (rank < 1 || rank > std::min(in, out)) {
        throw ValueError("svd_compress_layer: rank " + std::to_string(rank) + " outside [1, " +
                         std::to_string(std::min(in, out)) + "]");
    }
    SvdResult svd = svd_truncated(layer.weights, rank, 0.0);
    // svd_truncated may stop early only at exact zeros; pad so the factor shapes honour `rank`.
    DenseTensor a = DenseTensor::matrix(in, rank);
    DenseTensor b = DenseTensor::matrix(rank, out);
    for (std::size_t k = 0; k < svd.rank; ++k) {
        const double root = std::sqrt(svd.s[k]);
        for (std::size_t i = 0; i < in; ++i) a(i, k) = svd.u(i, k) * root;
        for (std::size_t j = 0; j < out; ++j) b(k, j) = svd.vt(k, j) * root;
    }
    return {DenseLayer{std::move(a), std::nullopt}, DenseLayer{std::move(b), layer.bias}};
}

// Parameter cost of a dense kernel at a uniform rank; kernels that would not shrink stay dense.
inline std::size_t factored_kernel_cost(std::size_t in, std::size_t out, std::size_t rank) {
    const std::size_t r = std::min({rank, in, out});
    return std::min(r * (in + out), in * out);
}

inline bool factoring_shrinks(std::size_t in, std::size_t out, std::size_t rank) {
    const std::size_t r = std::min({rank, in, out});
    return r * (in + out) < in * out;
}

inline std::size_t compressed_param_count(const Network& net, std::size_t rank) {
    std::size_t total = 0;
    for (const auto& layer : net.layers()) {
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            total += factored_kernel_cost(d->in_dim(), d->out_dim(), rank) + (d->bias ? d->bias->size() : 0);
        } else if (const auto* t = std::get_if<TTLayer>(&layer)) {
            total += tt_param_count(t->tt) + t->bias.size();
        }
    }
    return total;
}

// Largest uniform rank whose factored network fits the budget.
inline std::size_t select_uniform_rank(const Network& net, std::size_t param_budget) {
    std::size_t max_rank = 0;
    for (const auto& layer : net.layers()) {
        if (const auto* d = std::get_if<DenseLayer>(&layer)) max_rank = std::max(max_rank, std::min(d->in_dim(), d->out_dim()));
    }
    if (max_rank == 0) throw ValueError("compress_network: network has no dense kernels");
    if (compressed_param_count(net, 1) > param_budget) {
        throw ValueError("compress_network: budget " + std::to_string(param_budget) +
                         " is infeasible even at rank 1 (needs " + std::to_string(compressed_param_count(net, 1)) + ")");
    }
    std::size_t lo = 1;
    std::size_t hi = max_rank;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (compressed_param_count(net, mid) <= param_budget) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

struct CompressedNetwork {
    Network network;
    std::size_t rank = 0;
};

// Replaces every dense kernel that shrinks at the selected rank by its two SVD factors.
inline CompressedNetwork compress_network(const Network& net, std::size_t param_budget) {
    const std::size_t rank = select_uniform_rank(net, param_budget);
    std::vector<Layer> layers;
    for (const auto& layer : net.layers()) {
        const auto* d = std::get_if<DenseLayer>(&layer);
        if (d && factoring_shrinks(d->in_dim(), d->out_dim(), rank)) {
            FactoredDense f = svd_compress_layer(*d, std::min({rank, d->in_dim(), d->out_dim()}));
            layers.emplace_back(std::move(f.first));
            layers.emplace_back(std::move(f.second));
        } else {
            layers.push_back(layer);
        }
    }
    return {Network(std::move(layers)), rank};
}

} // namespace ttnet
