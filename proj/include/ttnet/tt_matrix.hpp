#pragma once

#include <ttnet/linalg.hpp>
#include <ttnet/tensor.hpp>

#include <cstdint>
#include <random>

namespace ttnet {

// Mode sizes and (capped) bond ranks of a TT-matrix. ranks has K+1 entries with both ends equal to 1;
// interior entries may be unlimited_rank when used as decomposition caps.
struct ModeFactorization {
    std::vector<std::size_t> input_modes;
    std::vector<std::size_t> output_modes;
    std::vector<std::size_t> ranks;

    std::size_t order() const noexcept { return input_modes.size(); }
    std::size_t input_dim() const { return shape_product(input_modes); }
    std::size_t output_dim() const { return shape_product(output_modes); }

    bool has_unlimited_rank() const {
        return std::find(ranks.begin(), ranks.end(), unlimited_rank) != ranks.end();
    }

    void validate() const {
        const std::size_t k = input_modes.size();
        if (k == 0) throw ValueError("mode factorization needs at least one mode");
        if (output_modes.size() != k) throw ValueError("input and output mode lists differ in length");
        if (ranks.size() != k + 1) throw ValueError("rank list must have K+1 entries");
        if (ranks.front() != 1 || ranks.back() != 1) throw ValueError("boundary ranks must be 1");
        for (std::size_t m : input_modes) {
            if (m < 1) throw ValueError("mode sizes must be >= 1");
        }
        for (std::size_t n : output_modes) {
            if (n < 1) throw ValueError("mode sizes must be >= 1");
        }
        for (std::size_t r : ranks) {
            if (r < 1) throw ValueError("rank caps must be >= 1");
        }
    }

    // Unlimited interior ranks.
    static ModeFactorization full_rank(std::vector<std::size_t> in, std::vector<std::size_t> out) {
        ModeFactorization f{std::move(in), std::move(out), {}};
        f.ranks.assign(f.input_modes.size() + 1, unlimited_rank);
        f.ranks.front() = 1;
        f.ranks.back() = 1;
        return f;
    }

    // Every interior bond capped at `rank`.
    static ModeFactorization uniform(std::vector<std::size_t> in, std::vector<std::size_t> out, std::size_t rank) {
        ModeFactorization f = full_rank(std::move(in), std::move(out));
        for (std::size_t k = 1; k + 1 < f.ranks.size(); ++k) f.ranks[k] = rank;
        return f;
    }
};

// W((i1,j1),...,(iK,jK)) = C1[i1,j1] * C2[i2,j2] * ... * CK[iK,jK], with core k of shape
// [r_k, m_k, n_k, r_{k+1}] and r_1 = r_{K+1} = 1. Rows of W index inputs, columns index outputs.
class TTMatrix {
public:
    explicit TTMatrix(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
        if (cores_.empty()) throw ValueError("TT-matrix needs at least one core");
        ranks_.push_back(1);
        for (std::size_t k = 0; k < cores_.size(); ++k) {
            const auto& c = cores_[k];
            if (c.order() != 4) throw ShapeError("TT core " + std::to_string(k) + " must have 4 modes");
            if (c.dim(0) != ranks_.back()) throw ShapeError("TT core " + std::to_string(k) + " has mismatched left rank");
            input_modes_.push_back(c.dim(1));
            output_modes_.push_back(c.dim(2));
            ranks_.push_back(c.dim(3));
        }
        if (ranks_.front() != 1 || ranks_.back() != 1) throw ShapeError("TT boundary ranks must be 1");
    }

    std::size_t order() const noexcept { return cores_.size(); }
    const std::vector<std::size_t>& input_modes() const noexcept { return input_modes_; }
    const std::vector<std::size_t>& output_modes() const noexcept { return output_modes_; }
    const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }
    std::size_t input_dim() const { return shape_product(input_modes_); }
    std::size_t output_dim() const { return shape_product(output_modes_); }

    const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
    const DenseTensor& core(std::size_t k) const { return cores_.at(k); }
    // Mutable access to core values; the shape stays fixed.
    std::span<double> core_data(std::size_t k) { return cores_.at(k).data(); }

    ModeFactorization factorization() const { return {input_modes_, output_modes_, ranks_}; }

    bool operator==(const TTMatrix&) const = default;

private:
    std::vector<DenseTensor> cores_;
    std::vector<std::size_t> input_modes_;
    std::vector<std::size_t> output_modes_;
    std::vector<std::size_t> ranks_;
};

inline std::size_t tt_param_count(const TTMatrix& tt) {
    std::size_t total = 0;
    for (const auto& c : tt.cores()) total += c.size();
    return total;
}

// Sum over cores of m_k n_k r_k r_{k+1}, for finite ranks.
inline std::size_t tt_param_count(const ModeFactorization& fact) {
    fact.validate();
    if (fact.has_unlimited_rank()) throw ValueError("parameter count needs finite ranks");
    std::size_t total = 0;
    for (std::size_t k = 0; k < fact.order(); ++k) {
        total += fact.input_modes[k] * fact.output_modes[k] * fact.ranks[k] * fact.ranks[k + 1];
    }
    return total;
}

inline std::size_t dense_param_count(const ModeFactorization& fact) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < fact.order(); ++k) total *= fact.input_modes[k] * fact.output_modes[k];
    return total;
}

// TT-SVD: reshape w to (i1..iK, j1..jK), interleave to (i1,j1,...,iK,jK), then sweep left to right with
// truncated SVDs, pushing diag(S) V^T into the remainder. Each bond uses rel_tol / sqrt(K-1) against the
// current unfolding so the overall relative error stays within rel_tol.
inline TTMatrix tt_svd_decompose(const DenseTensor& w, const ModeFactorization& fact, double rel_tol = 0.0) {
    fact.validate();
    if (w.order() != 2) throw ShapeError("tt_svd_decompose expects a matrix");
    if (w.rows() != fact.input_dim() || w.cols() != fact.output_dim()) {
        throw ShapeError("matrix " + shape_string(w.shape()) + " does not match modes " +
                         shape_string(fact.input_modes) + " x " + shape_string(fact.output_modes));
    }
    const std::size_t order = fact.order();

    Shape split_shape = fact.input_modes;
    split_shape.insert(split_shape.end(), fact.output_modes.begin(), fact.output_modes.end());
    std::vector<std::size_t> perm;
    for (std::size_t k = 0; k < order; ++k) {
        perm.push_back(k);
        perm.push_back(k + order);
    }
    DenseTensor rest = permute_axes(reshape(w, split_shape), perm);

    const double step_tol = order > 1 ? rel_tol / std::sqrt(static_cast<double>(order - 1)) : 0.0;
    std::vector<DenseTensor> cores;
    std::size_t left_rank = 1;
    for (std::size_t k = 0; k + 1 < order; ++k) {
        const std::size_t rows = left_rank * fact.input_modes[k] * fact.output_modes[k];
        const std::size_t cols = rest.size() / rows;
        SvdResult svd = svd_truncated(reshape(std::move(rest), Shape{rows, cols}), fact.ranks[k + 1], step_tol);
        const std::size_t r = svd.rank;
        cores.push_back(reshape(std::move(svd.u), Shape{left_rank, fact.input_modes[k], fact.output_modes[k], r}));
        for (std::size_t i = 0; i < r; ++i) {
            auto row = svd.vt.row(i);
            for (double& v : row) v *= svd.s[i];
        }
        rest = std::move(svd.vt);
        left_rank = r;
    }
    cores.push_back(reshape(std::move(rest), Shape{left_rank, fact.input_modes.back(), fact.output_modes.back(), 1}));
    return TTMatrix(std::move(cores));
}

// Dense matrix of shape (prod m) x (prod n), built by chaining cores over the interleaved index.
inline DenseTensor reconstruct(const TTMatrix& tt) {
    const std::size_t order = tt.order();
    DenseTensor chain = tt.core(0);
    std::size_t lead = tt.input_modes()[0] * tt.output_modes()[0];
    for (std::size_t k = 1; k < order; ++k) {
        const auto& c = tt.core(k);
        const std::size_t r = c.dim(0);
        DenseTensor left = reshape(std::move(chain), Shape{lead, r});
        DenseTensor right = reshape(c, Shape{r, c.size() / r});
        chain = matmul(left, right);
        lead *= tt.input_modes()[k] * tt.output_modes()[k];
    }
    Shape interleaved;
    for (std::size_t k = 0; k < order; ++k) {
        interleaved.push_back(tt.input_modes()[k]);
        interleaved.push_back(tt.output_modes()[k]);
    }
    std::vector<std::size_t> perm;
    for (std::size_t k = 0; k < order; ++k) perm.push_back(2 * k);
    for (std::size_t k = 0; k < order; ++k) perm.push_back(2 * k + 1);
    DenseTensor grouped = permute_axes(reshape(std::move(chain), interleaved), perm);
    return reshape(std::move(grouped), Shape{tt.input_dim(), tt.output_dim()});
}

// Per-bond intermediates kept by tt_apply for the backward pass: the state entering step k, as a
// [(r_k*m_k) x rest] matrix. `reversed` records that the sweep ran over the mirrored chain.
struct TTApplyCache {
    std::size_t batch = 0;
    bool reversed = false;
    std::vector<DenseTensor> step_inputs;
};

struct TTApplyGradients {
    std::vector<DenseTensor> cores; // same shapes as the TT cores
    DenseTensor input;              // [N x prod m]
};

namespace detail {

// The running state keeps the batch index innermost:
//   step k input  [r_k, m_k, m_{k+1}..m_K, n_1..n_{k-1}, N]
//   GEMM output   [n_k, r_{k+1}, m_{k+1}..m_K, n_1..n_{k-1}, N]
// so every core is one large GEMM, and moving n_k back behind the other indices is a block transpose
// whose blocks are contiguous runs of N values.
struct StepDims {
    std::size_t alpha, i, j, beta, rest;
};

inline StepDims step_dims(const TTMatrix& tt, std::size_t batch, std::size_t k) {
    StepDims d{tt.ranks()[k], tt.input_modes()[k], tt.output_modes()[k], tt.ranks()[k + 1], batch};
    for (std::size_t l = k + 1; l < tt.order(); ++l) d.rest *= tt.input_modes()[l];
    for (std::size_t l = 0; l < k; ++l) d.rest *= tt.output_modes()[l];
    return d;
}

// [a][b][run] -> [b][a][run]
inline void block_transpose(std::span<const double> src, std::span<double> dst, std::size_t a, std::size_t b, std::size_t run) {
    for (std::size_t x = 0; x < a; ++x) {
        for (std::size_t y = 0; y < b; ++y) {
            const double* from = src.data() + (x * b + y) * run;
            std::copy(from, from + run, dst.data() + (y * a + x) * run);
        }
    }
}

// Multiply-adds of one left-to-right sweep per sample.
inline double sweep_cost(std::span<const std::size_t> in, std::span<const std::size_t> out, std::span<const std::size_t> ranks) {
    double cost = 0.0;
    for (std::size_t k = 0; k < in.size(); ++k) {
        double rest = 1.0;
        for (std::size_t l = k + 1; l < in.size(); ++l) rest *= static_cast<double>(in[l]);
        for (std::size_t l = 0; l < k; ++l) rest *= static_cast<double>(out[l]);
        cost += static_cast<double>(ranks[k] * in[k] * out[k] * ranks[k + 1]) * rest;
    }
    return cost;
}

// Sweeping the mirrored chain right-to-left is much cheaper for lopsided modes such as (5,65) -> (4,4).
inline bool mirror_is_cheaper(const TTMatrix& tt) {
    std::vector<std::size_t> in(tt.input_modes().rbegin(), tt.input_modes().rend());
    std::vector<std::size_t> out(tt.output_modes().rbegin(), tt.output_modes().rend());
    std::vector<std::size_t> ranks(tt.ranks().rbegin(), tt.ranks().rend());
    return sweep_cost(in, out, ranks) < sweep_cost(tt.input_modes(), tt.output_modes(), tt.ranks());
}

// Same matrix with the mode order reversed: core k becomes core K-1-k with its bond axes swapped.
inline TTMatrix mirrored(const TTMatrix& tt) {
    std::vector<DenseTensor> cores;
    for (std::size_t k = tt.order(); k-- > 0;) cores.push_back(permute_axes(tt.core(k), {3, 1, 2, 0}));
    return TTMatrix(std::move(cores));
}

// Rows [m1..mK] -> [mK..m1].
inline DenseTensor reverse_modes(const DenseTensor& x, std::span<const std::size_t> modes) {
    Shape shape{x.rows()};
    shape.insert(shape.end(), modes.begin(), modes.end());
    std::vector<std::size_t> perm{0};
    for (std::size_t k = modes.size(); k >= 1; --k) perm.push_back(k);
    return reshape(permute_axes(reshape(x, shape), perm), {x.rows(), x.cols()});
}

inline DenseTensor sweep(const TTMatrix& tt, const DenseTensor& x, TTApplyCache* cache) {
    const std::size_t batch = x.rows();
    DenseTensor state = DenseTensor::matrix(tt.input_dim(), batch);
    as_matrix(state).noalias() = as_matrix(x).transpose();
    for (std::size_t k = 0; k < tt.order(); ++k) {
        const auto d = step_dims(tt, batch, k);
        const auto g = as_matrix(tt.core(k).data(), d.alpha * d.i, d.j * d.beta);
        DenseTensor out = DenseTensor::matrix(d.j * d.beta, d.rest);
        as_matrix(out).noalias() = g.transpose() * as_matrix(state.data(), d.alpha * d.i, d.rest);
        DenseTensor next = DenseTensor::matrix(d.beta * d.rest, d.j);
        block_transpose(out.data(), next.data(), d.j, d.beta * d.rest / batch, batch);
        if (cache) cache->step_inputs.push_back(std::move(state));
        state = std::move(next);
    }
    DenseTensor y = DenseTensor::matrix(batch, tt.output_dim());
    as_matrix(y).noalias() = as_matrix(state.data(), tt.output_dim(), batch).transpose();
    return y;
}

inline TTApplyGradients sweep_backward(const TTMatrix& tt, const TTApplyCache& cache, const DenseTensor& dy) {
    const std::size_t batch = cache.batch;
    TTApplyGradients grads;
    grads.cores.resize(tt.order());
    DenseTensor dstate = DenseTensor::matrix(tt.output_dim(), batch);
    as_matrix(dstate).noalias() = as_matrix(dy).transpose();
    for (std::size_t k = tt.order(); k-- > 0;) {
        const auto d = step_dims(tt, batch, k);
        const DenseTensor& a = cache.step_inputs[k];
        if (a.size() != d.alpha * d.i * d.rest) throw ValueError("tt_apply_backward: stale cache");
        DenseTensor dout = DenseTensor::matrix(d.j * d.beta, d.rest);
        block_transpose(dstate.data(), dout.data(), d.beta * d.rest / batch, d.j, batch);
        const auto am = as_matrix(a.data(), d.alpha * d.i, d.rest);
        const auto om = as_matrix(dout.data(), d.j * d.beta, d.rest);

        DenseTensor dcore(tt.core(k).shape());
        as_matrix(dcore.data(), d.alpha * d.i, d.j * d.beta).noalias() = am * om.transpose();
        grads.cores[k] = std::move(dcore);

        const auto g = as_matrix(tt.core(k).data(), d.alpha * d.i, d.j * d.beta);
        DenseTensor da = DenseTensor::matrix(d.alpha * d.i, d.rest);
        as_matrix(da).noalias() = g * om;
        dstate = std::move(da);
    }
    grads.input = DenseTensor::matrix(batch, tt.input_dim());
    as_matrix(grads.input).noalias() = as_matrix(dstate.data(), tt.input_dim(), batch).transpose();
    return grads;
}

} // namespace detail

// Y = X * W for a batch X of shape [N x prod m], without forming W.
inline DenseTensor tt_apply(const TTMatrix& tt, const DenseTensor& x, TTApplyCache* cache = nullptr) {
    if (x.order() != 2 || x.cols() != tt.input_dim()) {
        throw ShapeError("tt_apply: input " + shape_string(x.shape()) + " does not match input dim " +
                         std::to_string(tt.input_dim()));
    }
    const bool mirror = detail::mirror_is_cheaper(tt);
    if (cache) {
        cache->batch = x.rows();
        cache->reversed = mirror;
        cache->step_inputs.clear();
    }
    if (!mirror) return detail::sweep(tt, x, cache);
    const TTMatrix m = detail::mirrored(tt);
    return detail::reverse_modes(detail::sweep(m, detail::reverse_modes(x, tt.input_modes()), cache), m.output_modes());
}

// Reverse of tt_apply: given dL/dY, returns dL/dcore_k (cached step inputs against the propagated
// output gradient) and dL/dX.
inline TTApplyGradients tt_apply_backward(const TTMatrix& tt, const TTApplyCache& cache, const DenseTensor& dy) {
    if (cache.step_inputs.size() != tt.order()) throw ValueError("tt_apply_backward: missing forward cache");
    if (dy.order() != 2 || dy.rows() != cache.batch || dy.cols() != tt.output_dim()) {
        throw ShapeError("tt_apply_backward: output gradient shape mismatch");
    }
    if (!cache.reversed) return detail::sweep_backward(tt, cache, dy);
    const TTMatrix m = detail::mirrored(tt);
    TTApplyGradients g = detail::sweep_backward(m, cache, detail::reverse_modes(dy, tt.output_modes()));
    TTApplyGradients out;
    for (std::size_t k = tt.order(); k-- > 0;) out.cores.push_back(permute_axes(g.cores[k], {3, 1, 2, 0}));
    out.input = detail::reverse_modes(g.input, m.input_modes());
    return out;
}

// y(j1..jK) = sum over i of W((i1,j1)..(iK,jK)) x(i1..iK), for x shaped like the input modes.
inline DenseTensor tt_matvec(const TTMatrix& tt, const DenseTensor& x) {
    if (x.shape() != Shape(tt.input_modes())) {
        throw ShapeError("tt_matvec: input shape " + shape_string(x.shape()) + " != input modes " +
                         shape_string(tt.input_modes()));
    }
    DenseTensor y = tt_apply(tt, reshape(x, Shape{1, tt.input_dim()}));
    return reshape(std::move(y), Shape(tt.output_modes()));
}

// Gaussian cores whose product has per-entry variance 2 / fan_in, with the scale split evenly (in log
// space) across cores.
inline TTMatrix tt_random_init(const ModeFactorization& fact, std::uint64_t seed) {
    fact.validate();
    if (fact.has_unlimited_rank()) throw ValueError("tt_random_init needs finite ranks");
    double bond_terms = 1.0;
    for (std::size_t k = 1; k < fact.order(); ++k) bond_terms *= static_cast<double>(fact.ranks[k]);
    const double target = 2.0 / static_cast<double>(fact.input_dim());
    const double core_var = std::pow(target / bond_terms, 1.0 / static_cast<double>(fact.order()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, std::sqrt(core_var));
    std::vector<DenseTensor> cores;
    for (std::size_t k = 0; k < fact.order(); ++k) {
        DenseTensor c(Shape{fact.ranks[k], fact.input_modes[k], fact.output_modes[k], fact.ranks[k + 1]});
        for (double& v : c.data()) v = dist(rng);
        cores.push_back(std::move(c));
    }
    return TTMatrix(std::move(cores));
}

} // namespace ttnet
