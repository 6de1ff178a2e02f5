#pragma once

#include <ttnet/tensor.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <limits>

namespace ttnet {

inline constexpr std::size_t unlimited_rank = std::numeric_limits<std::size_t>::max();

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

inline MatrixMap as_matrix(std::span<double> data, std::size_t rows, std::size_t cols) {
    return MatrixMap(data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
inline ConstMatrixMap as_matrix(std::span<const double> data, std::size_t rows, std::size_t cols) {
    return ConstMatrixMap(data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
inline MatrixMap as_matrix(DenseTensor& m) { return as_matrix(m.data(), m.rows(), m.cols()); }
inline ConstMatrixMap as_matrix(const DenseTensor& m) { return as_matrix(m.data(), m.rows(), m.cols()); }

enum class Op { none, transpose };

// op(a) * op(b) for 2-mode tensors.
inline DenseTensor matmul(const DenseTensor& a, const DenseTensor& b, Op op_a = Op::none, Op op_b = Op::none) {
    const std::size_t m = op_a == Op::none ? a.rows() : a.cols();
    const std::size_t ka = op_a == Op::none ? a.cols() : a.rows();
    const std::size_t kb = op_b == Op::none ? b.rows() : b.cols();
    const std::size_t n = op_b == Op::none ? b.cols() : b.rows();
    if (ka != kb) {
        throw ShapeError("matmul inner dimensions differ: " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
    }
    DenseTensor c = DenseTensor::matrix(m, n);
    auto cm = as_matrix(c);
    const auto am = as_matrix(a);
    const auto bm = as_matrix(b);
    if (op_a == Op::none && op_b == Op::none) cm.noalias() = am * bm;
    else if (op_a == Op::transpose && op_b == Op::none) cm.noalias() = am.transpose() * bm;
    else if (op_a == Op::none) cm.noalias() = am * bm.transpose();
    else cm.noalias() = am.transpose() * bm.transpose();
    return c;
}

struct SvdResult {
    DenseTensor u;              // rows x rank, orthonormal columns
    std::vector<double> s;      // descending, >= 0
    DenseTensor vt;             // rank x cols, orthonormal rows
    std::size_t rank = 0;
    double discarded_energy = 0.0; // sum of squared dropped singular values
};

// Smallest r >= 1 whose discarded tail energy is within rel_tol^2 of the total, capped at max_rank.
inline std::size_t truncation_rank(std::span<const double> singular_values, std::size_t max_rank, double rel_tol) {
    const std::size_t n = singular_values.size();
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + singular_values[i] * singular_values[i];
    const double budget = rel_tol * rel_tol * tail[0];
    std::size_t r = n;
    for (std::size_t candidate = 1; candidate <= n; ++candidate) {
        if (tail[candidate] <= budget) {
            r = candidate;
            break;
        }
    }
    r = std::min(r, max_rank);
    return std::max<std::size_t>(r, 1);
}

inline SvdResult svd_truncated(const DenseTensor& m, std::size_t max_rank = unlimited_rank, double rel_tol = 0.0) {
    if (m.order() != 2) throw ShapeError("svd_truncated expects a 2-mode tensor, got " + shape_string(m.shape()));
    if (max_rank < 1) throw ValueError("svd_truncated: max_rank must be >= 1");
    if (!(rel_tol >= 0.0)) throw ValueError("svd_truncated: rel_tol must be >= 0");
    if (!all_finite(m.data())) throw ValueError("svd_truncated: input contains non-finite values");

    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const std::size_t full = std::min(rows, cols);

    Eigen::BDCSVD<RowMatrix> svd(as_matrix(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    std::vector<double> all(sv.data(), sv.data() + sv.size());

    // Values at the level of rounding noise count as exact zeros, so exactly low-rank input keeps its rank.
    const double noise_floor =
        all.empty() ? 0.0 : all[0] * static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
    std::vector<double> effective = all;
    for (double& v : effective) {
        if (v <= noise_floor) v = 0.0;
    }
    const std::size_t r = std::min(truncation_rank(effective, max_rank, rel_tol), full);

    SvdResult out;
    out.rank = r;
    out.s.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(r));
    for (std::size_t i = r; i < all.size(); ++i) out.discarded_energy += all[i] * all[i];

    out.u = DenseTensor::matrix(rows, r);
    out.vt = DenseTensor::matrix(r, cols);
    const auto& U = svd.matrixU();
    const auto& V = svd.matrixV();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < r; ++k) out.u(i, k) = U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t j = 0; j < cols; ++j) out.vt(k, j) = V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }
    return out;
}

// u * diag(s) * vt
inline DenseTensor svd_reconstruct(const SvdResult& svd) {
    DenseTensor us = svd.u;
    for (std::size_t i = 0; i < us.rows(); ++i) {
        for (std::size_t k = 0; k < svd.rank; ++k) us(i, k) *= svd.s[k];
    }
    return matmul(us, svd.vt);
}

} // namespace ttnet
