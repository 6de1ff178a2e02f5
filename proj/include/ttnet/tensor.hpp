#pragma once

#include <ttnet/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <new>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ttnet {

using Shape = std::vector<std::size_t>;

// Eigen's vectorised loops peel a different number of leading scalars depending on where a buffer
// starts, and the peeled part rounds differently. Buffers handed to Eigen are kept 64-byte aligned so
// results do not depend on heap layout (a rerun in the same process would otherwise drift in the last bits).
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

inline std::size_t shape_product(std::span<const std::size_t> shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_string(std::span<const std::size_t> shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << (i ? "," : "") << shape[i];
    }
    os << ']';
    return os.str();
}

// Row-major K-mode array of doubles. The shape is never empty and every mode is >= 1.
class DenseTensor {
public:
    DenseTensor() : shape_{1}, data_(1, 0.0) {}

    explicit DenseTensor(Shape shape) : shape_(checked(std::move(shape))), data_(shape_product(shape_), 0.0) {}

    DenseTensor(Shape shape, std::initializer_list<double> data) : DenseTensor(std::move(shape), AlignedVector(data)) {}
    DenseTensor(Shape shape, const std::vector<double>& data) : DenseTensor(std::move(shape), AlignedVector(data.begin(), data.end())) {}

    DenseTensor(Shape shape, AlignedVector data) : shape_(checked(std::move(shape))), data_(std::move(data)) {
        if (data_.size() != shape_product(shape_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                             shape_string(shape_));
        }
    }

    static DenseTensor matrix(std::size_t rows, std::size_t cols) { return DenseTensor(Shape{rows, cols}); }
    static DenseTensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
        return DenseTensor(Shape{rows, cols}, std::move(data));
    }
    static DenseTensor vector(std::vector<double> data) {
        const std::size_t n = data.size();
        return DenseTensor(Shape{n}, std::move(data));
    }
    static DenseTensor identity(std::size_t n) {
        DenseTensor t = matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
        return t;
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t dim(std::size_t mode) const { return shape_.at(mode); }

    std::size_t rows() const {
        require_matrix();
        return shape_[0];
    }
    std::size_t cols() const {
        require_matrix();
        return shape_[1];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    AlignedVector& values() noexcept { return data_; }
    const AlignedVector& values() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * shape_[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * shape_[1] + c]; }

    std::span<double> row(std::size_t r) { return std::span<double>(data_).subspan(r * shape_[1], shape_[1]); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data_).subspan(r * shape_[1], shape_[1]);
    }

    double at(std::span<const std::size_t> index) const { return data_[offset(index)]; }
    double& at(std::span<const std::size_t> index) { return data_[offset(index)]; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const DenseTensor&) const = default;

private:
    static Shape checked(Shape shape) {
        if (shape.empty()) throw ShapeError("tensor shape must have at least one mode");
        for (std::size_t s : shape) {
            if (s == 0) throw ShapeError("tensor mode sizes must be >= 1, got " + shape_string(shape));
        }
        return shape;
    }

    void require_matrix() const {
        if (shape_.size() != 2) throw ShapeError("expected a 2-mode tensor, got " + shape_string(shape_));
    }

    std::size_t offset(std::span<const std::size_t> index) const {
        if (index.size() != shape_.size()) throw ShapeError("index order does not match tensor order");
        std::size_t off = 0;
        for (std::size_t k = 0; k < index.size(); ++k) {
            if (index[k] >= shape_[k]) throw ShapeError("tensor index out of range");
            off = off * shape_[k] + index[k];
        }
        return off;
    }

    Shape shape_;
    AlignedVector data_;
};

inline DenseTensor reshape(DenseTensor t, Shape new_shape) {
    if (new_shape.empty() || shape_product(new_shape) != t.size()) {
        throw ShapeError("cannot reshape " + shape_string(t.shape()) + " to " + shape_string(new_shape));
    }
    return DenseTensor(std::move(new_shape), std::move(t.values()));
}

inline bool is_permutation_of_modes(std::span<const std::size_t> perm, std::size_t order) {
    if (perm.size() != order) return false;
    std::vector<bool> seen(order, false);
    for (std::size_t p : perm) {
        if (p >= order || seen[p]) return false;
        seen[p] = true;
    }
    return true;
}

// output[i_perm[0], ..., i_perm[K-1]] = t[i_0, ..., i_{K-1}], i.e. output mode k is input mode perm[k].
inline DenseTensor permute_axes(const DenseTensor& t, std::span<const std::size_t> perm) {
    const std::size_t order = t.order();
    if (!is_permutation_of_modes(perm, order)) throw ValueError("invalid axis permutation");

    const Shape& in_shape = t.shape();
    Shape out_shape(order);
    std::vector<std::size_t> in_strides(order);
    {
        std::size_t stride = 1;
        for (std::size_t k = order; k-- > 0;) {
            in_strides[k] = stride;
            stride *= in_shape[k];
        }
    }
    std::vector<std::size_t> step(order);
    for (std::size_t k = 0; k < order; ++k) {
        out_shape[k] = in_shape[perm[k]];
        step[k] = in_strides[perm[k]];
    }

    DenseTensor out(out_shape);
    const double* src = t.data().data();
    double* dst = out.data().data();
    const std::size_t inner = out_shape[order - 1];
    const std::size_t inner_step = step[order - 1];
    const std::size_t outer = t.size() / inner;

    std::vector<std::size_t> counter(order, 0);
    std::size_t base = 0;
    for (std::size_t block = 0; block < outer; ++block) {
        const double* s = src + base;
        for (std::size_t i = 0; i < inner; ++i) dst[i] = s[i * inner_step];
        dst += inner;
        // odometer over all modes but the last
        for (std::size_t k = order - 1; k-- > 0;) {
            base += step[k];
            if (++counter[k] < out_shape[k]) break;
            base -= step[k] * out_shape[k];
            counter[k] = 0;
        }
    }
    return out;
}

inline DenseTensor permute_axes(const DenseTensor& t, std::initializer_list<std::size_t> perm) {
    return permute_axes(t, std::span<const std::size_t>(perm.begin(), perm.size()));
}

inline std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv.at(perm[k]) = k;
    return inv;
}

// Rows index modes [0, split), columns modes [split, K).
inline DenseTensor matricize(const DenseTensor& t, std::size_t split) {
    if (split < 1 || split >= t.order()) {
        throw ValueError("matricize split " + std::to_string(split) + " out of range for order " +
                         std::to_string(t.order()));
    }
    const auto& s = t.shape();
    const std::size_t rows = shape_product(std::span(s).first(split));
    return reshape(t, Shape{rows, t.size() / rows});
}

inline DenseTensor transpose(const DenseTensor& m) {
    (void)m.rows();
    return permute_axes(m, {1, 0});
}

inline double frobenius_norm(const DenseTensor& t) {
    double acc = 0.0;
    for (double v : t.data()) acc += v * v;
    return std::sqrt(acc);
}

inline double frobenius_distance(const DenseTensor& a, const DenseTensor& b) {
    if (a.size() != b.size()) throw ShapeError("frobenius_distance: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline double relative_error(const DenseTensor& approx, const DenseTensor& exact) {
    const double n = frobenius_norm(exact);
    const double d = frobenius_distance(approx, exact);
    return n > 0.0 ? d / n : d;
}

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace ttnet
