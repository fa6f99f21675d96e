#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace causalfront {

using Shape = std::vector<int>;

inline std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

// Row-major strides; strides_of({2,3,4}) == {12,4,1}.
inline std::vector<std::size_t> strides_of(const Shape& shape) {
    std::vector<std::size_t> s(shape.size(), 1);
    for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
        s[i] = s[i + 1] * static_cast<std::size_t>(shape[i + 1]);
    return s;
}

// Odometer increment over a multi-index; returns false once all indices wrapped.
inline bool next_index(const Shape& shape, std::vector<int>& idx) {
    for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
        if (++idx[i] < shape[i]) return true;
        idx[i] = 0;
    }
    return false;
}

// Dense row-major tensor of doubles. Rank 0 is a scalar with one element.
struct Tensor {
    Shape shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0)
        : shape(std::move(s)), v(shape_size(shape), fill) {}

    int rank() const { return static_cast<int>(shape.size()); }
    std::size_t size() const { return v.size(); }

    std::size_t flat(std::span<const int> idx) const {
        assert(idx.size() == shape.size());
        std::size_t f = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            assert(idx[i] >= 0 && idx[i] < shape[i]);
            f = f * static_cast<std::size_t>(shape[i]) + static_cast<std::size_t>(idx[i]);
        }
        return f;
    }

    double& at(std::span<const int> idx) { return v[flat(idx)]; }
    double at(std::span<const int> idx) const { return v[flat(idx)]; }

    double sum() const {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
};

}  // namespace causalfront
