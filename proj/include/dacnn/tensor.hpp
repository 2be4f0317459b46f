#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "dacnn/error.hpp"

namespace dacnn {

// Shape-annotated dense array, row-major. Values are doubles; the model
// file format stores float32, so trained parameters are kept
// float-representable (see NetworkModel).
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        v.assign(element_count(shape), 0.0);
    }

    static std::size_t element_count(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) {
            if (d <= 0) throw ShapeMismatch("tensor dimension must be positive");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::size_t size() const { return v.size(); }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

}  // namespace dacnn
