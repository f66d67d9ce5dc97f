#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sfeeg/errors.hpp"

namespace sfeeg {

// Row-major double matrix used for activations and transient math.
// Parameters and on-disk data are 32-bit floats; everything that flows
// through losses and gradients is accumulated in 64-bit.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }

    std::size_t size() const { return a.size(); }
    bool empty() const { return a.empty(); }

    bool all_finite() const {
        for (double v : a)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// 32-bit float matrix: the storage type for learnable parameters.
struct FloatMat {
    int rows = 0;
    int cols = 0;
    std::vector<float> v;

    FloatMat() = default;
    FloatMat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0f) {}

    float& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    float at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

inline void require_shape(const Mat& m, int rows, int cols, const std::string& what) {
    if (m.rows != rows || m.cols != cols)
        throw ShapeError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", got " + std::to_string(m.rows) + "x" + std::to_string(m.cols));
}

} // namespace sfeeg
