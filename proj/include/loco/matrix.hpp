#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "loco/error.hpp"

namespace loco {

using Vector = std::vector<double>;

/// Dense real matrix, column-major storage.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // data[i + j*rows]

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i + j * rows]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i + j * rows]; }

    double* col(std::size_t j) { return data.data() + j * rows; }
    const double* col(std::size_t j) const { return data.data() + j * rows; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw DimensionError(msg);
}

// -- small serial vector helpers (kept serial: every caller relies on a
//    fixed summation order for reproducibility) --

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), "dot: length mismatch");
    return dot(a.data(), b.data(), a.size());
}

inline double norm2_sq(const Vector& a) { return dot(a.data(), a.data(), a.size()); }
inline double norm2(const Vector& a) { return std::sqrt(norm2_sq(a)); }

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline double mean(const Vector& a) {
    double s = 0.0;
    for (double v : a) s += v;
    return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

inline Vector sub(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), "sub: length mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

}  // namespace loco
