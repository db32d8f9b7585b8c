#include "loco/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loco {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

DenseMatrix matmul_serial(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols == b.rows, "matmul: inner dimension mismatch");
    DenseMatrix c(a.rows, b.cols);
    for (std::size_t j = 0; j < b.cols; ++j) {
        double* cj = c.col(j);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            axpy(bkj, a.col(k), cj, a.rows);
        }
    }
    return c;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols == b.rows, "matmul: inner dimension mismatch");
    DenseMatrix c(a.rows, b.cols);
    const std::ptrdiff_t nj = static_cast<std::ptrdiff_t>(b.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < nj; ++j) {
        double* cj = c.col(static_cast<std::size_t>(j));
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double bkj = b(k, static_cast<std::size_t>(j));
            if (bkj == 0.0) continue;
            axpy(bkj, a.col(k), cj, a.rows);
        }
    }
    return c;
}

DenseMatrix gram_serial(const DenseMatrix& m) {
    DenseMatrix g(m.cols, m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const double v = dot(m.col(i), m.col(j), m.rows);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

DenseMatrix gram(const DenseMatrix& m) {
    DenseMatrix g(m.cols, m.cols);
    const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(m.cols);
    // dynamic schedule: column j costs O(j * rows)
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t j = 0; j < q; ++j) {
        const double* cj = m.col(static_cast<std::size_t>(j));
        for (std::size_t i = 0; i <= static_cast<std::size_t>(j); ++i) {
            g(i, static_cast<std::size_t>(j)) = dot(m.col(i), cj, m.rows);
        }
    }
    for (std::size_t j = 0; j < m.cols; ++j)
        for (std::size_t i = j + 1; i < m.cols; ++i) g(i, j) = g(j, i);
    return g;
}

Vector matvec_serial(const DenseMatrix& a, const Vector& x) {
    require(a.cols == x.size(), "matvec: dimension mismatch");
    Vector y(a.rows, 0.0);
    for (std::size_t j = 0; j < a.cols; ++j) axpy(x[j], a.col(j), y.data(), a.rows);
    return y;
}

Vector matvec(const DenseMatrix& a, const Vector& x) {
    require(a.cols == x.size(), "matvec: dimension mismatch");
    Vector y(a.rows, 0.0);
    // Row chunks, column sweep per chunk: y[i] accumulates in ascending j
    // order in every chunking, so the result matches the serial kernel bit
    // for bit.
    const std::size_t chunk = 1024;
    const std::ptrdiff_t nchunks =
        static_cast<std::ptrdiff_t>((a.rows + chunk - 1) / chunk);
#pragma omp parallel for schedule(static) if (a.rows * a.cols >= (1u << 16))
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
        const std::size_t i0 = static_cast<std::size_t>(c) * chunk;
        const std::size_t len = std::min(chunk, a.rows - i0);
        for (std::size_t j = 0; j < a.cols; ++j)
            axpy(x[j], a.col(j) + i0, y.data() + i0, len);
    }
    return y;
}

Vector matvec_t_serial(const DenseMatrix& a, const Vector& x) {
    require(a.rows == x.size(), "matvec_t: dimension mismatch");
    Vector y(a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) y[j] = dot(a.col(j), x.data(), a.rows);
    return y;
}

Vector matvec_t(const DenseMatrix& a, const Vector& x) {
    require(a.rows == x.size(), "matvec_t: dimension mismatch");
    Vector y(a.cols);
    const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(a.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < nc; ++j)
        y[static_cast<std::size_t>(j)] = dot(a.col(static_cast<std::size_t>(j)), x.data(), a.rows);
    return y;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    constexpr std::size_t blk = 32;
    for (std::size_t jb = 0; jb < a.cols; jb += blk)
        for (std::size_t ib = 0; ib < a.rows; ib += blk) {
            const std::size_t je = std::min(jb + blk, a.cols);
            const std::size_t ie = std::min(ib + blk, a.rows);
            for (std::size_t j = jb; j < je; ++j)
                for (std::size_t i = ib; i < ie; ++i) t(j, i) = a(i, j);
        }
    return t;
}

double frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

double frobenius_diff(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows == b.rows && a.cols == b.cols, "frobenius_diff: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows == b.rows && a.cols == b.cols, "max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace loco
