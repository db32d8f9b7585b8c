#include "loco/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loco/kernels.hpp"

namespace loco {

StandardizeResult standardize_columns(const DenseMatrix& m) {
    if (m.rows < 2) throw DimensionError("standardize_columns: need at least 2 rows");
    StandardizeResult r;
    r.matrix = DenseMatrix(m.rows, m.cols);
    r.means.resize(m.cols);
    r.sds.resize(m.cols);
    const double n = static_cast<double>(m.rows);
    const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(m.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < nc; ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        const double* src = m.col(j);
        double* dst = r.matrix.col(j);
        double mu = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) mu += src[i];
        mu /= n;
        double ss = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double d = src[i] - mu;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n);  // divisor-n
        r.means[j] = mu;
        r.sds[j] = sd;
        if (sd == 0.0) {
            for (std::size_t i = 0; i < m.rows; ++i) dst[i] = 0.0;
        } else {
            const double inv = 1.0 / sd;
            for (std::size_t i = 0; i < m.rows; ++i) dst[i] = (src[i] - mu) * inv;
        }
    }
    for (std::size_t j = 0; j < m.cols; ++j)
        if (r.sds[j] == 0.0) r.zero_variance_cols.push_back(j);
    return r;
}

DenseMatrix apply_standardization(const DenseMatrix& m, const Vector& means, const Vector& sds) {
    require(m.cols == means.size() && m.cols == sds.size(),
            "apply_standardization: statistics length mismatch");
    DenseMatrix out(m.rows, m.cols);
    const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(m.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < nc; ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        const double* src = m.col(j);
        double* dst = out.col(j);
        if (sds[j] == 0.0) {
            for (std::size_t i = 0; i < m.rows; ++i) dst[i] = 0.0;
        } else {
            const double inv = 1.0 / sds[j];
            for (std::size_t i = 0; i < m.rows; ++i) dst[i] = (src[i] - means[j]) * inv;
        }
    }
    return out;
}

DenseMatrix cholesky(const DenseMatrix& s) {
    require(s.rows == s.cols, "cholesky: square matrix required");
    const std::size_t n = s.rows;
    DenseMatrix l = s;
    for (std::size_t k = 0; k < n; ++k) {
        double piv = l(k, k);
        if (piv <= 0.0 || !std::isfinite(piv))
            throw DecompositionError("cholesky: non-positive pivot (matrix not PD)");
        piv = std::sqrt(piv);
        l(k, k) = piv;
        const double inv = 1.0 / piv;
        for (std::size_t i = k + 1; i < n; ++i) l(i, k) *= inv;
        const std::ptrdiff_t nj = static_cast<std::ptrdiff_t>(n);
        // trailing update, lower triangle only
#pragma omp parallel for schedule(static) if (n - k > 128)
        for (std::ptrdiff_t jj = static_cast<std::ptrdiff_t>(k) + 1; jj < nj; ++jj) {
            const std::size_t j = static_cast<std::size_t>(jj);
            const double ljk = l(j, k);
            if (ljk == 0.0) continue;
            double* colj = l.col(j);
            const double* colk = l.col(k);
            for (std::size_t i = j; i < n; ++i) colj[i] -= colk[i] * ljk;
        }
    }
    // zero out the strict upper triangle
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) l(i, j) = 0.0;
    return l;
}

Vector cholesky_solve(const DenseMatrix& l, const Vector& b) {
    require(l.rows == l.cols && l.rows == b.size(), "cholesky_solve: shape mismatch");
    const std::size_t n = l.rows;
    Vector y = b;
    for (std::size_t i = 0; i < n; ++i) {
        double s = y[i];
        const double* row = l.data.data() + i;
        for (std::size_t j = 0; j < i; ++j) s -= row[j * n] * y[j];
        y[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        const double* coli = l.col(ii);
        for (std::size_t j = ii + 1; j < n; ++j) s -= coli[j] * y[j];
        y[ii] = s / l(ii, ii);
    }
    return y;
}

namespace {

void check_symmetric(const DenseMatrix& s) {
    require(s.rows == s.cols, "sym_eigen: square matrix required");
    double maxabs = 0.0;
    for (double v : s.data) maxabs = std::max(maxabs, std::abs(v));
    const double tol = 1e-8 * std::max(maxabs, 1.0);
    for (std::size_t j = 0; j < s.cols; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (std::abs(s(i, j) - s(j, i)) > tol)
                throw ValidationError("sym_eigen: input is not symmetric");
}

// Cyclic Jacobi. Rotates (p,q) pairs in row-cyclic order until off-diagonal
// mass is negligible. a is overwritten with the diagonalized matrix; v
// accumulates rotations when non-null.
void jacobi(DenseMatrix& a, DenseMatrix* v) {
    const std::size_t n = a.rows;
    if (v) *v = DenseMatrix::identity(n);
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(j, j)));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) return;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-14 * scale * static_cast<double>(n)) return;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                if (v) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double vip = (*v)(i, p);
                        const double viq = (*v)(i, q);
                        (*v)(i, p) = c * vip - s * viq;
                        (*v)(i, q) = s * vip + c * viq;
                    }
                }
            }
        }
    }
}

}  // namespace

Vector sym_eigenvalues(const DenseMatrix& s) {
    check_symmetric(s);
    DenseMatrix a = s;
    jacobi(a, nullptr);
    Vector vals(s.rows);
    for (std::size_t i = 0; i < s.rows; ++i) vals[i] = a(i, i);
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    return vals;
}

SymEigen sym_eigen(const DenseMatrix& s) {
    check_symmetric(s);
    DenseMatrix a = s;
    DenseMatrix v;
    jacobi(a, &v);
    const std::size_t n = s.rows;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymEigen out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

double sym_spectral_norm(const DenseMatrix& s) {
    const Vector vals = sym_eigenvalues(s);
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

ThinSvd thin_svd(const DenseMatrix& x) {
    const bool rows_smaller = x.rows <= x.cols;
    ThinSvd out;
    if (rows_smaller) {
        // eigen of X X^T (n x n); U from eigenvectors, V = X^T U / sigma
        const DenseMatrix xt = transpose(x);
        const DenseMatrix g = gram(xt);  // (X^T)^T X^T = X X^T
        const SymEigen e = sym_eigen(g);
        double smax = std::sqrt(std::max(e.values.front(), 0.0));
        // the Gram route floors eigenvalue accuracy near eps * sigma_max^2,
        // i.e. sqrt(eps) * sigma_max on the singular value scale
        for (std::size_t j = 0; j < e.values.size(); ++j) {
            const double sv = std::sqrt(std::max(e.values[j], 0.0));
            if (sv > 1e-7 * smax && sv > 0.0) ++out.rank; else break;
        }
        out.singular_values.resize(out.rank);
        out.u = DenseMatrix(x.rows, out.rank);
        out.v = DenseMatrix(x.cols, out.rank);
        for (std::size_t j = 0; j < out.rank; ++j) {
            const double sv = std::sqrt(e.values[j]);
            out.singular_values[j] = sv;
            Vector uj(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i) uj[i] = e.vectors(i, j);
            for (std::size_t i = 0; i < x.rows; ++i) out.u(i, j) = uj[i];
            const Vector vj = matvec_t(x, uj);  // X^T u
            for (std::size_t i = 0; i < x.cols; ++i) out.v(i, j) = vj[i] / sv;
        }
    } else {
        // eigen of X^T X (p x p); V from eigenvectors, U = X V / sigma
        const DenseMatrix g = gram(x);
        const SymEigen e = sym_eigen(g);
        double smax = std::sqrt(std::max(e.values.front(), 0.0));
        for (std::size_t j = 0; j < e.values.size(); ++j) {
            const double sv = std::sqrt(std::max(e.values[j], 0.0));
            if (sv > 1e-7 * smax && sv > 0.0) ++out.rank; else break;
        }
        out.singular_values.resize(out.rank);
        out.u = DenseMatrix(x.rows, out.rank);
        out.v = DenseMatrix(x.cols, out.rank);
        for (std::size_t j = 0; j < out.rank; ++j) {
            const double sv = std::sqrt(e.values[j]);
            out.singular_values[j] = sv;
            Vector vj(x.cols);
            for (std::size_t i = 0; i < x.cols; ++i) vj[i] = e.vectors(i, j);
            for (std::size_t i = 0; i < x.cols; ++i) out.v(i, j) = vj[i];
            const Vector uj = matvec(x, vj);
            for (std::size_t i = 0; i < x.rows; ++i) out.u(i, j) = uj[i] / sv;
        }
    }
    return out;
}

}  // namespace loco
