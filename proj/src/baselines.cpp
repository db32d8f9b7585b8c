#include "loco/baselines.hpp"

#include "loco/kernels.hpp"
#include "loco/solver.hpp"

namespace loco {

Vector diagonal_approx(const DenseMatrix& x, const Vector& y) {
    require(y.size() == x.rows, "diagonal_approx: response length mismatch");
    Vector beta(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        const double nrm = dot(x.col(j), x.col(j), x.rows);
        if (nrm == 0.0)
            throw DegenerateError("diagonal_approx: zero-norm column " + std::to_string(j));
        beta[j] = dot(x.col(j), y.data(), x.rows) / nrm;
    }
    return beta;
}

Vector column_compression(const DenseMatrix& x, const Vector& y, double lambda,
                          std::size_t tau_subs, std::uint64_t seed, ProjectionKind kind) {
    require(y.size() == x.rows, "column_compression: response length mismatch");
    if (tau_subs < 1 || tau_subs > x.cols)
        throw DimensionError("column_compression: need 1 <= tau_subs <= p");
    ProjectionSpec spec{kind, x.cols, tau_subs, seed};
    if (kind == ProjectionKind::Srht) {
        const SrhtProjection pi(spec);
        const DenseMatrix compressed = pi.apply_columns(x);
        const Vector alpha = RidgeFactor(compressed, lambda).solve(y);
        return pi.up_apply(alpha);
    }
    const SparseProjection pi(spec);
    const DenseMatrix compressed = pi.apply_columns(x);
    const Vector alpha = RidgeFactor(compressed, lambda).solve(y);
    return pi.up_apply(alpha);
}

Vector row_compression(const DenseMatrix& x, const Vector& y, double lambda,
                       std::size_t n_subs, std::uint64_t seed, ProjectionKind kind) {
    require(y.size() == x.rows, "row_compression: response length mismatch");
    if (n_subs < 1 || n_subs > x.rows)
        throw DimensionError("row_compression: need 1 <= n_subs <= n");
    ProjectionSpec spec{kind, x.rows, n_subs, seed};

    // the same realized operator compresses the columns of X and y, so the
    // compressed pair is still a consistent linear model
    auto compress = [&](auto& pi) {
        DenseMatrix xc(n_subs, x.cols);
        for (std::size_t j = 0; j < x.cols; ++j) {
            const Vector cj(x.col(j), x.col(j) + x.rows);
            const Vector out = pi.down_apply(cj);
            std::copy(out.begin(), out.end(), xc.col(j));
        }
        const Vector yc = pi.down_apply(y);
        return RidgeFactor(xc, lambda).solve(yc);
    };
    if (kind == ProjectionKind::Srht) {
        const SrhtProjection pi(spec);
        return compress(pi);
    }
    const SparseProjection pi(spec);
    return compress(pi);
}

}  // namespace loco
