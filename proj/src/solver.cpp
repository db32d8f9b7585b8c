#include "loco/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/rng.hpp"

namespace loco {

namespace {

DenseMatrix shifted_gram(const DenseMatrix& m, double shift) {
    DenseMatrix g = gram(m);
    for (std::size_t i = 0; i < g.rows; ++i) g(i, i) += shift;
    return g;
}

}  // namespace

RidgeFactor::RidgeFactor(const DenseMatrix& x, double lambda) : x_(&x), lambda_(lambda) {
    if (lambda < 0.0) throw ConfigError("ridge: lambda must be nonnegative");
    require(x.rows >= 1 && x.cols >= 1, "ridge: empty design matrix");
    const double shift = static_cast<double>(x.rows) * lambda;
    dual_ = x.cols > x.rows;
    try {
        if (dual_) {
            const DenseMatrix xt = transpose(x);
            chol_ = cholesky(shifted_gram(xt, shift));  // X X^T + n*lambda*I
        } else {
            chol_ = cholesky(shifted_gram(x, shift));  // X^T X + n*lambda*I
        }
    } catch (const DecompositionError&) {
        if (lambda == 0.0)
            throw RankError("ridge: singular system at lambda = 0; use ols_min_norm");
        throw;
    }
}

Vector RidgeFactor::solve(const Vector& y) const {
    require(y.size() == x_->rows, "ridge: response length mismatch");
    if (dual_) {
        const Vector alpha = cholesky_solve(chol_, y);
        return matvec_t(*x_, alpha);
    }
    const Vector xty = matvec_t(*x_, y);
    return cholesky_solve(chol_, xty);
}

Vector ridge_closed_form(const RidgeProblem& p) {
    const RidgeFactor factor(p.x, p.lambda);
    Vector beta = factor.solve(p.y);

    // normal-equation residual: X^T(X b) + n*lambda*b - X^T y
    const Vector xty = matvec_t(p.x, p.y);
    const Vector xb = matvec(p.x, beta);
    Vector resid = matvec_t(p.x, xb);
    const double shift = static_cast<double>(p.x.rows) * p.lambda;
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] += shift * beta[i] - xty[i];
    const double rhs_norm = norm2(xty);
    if (rhs_norm > 0.0 && norm2(resid) >= 1e-8 * rhs_norm)
        throw DecompositionError("ridge: normal-equation residual exceeds tolerance");
    return beta;
}

double ridge_objective(const RidgeProblem& p, const Vector& beta) {
    const Vector fitted = matvec(p.x, beta);
    double loss = 0.0;
    for (std::size_t i = 0; i < p.y.size(); ++i) {
        const double r = p.y[i] - fitted[i];
        loss += r * r;
    }
    return loss / static_cast<double>(p.y.size()) + p.lambda * norm2_sq(beta);
}

std::pair<Vector, SolverDiagnostics> ridge_sdca(const RidgeProblem& p, double gap_tol,
                                                std::size_t max_epochs, std::uint64_t seed) {
    if (p.lambda <= 0.0)
        throw ConfigError("ridge_sdca: lambda must be positive (strong convexity required)");
    const std::size_t n = p.x.rows;
    const std::size_t d = p.x.cols;
    require(p.y.size() == n, "ridge_sdca: response length mismatch");

    const auto t0 = std::chrono::steady_clock::now();
    const double lambda = p.lambda;
    const double nn = static_cast<double>(n);

    // Dual of n^-1||y - Xb||^2 + lambda||b||^2:
    //   D(a) = a.y - (n/4)||a||^2 - ||X^T a||^2 / (4 lambda),  b(a) = X^T a / (2 lambda)
    // Per-coordinate maximization is available in closed form.
    const DenseMatrix xrows = transpose(p.x);  // column i = row i of X
    Vector row_sq(n);
    for (std::size_t i = 0; i < n; ++i) row_sq[i] = dot(xrows.col(i), xrows.col(i), d);

    Vector alpha(n, 0.0);
    Vector beta(d, 0.0);
    SolverDiagnostics diag;
    diag.converged = false;

    auto duality_gap = [&]() {
        // refresh beta from alpha so the certificate is exact
        Vector b = matvec_t(p.x, alpha);
        for (double& v : b) v /= 2.0 * lambda;
        beta = b;
        const Vector fitted = matvec(p.x, beta);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = p.y[i] - fitted[i];
            loss += r * r;
        }
        const double primal_like = loss / nn + 2.0 * lambda * norm2_sq(beta);
        return primal_like - dot(alpha, p.y) + 0.25 * nn * norm2_sq(alpha);
    };

    Rng rng = Rng::keyed(seed, 0x5dca);
    double gap = duality_gap();
    if (gap <= gap_tol) diag.converged = true;

    for (std::size_t epoch = 0; epoch < max_epochs && !diag.converged; ++epoch) {
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t i = static_cast<std::size_t>(rng.below(n));
            const double* xi = xrows.col(i);
            const double q = row_sq[i] / (2.0 * lambda);
            const double pred = dot(xi, beta.data(), d);
            const double new_alpha = (p.y[i] - pred + alpha[i] * q) / (0.5 * nn + q);
            const double delta = new_alpha - alpha[i];
            if (delta != 0.0) {
                alpha[i] = new_alpha;
                axpy(delta / (2.0 * lambda), xi, beta.data(), d);
            }
        }
        diag.epochs = epoch + 1;
        gap = duality_gap();
        if (gap <= gap_tol) {
            diag.converged = true;
            break;
        }
    }

    diag.gap = gap;
    diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {beta, diag};
}

Vector ols_min_norm(const DenseMatrix& x, const Vector& y) {
    const std::size_t n = x.rows;
    const std::size_t d = x.cols;
    require(y.size() == n, "ols_min_norm: response length mismatch");
    double trace = 0.0;
    for (double v : x.data) trace += v * v;
    if (trace == 0.0) return Vector(d, 0.0);

    const double lambda0 = 1e-10 * trace / (static_cast<double>(n) * static_cast<double>(d));
    auto solve_at = [&](double lambda) { return RidgeFactor(x, lambda).solve(y); };
    auto rel_diff = [](const Vector& a, const Vector& b) {
        const double denom = std::max(norm2(b), 1e-300);
        return norm2(sub(a, b)) / denom;
    };

    Vector beta = solve_at(lambda0);
    const Vector halved = solve_at(0.5 * lambda0);
    if (rel_diff(halved, beta) < 1e-7) return halved;

    // Halving perturbed the solution, so lambda0 is already inside the
    // rounding-dominated regime of a rank-deficient system. Walk lambda up
    // until two successive solutions agree; the remaining ridge bias there is
    // below the agreement tolerance.
    double lambda = lambda0;
    for (int iter = 0; iter < 10; ++iter) {
        lambda *= 4.0;
        const Vector next = solve_at(lambda);
        const bool settled = rel_diff(next, beta) < 1e-7;
        beta = next;
        if (settled) break;
    }
    return beta;
}

double residual_coefficient(const DenseMatrix& x, const Vector& y, std::size_t j) {
    require(j < x.cols, "residual_coefficient: column index out of range");
    const std::size_t n = x.rows;
    const std::size_t d = x.cols;
    DenseMatrix others(n, d - 1);
    for (std::size_t c = 0, o = 0; c < d; ++c) {
        if (c == j) continue;
        std::copy(x.col(c), x.col(c) + n, others.col(o));
        ++o;
    }
    Vector xj(x.col(j), x.col(j) + n);
    const Vector gamma = (d > 1) ? ols_min_norm(others, xj) : Vector();
    Vector z = xj;
    if (d > 1) {
        const Vector fitted = matvec(others, gamma);
        for (std::size_t i = 0; i < n; ++i) z[i] -= fitted[i];
    }
    const double zn = norm2(z);
    if (zn < 1e-10 * norm2(xj))
        throw CollinearityError("residual_coefficient: column is collinear with the rest");
    return dot(z, y) / dot(z, xj);
}

}  // namespace loco
