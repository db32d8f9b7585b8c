#pragma once

#include <cstdint>
#include <utility>

#include "loco/matrix.hpp"

namespace loco {

struct RidgeProblem {
    DenseMatrix x;  // n x d
    Vector y;       // n
    double lambda = 0.0;
};

struct SolverDiagnostics {
    std::size_t epochs = 0;
    double gap = 0.0;      // final duality gap (SDCA) or normal-equation residual
    double seconds = 0.0;
    bool converged = true;
};

/// Reusable factorization of the ridge normal equations at fixed (X, lambda).
/// Solves the d x d primal system when d <= n and the n x n dual system
/// (X X^T + n*lambda*I) alpha = y, beta = X^T alpha otherwise. Holds a
/// pointer to the design matrix; the caller keeps it alive.
class RidgeFactor {
public:
    RidgeFactor(const DenseMatrix& x, double lambda);

    /// Minimizer of n^-1 ||y - X b||^2 + lambda ||b||^2 for a new response.
    Vector solve(const Vector& y) const;

    bool dual_route() const { return dual_; }

private:
    const DenseMatrix* x_;
    double lambda_;
    bool dual_;
    DenseMatrix chol_;  // factor of X^T X + n*lambda*I or X X^T + n*lambda*I
};

/// Exact ridge solution via the normal equations; verifies the residual
/// ||(X^T X + n*lambda*I) b - X^T y|| < 1e-8 ||X^T y||.
Vector ridge_closed_form(const RidgeProblem& p);

/// Value of the ridge objective n^-1 ||y - X b||^2 + lambda ||b||^2.
double ridge_objective(const RidgeProblem& p, const Vector& beta);

/// Stochastic dual coordinate ascent for the ridge objective. Coordinates
/// are sampled uniformly at random each inner step; the run is a
/// deterministic function of the seed. Stops when the duality gap drops
/// below gap_tol or after max_epochs epochs (flagged in diagnostics).
std::pair<Vector, SolverDiagnostics> ridge_sdca(const RidgeProblem& p, double gap_tol,
                                                std::size_t max_epochs,
                                                std::uint64_t seed = 0);

/// Least squares solution of minimal l2 norm, computed as the small-lambda
/// limit of ridge and checked for stability under halving lambda.
Vector ols_min_norm(const DenseMatrix& x, const Vector& y);

/// OLS coefficient j through the residual identity: regress column j on the
/// remaining columns, then beta_j = (z . y) / (z . x_j) with z the residual.
double residual_coefficient(const DenseMatrix& x, const Vector& y, std::size_t j);

}  // namespace loco
