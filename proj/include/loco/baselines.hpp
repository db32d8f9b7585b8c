#pragma once

#include <cstdint>

#include "loco/matrix.hpp"
#include "loco/projection.hpp"

namespace loco {

/// Single-machine comparison estimators. Each one returns coefficients of
/// length p, in the original feature space.

/// diag(X^T X)^-1 X^T y: per-coordinate least squares that ignores all
/// cross-feature correlation.
Vector diagonal_approx(const DenseMatrix& x, const Vector& y);

/// Compress the feature space p -> tau_subs with a random projection, solve
/// ridge there, and map the coefficients back with the same projection.
Vector column_compression(const DenseMatrix& x, const Vector& y, double lambda,
                          std::size_t tau_subs, std::uint64_t seed,
                          ProjectionKind kind = ProjectionKind::Sparse);

/// Compress the sample dimension n -> n_subs, projecting X and y jointly
/// with one realized operator, then solve ridge on the compressed problem.
Vector row_compression(const DenseMatrix& x, const Vector& y, double lambda,
                       std::size_t n_subs, std::uint64_t seed,
                       ProjectionKind kind = ProjectionKind::Sparse);

}  // namespace loco
