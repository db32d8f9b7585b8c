#pragma once

#include <vector>

#include "loco/matrix.hpp"

namespace loco {

struct StandardizeResult {
    DenseMatrix matrix;
    std::vector<std::size_t> zero_variance_cols;  // returned as all-zero columns
    Vector means;
    Vector sds;  // divisor-n standard deviations (0 for flagged columns)
};

/// Center each column to mean 0 and scale to standard deviation 1
/// (divisor-n convention). Zero-variance columns become all-zero and are
/// flagged rather than an error.
StandardizeResult standardize_columns(const DenseMatrix& m);

/// Apply a previously fitted standardization (train statistics) to new rows.
DenseMatrix apply_standardization(const DenseMatrix& m, const Vector& means, const Vector& sds);

/// Lower-triangular L with L L^T = S. Throws DecompositionError on a
/// non-positive pivot.
DenseMatrix cholesky(const DenseMatrix& s);

/// Solve L L^T x = b given the Cholesky factor.
Vector cholesky_solve(const DenseMatrix& l, const Vector& b);

struct SymEigen {
    Vector values;       // descending
    DenseMatrix vectors; // column j pairs with values[j]
};

/// Eigenvalues of a symmetric matrix, sorted descending.
/// Cyclic Jacobi; intended for the moderate sizes this project needs.
Vector sym_eigenvalues(const DenseMatrix& s);

/// Full symmetric eigendecomposition (values descending, matching vectors).
SymEigen sym_eigen(const DenseMatrix& s);

/// Spectral norm of a symmetric matrix (largest |eigenvalue|).
double sym_spectral_norm(const DenseMatrix& s);

/// Thin SVD factors of X obtained through the Gram matrix on the smaller
/// side. Columns of u / v span the rank-r left/right singular subspaces;
/// rank counts singular values above 1e-10 * sigma_max.
struct ThinSvd {
    Vector singular_values;  // descending, length rank
    DenseMatrix u;           // n x rank
    DenseMatrix v;           // p x rank
    std::size_t rank = 0;
};
ThinSvd thin_svd(const DenseMatrix& x);

}  // namespace loco
