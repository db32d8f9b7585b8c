#pragma once

#include "loco/matrix.hpp"

namespace loco {

// Dense kernels used throughout the library. Each has an OpenMP variant (the
// default entry point) and a plain serial reference implementation kept for
// testing and benchmarking. Parallelism is always across independent output
// elements with a fixed serial summation order per element, so results are
// bit-identical for any thread count.

// C = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_serial(const DenseMatrix& a, const DenseMatrix& b);

// G = M^T M  (q x q for M m x q)
DenseMatrix gram(const DenseMatrix& m);
DenseMatrix gram_serial(const DenseMatrix& m);

// y = A x
Vector matvec(const DenseMatrix& a, const Vector& x);
Vector matvec_serial(const DenseMatrix& a, const Vector& x);

// y = A^T x
Vector matvec_t(const DenseMatrix& a, const Vector& x);
Vector matvec_t_serial(const DenseMatrix& a, const Vector& x);

DenseMatrix transpose(const DenseMatrix& a);

// Frobenius norm of A - B
double frobenius_diff(const DenseMatrix& a, const DenseMatrix& b);
double frobenius(const DenseMatrix& a);

// Max |A(i,j) - B(i,j)|
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

// Effective thread count used by the OpenMP kernels (1 when built without OpenMP).
int max_threads();

}  // namespace loco
