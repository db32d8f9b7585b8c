#pragma once

#include <cstdint>
#include <vector>

#include "loco/matrix.hpp"

namespace loco {

enum class ProjectionKind { Srht, Sparse };

/// Seed + dimensions fully determine the realized projection operator, so a
/// spec can be shipped around instead of the matrix itself.
struct ProjectionSpec {
    ProjectionKind kind = ProjectionKind::Srht;
    std::size_t input_dim = 0;   // tau
    std::size_t output_dim = 0;  // tau_subs
    std::uint64_t seed = 0;
};

struct ProjectedBlock {
    std::size_t worker_id = 0;
    DenseMatrix data;  // n x tau_subs
};

enum class MergeMode { Concatenate, Sum };

/// In-place normalized Walsh-Hadamard transform of a power-of-two length
/// buffer: v <- H v with H orthonormal (H = H^T = H^-1). O(len log len).
void fwht_pow2(double* v, std::size_t len);

/// Normalized Walsh-Hadamard transform; length must be a power of two.
Vector fwht(const Vector& v);

std::size_t next_pow2(std::size_t n);

/// Subsampled randomized Hadamard transform of the columns of x:
/// sign-flip each column, mix with the fast Walsh-Hadamard transform (after
/// zero-padding the column count to a power of two), keep output_dim
/// columns sampled uniformly without replacement, and rescale by
/// sqrt(padded_dim / output_dim) so the operator is an isometry in
/// expectation. Deterministic given spec.seed.
ProjectedBlock srht_apply(const DenseMatrix& x, const ProjectionSpec& spec,
                          std::size_t worker_id = 0);

/// Sparse random projection: entries +1 / 0 / -1 with probabilities
/// 1/6, 2/3, 1/6, scaled by sqrt(3 / output_dim) so entry variance is
/// 1/output_dim. Deterministic given spec.seed.
ProjectedBlock sparse_apply(const DenseMatrix& x, const ProjectionSpec& spec,
                            std::size_t worker_id = 0);

ProjectedBlock project(const DenseMatrix& x, const ProjectionSpec& spec,
                       std::size_t worker_id = 0);

/// Combine the other workers' projections: Concatenate stacks them
/// column-wise in ascending worker_id order; Sum adds them entrywise.
/// The block with worker_id == self_id is skipped.
DenseMatrix merge_projections(const std::vector<ProjectedBlock>& blocks, MergeMode mode,
                              std::size_t self_id);

/// Explicit realization of a sparse projection (one compressed column per
/// output dimension). Used where the matrix itself is needed, e.g. to map
/// compressed coefficients back to the original space.
class SparseProjection {
public:
    explicit SparseProjection(const ProjectionSpec& spec);

    DenseMatrix apply_columns(const DenseMatrix& x) const;  // X * Pi
    Vector up_apply(const Vector& alpha) const;             // Pi * alpha
    Vector down_apply(const Vector& v) const;               // Pi^T * v

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return cols_.size(); }
    double scale() const { return scale_; }
    const std::vector<std::vector<std::pair<std::uint32_t, std::int8_t>>>& columns() const {
        return cols_;
    }

private:
    std::size_t input_dim_;
    double scale_;
    std::vector<std::vector<std::pair<std::uint32_t, std::int8_t>>> cols_;
};

/// Explicit realization of an SRHT operator with the same seed convention
/// as srht_apply.
class SrhtProjection {
public:
    explicit SrhtProjection(const ProjectionSpec& spec);

    DenseMatrix apply_columns(const DenseMatrix& x) const;  // X * Pi
    Vector up_apply(const Vector& alpha) const;             // Pi * alpha
    Vector down_apply(const Vector& v) const;               // Pi^T * v

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return sampled_.size(); }

private:
    std::size_t input_dim_;
    std::size_t padded_dim_;
    double scale_;
    std::vector<double> signs_;
    std::vector<std::size_t> sampled_;
};

}  // namespace loco
