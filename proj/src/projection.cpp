#include "loco/projection.hpp"

#include <algorithm>
#include <cmath>

#include "loco/kernels.hpp"
#include "loco/rng.hpp"

namespace loco {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fwht_pow2(double* v, std::size_t len) {
    for (std::size_t h = 1; h < len; h <<= 1) {
        for (std::size_t i = 0; i < len; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = v[j];
                const double b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
    const double inv = 1.0 / std::sqrt(static_cast<double>(len));
    for (std::size_t i = 0; i < len; ++i) v[i] *= inv;
}

Vector fwht(const Vector& v) {
    const std::size_t len = v.size();
    if (len == 0 || (len & (len - 1)) != 0)
        throw DimensionError("fwht: length must be a power of two");
    Vector out = v;
    fwht_pow2(out.data(), len);
    return out;
}

namespace {

void validate_spec(const DenseMatrix& x, const ProjectionSpec& spec) {
    require(x.cols == spec.input_dim, "projection: input_dim does not match matrix columns");
    if (spec.output_dim < 1 || spec.output_dim > spec.input_dim)
        throw DimensionError("projection: need 1 <= output_dim <= input_dim");
}

}  // namespace

SrhtProjection::SrhtProjection(const ProjectionSpec& spec)
    : input_dim_(spec.input_dim), padded_dim_(next_pow2(spec.input_dim)) {
    if (spec.output_dim < 1 || spec.output_dim > spec.input_dim)
        throw DimensionError("projection: need 1 <= output_dim <= input_dim");
    Rng rng = Rng::keyed(spec.seed, 0x5274);
    signs_.resize(input_dim_);
    for (std::size_t i = 0; i < input_dim_; ++i) signs_[i] = rng.sign();
    sampled_ = rng.sample_without_replacement(padded_dim_, spec.output_dim);
    // the scale factor uses the padded dimension
    scale_ = std::sqrt(static_cast<double>(padded_dim_) / static_cast<double>(spec.output_dim));
}

DenseMatrix SrhtProjection::apply_columns(const DenseMatrix& x) const {
    require(x.cols == input_dim_, "srht: column count mismatch");
    const std::size_t n = x.rows;
    const std::size_t k = sampled_.size();
    const DenseMatrix xt = transpose(x);  // row i of x is contiguous
    DenseMatrix out_t(k, n);
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
    {
        Vector buf(padded_dim_);
#pragma omp for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < nn; ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            const double* row = xt.col(i);
            for (std::size_t c = 0; c < input_dim_; ++c) buf[c] = row[c] * signs_[c];
            std::fill(buf.begin() + static_cast<std::ptrdiff_t>(input_dim_), buf.end(), 0.0);
            fwht_pow2(buf.data(), padded_dim_);
            double* dst = out_t.col(i);
            for (std::size_t j = 0; j < k; ++j) dst[j] = buf[sampled_[j]] * scale_;
        }
    }
    return transpose(out_t);
}

Vector SrhtProjection::up_apply(const Vector& alpha) const {
    require(alpha.size() == sampled_.size(), "srht: coefficient length mismatch");
    // Pi a = scale * D H S a: scatter into sampled slots, transform, sign-flip
    Vector buf(padded_dim_, 0.0);
    for (std::size_t j = 0; j < sampled_.size(); ++j) buf[sampled_[j]] = alpha[j];
    fwht_pow2(buf.data(), padded_dim_);
    Vector out(input_dim_);
    for (std::size_t c = 0; c < input_dim_; ++c) out[c] = buf[c] * signs_[c] * scale_;
    return out;
}

Vector SrhtProjection::down_apply(const Vector& v) const {
    require(v.size() == input_dim_, "srht: vector length mismatch");
    Vector buf(padded_dim_, 0.0);
    for (std::size_t c = 0; c < input_dim_; ++c) buf[c] = v[c] * signs_[c];
    fwht_pow2(buf.data(), padded_dim_);
    Vector out(sampled_.size());
    for (std::size_t j = 0; j < sampled_.size(); ++j) out[j] = buf[sampled_[j]] * scale_;
    return out;
}

ProjectedBlock srht_apply(const DenseMatrix& x, const ProjectionSpec& spec,
                          std::size_t worker_id) {
    validate_spec(x, spec);
    const SrhtProjection pi(spec);
    return ProjectedBlock{worker_id, pi.apply_columns(x)};
}

SparseProjection::SparseProjection(const ProjectionSpec& spec) : input_dim_(spec.input_dim) {
    if (spec.output_dim < 1 || spec.output_dim > spec.input_dim)
        throw DimensionError("projection: need 1 <= output_dim <= input_dim");
    scale_ = std::sqrt(3.0 / static_cast<double>(spec.output_dim));
    Rng rng = Rng::keyed(spec.seed, 0x59a5);
    cols_.resize(spec.output_dim);
    for (std::size_t j = 0; j < spec.output_dim; ++j) {
        for (std::size_t i = 0; i < input_dim_; ++i) {
            const double u = rng.uniform();
            if (u < 1.0 / 6.0)
                cols_[j].emplace_back(static_cast<std::uint32_t>(i), std::int8_t{1});
            else if (u < 1.0 / 3.0)
                cols_[j].emplace_back(static_cast<std::uint32_t>(i), std::int8_t{-1});
        }
    }
}

DenseMatrix SparseProjection::apply_columns(const DenseMatrix& x) const {
    require(x.cols == input_dim_, "sparse projection: column count mismatch");
    const std::size_t n = x.rows;
    DenseMatrix out(n, cols_.size());
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(cols_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < k; ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        double* dst = out.col(j);
        for (const auto& [idx, sign] : cols_[j])
            axpy(sign > 0 ? scale_ : -scale_, x.col(idx), dst, n);
    }
    return out;
}

Vector SparseProjection::up_apply(const Vector& alpha) const {
    require(alpha.size() == cols_.size(), "sparse projection: coefficient length mismatch");
    Vector out(input_dim_, 0.0);
    for (std::size_t j = 0; j < cols_.size(); ++j) {
        const double aj = alpha[j] * scale_;
        for (const auto& [idx, sign] : cols_[j]) out[idx] += sign > 0 ? aj : -aj;
    }
    return out;
}

Vector SparseProjection::down_apply(const Vector& v) const {
    require(v.size() == input_dim_, "sparse projection: vector length mismatch");
    Vector out(cols_.size(), 0.0);
    for (std::size_t j = 0; j < cols_.size(); ++j) {
        double s = 0.0;
        for (const auto& [idx, sign] : cols_[j]) s += sign > 0 ? v[idx] : -v[idx];
        out[j] = s * scale_;
    }
    return out;
}

ProjectedBlock sparse_apply(const DenseMatrix& x, const ProjectionSpec& spec,
                            std::size_t worker_id) {
    validate_spec(x, spec);
    const SparseProjection pi(spec);
    return ProjectedBlock{worker_id, pi.apply_columns(x)};
}

ProjectedBlock project(const DenseMatrix& x, const ProjectionSpec& spec, std::size_t worker_id) {
    return spec.kind == ProjectionKind::Srht ? srht_apply(x, spec, worker_id)
                                             : sparse_apply(x, spec, worker_id);
}

DenseMatrix merge_projections(const std::vector<ProjectedBlock>& blocks, MergeMode mode,
                              std::size_t self_id) {
    std::vector<const ProjectedBlock*> others;
    for (const auto& b : blocks)
        if (b.worker_id != self_id) others.push_back(&b);
    require(!others.empty(), "merge_projections: no blocks to merge");
    std::sort(others.begin(), others.end(),
              [](const ProjectedBlock* a, const ProjectedBlock* b) {
                  return a->worker_id < b->worker_id;
              });
    const std::size_t n = others.front()->data.rows;
    for (const auto* b : others)
        require(b->data.rows == n, "merge_projections: row count mismatch across blocks");

    if (mode == MergeMode::Concatenate) {
        std::size_t total = 0;
        for (const auto* b : others) total += b->data.cols;
        DenseMatrix out(n, total);
        std::size_t at = 0;
        for (const auto* b : others) {
            std::copy(b->data.data.begin(), b->data.data.end(), out.col(at));
            at += b->data.cols;
        }
        return out;
    }
    const std::size_t k = others.front()->data.cols;
    for (const auto* b : others)
        require(b->data.cols == k, "merge_projections: sum mode needs equal column counts");
    DenseMatrix out(n, k);
    for (const auto* b : others)
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b->data.data[i];
    return out;
}

}  // namespace loco
