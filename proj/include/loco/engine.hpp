#pragma once

#include <cstdint>
#include <vector>

#include "loco/matrix.hpp"
#include "loco/projection.hpp"
#include "loco/solver.hpp"

namespace loco {

/// Disjoint index blocks covering {0..p-1}, sizes differing by at most one.
struct FeaturePartition {
    std::size_t p = 0;
    std::vector<std::vector<std::size_t>> blocks;

    std::size_t num_blocks() const { return blocks.size(); }
};

/// Uniform-random balanced partition, deterministic given seed. Blocks
/// 0..(p mod K - 1) carry the extra feature when K does not divide p.
FeaturePartition partition_features(std::size_t p, std::size_t k, std::uint64_t seed);

enum class SolverChoice { ClosedForm, Sdca };

struct SdcaParams {
    double gap_tol = 1e-8;
    std::size_t max_epochs = 100;
};

struct LocoConfig {
    std::size_t num_workers = 1;  // K
    // Sketch size per contributing block. Exactly one of tau_subs / ratio is
    // used: tau_subs > 0 wins, otherwise (K-1)*tau_subs = ratio*(p - tau)
    // split evenly (rounded down, minimum 1 per contributor).
    std::size_t tau_subs = 0;
    double ratio = 0.0;
    double lambda = 0.1;
    MergeMode merge = MergeMode::Concatenate;
    ProjectionKind projection = ProjectionKind::Srht;
    SolverChoice solver = SolverChoice::ClosedForm;
    SdcaParams sdca;
    std::uint64_t seed = 0;
    int threads = 0;  // worker threads; 0 = min(K, hardware)
};

struct WorkerReport {
    std::size_t worker_id = 0;
    double project_seconds = 0.0;
    double merge_seconds = 0.0;
    double solve_seconds = 0.0;
    SolverDiagnostics solver;
};

struct FitResult {
    Vector beta;  // length p, original coordinate order
    FeaturePartition partition;
    std::size_t tau_subs = 0;  // resolved per-contributor sketch size (0 when K = 1)
    std::vector<WorkerReport> workers;
    std::size_t publish_count = 0;  // projection store writes (== K)
    std::size_t read_count = 0;     // projection store reads (== K*(K-1))
    double total_seconds = 0.0;
};

/// Per-contributor sketch size implied by cfg for a p-column problem.
std::size_t resolve_tau_subs(const LocoConfig& cfg, std::size_t p);

/// tau + (K-1)*tau_subs with tau = ceil(p/K): the column count of each
/// worker's local problem under the concatenate merge.
std::size_t local_dimension(const LocoConfig& cfg, std::size_t p);

/// One-shot feature-distributed ridge fit. Workers run in parallel: each
/// projects its own block, publishes the sketch to a shared store, and after
/// a single barrier reads the other workers' sketches, solves ridge on
/// [raw block | merged sketches] and writes the raw-feature coefficients
/// into its slice of the output. Bit-identical for any thread count.
FitResult loco_fit(const DenseMatrix& x, const Vector& y, const LocoConfig& cfg);

/// Fixed-design plan: partition, projections and normal-equation factors are
/// built once so many responses can be fit against the same design (used for
/// Monte-Carlo expectations conditioned on the realized projections).
class LocoPlan {
public:
    LocoPlan(const DenseMatrix& x, const LocoConfig& cfg);

    // the factors point into designs_; moving keeps the heap buffers alive,
    // copying would not
    LocoPlan(const LocoPlan&) = delete;
    LocoPlan& operator=(const LocoPlan&) = delete;
    LocoPlan(LocoPlan&&) = default;
    LocoPlan& operator=(LocoPlan&&) = default;

    /// Coefficients for a new response on the fixed design.
    Vector fit(const Vector& y) const;

    const FeaturePartition& partition() const { return partition_; }
    std::size_t tau_subs() const { return tau_subs_; }
    /// Worker k's local design [raw | standardized sketches].
    const DenseMatrix& local_design(std::size_t k) const { return designs_[k]; }

private:
    std::size_t p_ = 0;
    FeaturePartition partition_;
    std::size_t tau_subs_ = 0;
    std::vector<DenseMatrix> designs_;
    std::vector<RidgeFactor> factors_;
};

}  // namespace loco
