#include "loco/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>

#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loco {

FeaturePartition partition_features(std::size_t p, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("partition_features: K must be at least 1");
    if (k > p) throw ConfigError("partition_features: K exceeds the number of features");
    std::vector<std::size_t> idx(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = i;
    Rng rng = Rng::keyed(seed, 0xb10c);
    rng.shuffle(idx);

    FeaturePartition part;
    part.p = p;
    part.blocks.resize(k);
    const std::size_t base = p / k;
    const std::size_t extra = p % k;
    std::size_t at = 0;
    for (std::size_t b = 0; b < k; ++b) {
        const std::size_t size = base + (b < extra ? 1 : 0);
        part.blocks[b].assign(idx.begin() + static_cast<std::ptrdiff_t>(at),
                              idx.begin() + static_cast<std::ptrdiff_t>(at + size));
        at += size;
    }
    return part;
}

std::size_t resolve_tau_subs(const LocoConfig& cfg, std::size_t p) {
    const std::size_t k = cfg.num_workers;
    if (k <= 1) return 0;
    const std::size_t tau = (p + k - 1) / k;
    if (cfg.tau_subs > 0) return cfg.tau_subs;
    if (cfg.ratio <= 0.0)
        throw ConfigError("loco: either tau_subs or a positive ratio is required when K > 1");
    const double total = cfg.ratio * static_cast<double>(p - tau);
    const std::size_t per = static_cast<std::size_t>(total / static_cast<double>(k - 1));
    return std::max<std::size_t>(1, per);
}

// Width of each published sketch. Concatenate stacks K-1 sketches of
// tau_subs columns; Sum adds K-1 sketches that each carry the full
// (K-1)*tau_subs budget (adding projections of disjoint blocks is one big
// projection), so both merges give X_bar the same column count.
static std::size_t sketch_width(const LocoConfig& cfg, std::size_t tau_subs) {
    return cfg.merge == MergeMode::Sum ? (cfg.num_workers - 1) * tau_subs : tau_subs;
}

std::size_t local_dimension(const LocoConfig& cfg, std::size_t p) {
    const std::size_t k = cfg.num_workers;
    if (k < 1) throw ConfigError("local_dimension: K must be at least 1");
    const std::size_t tau = (p + k - 1) / k;
    if (k == 1) return tau;
    return tau + (k - 1) * resolve_tau_subs(cfg, p);
}

namespace {

DenseMatrix extract_columns(const DenseMatrix& x, const std::vector<std::size_t>& cols) {
    DenseMatrix out(x.rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        std::copy(x.col(cols[j]), x.col(cols[j]) + x.rows, out.col(j));
    return out;
}

std::uint64_t worker_seed(std::uint64_t seed, std::size_t worker, std::uint64_t salt) {
    return Rng::keyed(seed, salt + worker).next_u64();
}

// [raw block | standardized merged sketches]
DenseMatrix build_local_design(const DenseMatrix& raw, const DenseMatrix& merged) {
    const StandardizeResult std_merged = standardize_columns(merged);
    DenseMatrix design(raw.rows, raw.cols + merged.cols);
    std::copy(raw.data.begin(), raw.data.end(), design.col(0));
    std::copy(std_merged.matrix.data.begin(), std_merged.matrix.data.end(),
              design.col(raw.cols));
    return design;
}

void validate_loco(const DenseMatrix& x, const Vector& y, const LocoConfig& cfg,
                   std::size_t tau_subs) {
    if (cfg.lambda <= 0.0) throw ConfigError("loco: lambda must be positive");
    require(y.size() == x.rows, "loco: response length mismatch");
    if (cfg.num_workers < 1) throw ConfigError("loco: K must be at least 1");
    if (cfg.num_workers > x.cols) throw ConfigError("loco: K exceeds the number of features");
    if (cfg.num_workers > 1) {
        const std::size_t smallest = x.cols / cfg.num_workers;
        if (sketch_width(cfg, tau_subs) > smallest)
            throw ConfigError("loco: sketch width exceeds the smallest block size");
    }
}

}  // namespace

FitResult loco_fit(const DenseMatrix& x, const Vector& y, const LocoConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::size_t p = x.cols;
    const std::size_t k = cfg.num_workers;
    const std::size_t tau_subs = resolve_tau_subs(cfg, p);
    validate_loco(x, y, cfg, tau_subs);

    FitResult result;
    result.partition = partition_features(p, k, cfg.seed);
    result.tau_subs = tau_subs;
    result.beta.assign(p, 0.0);
    result.workers.resize(k);

    std::vector<DenseMatrix> raw(k);
    std::vector<ProjectedBlock> store(k);
    std::atomic<std::size_t> published{0};
    std::atomic<std::size_t> reads{0};
    std::vector<std::exception_ptr> errors(k);

    int threads = cfg.threads;
    if (threads <= 0) threads = static_cast<int>(std::min<std::size_t>(k, max_threads()));

    auto now = [] { return std::chrono::steady_clock::now(); };
    auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };

#pragma omp parallel num_threads(threads)
    {
        // phase A: project own block and publish the sketch
#pragma omp for schedule(static)
        for (std::ptrdiff_t wk = 0; wk < static_cast<std::ptrdiff_t>(k); ++wk) {
            const std::size_t w = static_cast<std::size_t>(wk);
            try {
                const auto t0 = now();
                raw[w] = extract_columns(x, result.partition.blocks[w]);
                if (k > 1) {
                    ProjectionSpec spec;
                    spec.kind = cfg.projection;
                    spec.input_dim = raw[w].cols;
                    spec.output_dim = sketch_width(cfg, tau_subs);
                    spec.seed = worker_seed(cfg.seed, w, 0xa110c0);
                    store[w] = project(raw[w], spec, w);
                    published.fetch_add(1, std::memory_order_relaxed);
                }
                result.workers[w].worker_id = w;
                result.workers[w].project_seconds = secs(t0, now());
            } catch (...) {
                errors[w] = std::current_exception();
            }
        }
        // implicit barrier: the store is complete and read-only from here on

        // phase B: read the others' sketches, solve the local problem, fill
        // the owned slice of beta
#pragma omp for schedule(static)
        for (std::ptrdiff_t wk = 0; wk < static_cast<std::ptrdiff_t>(k); ++wk) {
            const std::size_t w = static_cast<std::size_t>(wk);
            if (errors[w]) continue;
            try {
                const auto t0 = now();
                DenseMatrix design;
                if (k > 1) {
                    const DenseMatrix merged = merge_projections(store, cfg.merge, w);
                    reads.fetch_add(k - 1, std::memory_order_relaxed);
                    design = build_local_design(raw[w], merged);
                } else {
                    design = std::move(raw[w]);
                }
                const auto t1 = now();
                result.workers[w].merge_seconds = secs(t0, t1);

                Vector local;
                if (cfg.solver == SolverChoice::ClosedForm) {
                    local = RidgeFactor(design, cfg.lambda).solve(y);
                } else {
                    RidgeProblem prob{design, y, cfg.lambda};
                    auto [beta, diag] = ridge_sdca(prob, cfg.sdca.gap_tol, cfg.sdca.max_epochs,
                                                   worker_seed(cfg.seed, w, 0x5d0a));
                    local = std::move(beta);
                    result.workers[w].solver = diag;
                }
                result.workers[w].solve_seconds = secs(t1, now());

                const auto& block = result.partition.blocks[w];
                for (std::size_t i = 0; i < block.size(); ++i) result.beta[block[i]] = local[i];
            } catch (...) {
                errors[w] = std::current_exception();
            }
        }
    }

    for (std::size_t w = 0; w < k; ++w) {
        if (!errors[w]) continue;
        try {
            std::rethrow_exception(errors[w]);
        } catch (const Error& e) {
            throw Error("worker " + std::to_string(w) + ": " + e.what());
        }
    }

    result.publish_count = published.load();
    result.read_count = reads.load();
    result.total_seconds = secs(t_start, now());
    return result;
}

LocoPlan::LocoPlan(const DenseMatrix& x, const LocoConfig& cfg) : p_(x.cols) {
    tau_subs_ = resolve_tau_subs(cfg, p_);
    validate_loco(x, Vector(x.rows, 0.0), cfg, tau_subs_);
    const std::size_t k = cfg.num_workers;
    partition_ = partition_features(p_, k, cfg.seed);

    std::vector<DenseMatrix> raw(k);
    std::vector<ProjectedBlock> store(k);
    for (std::size_t w = 0; w < k; ++w) {
        raw[w] = extract_columns(x, partition_.blocks[w]);
        if (k > 1) {
            ProjectionSpec spec;
            spec.kind = cfg.projection;
            spec.input_dim = raw[w].cols;
            spec.output_dim = sketch_width(cfg, tau_subs_);
            spec.seed = worker_seed(cfg.seed, w, 0xa110c0);
            store[w] = project(raw[w], spec, w);
        }
    }
    designs_.reserve(k);
    for (std::size_t w = 0; w < k; ++w) {
        if (k > 1) {
            const DenseMatrix merged = merge_projections(store, cfg.merge, w);
            designs_.push_back(build_local_design(raw[w], merged));
        } else {
            designs_.push_back(std::move(raw[w]));
        }
    }
    factors_.reserve(k);
    for (std::size_t w = 0; w < k; ++w) factors_.emplace_back(designs_[w], cfg.lambda);
}

Vector LocoPlan::fit(const Vector& y) const {
    Vector beta(p_, 0.0);
    for (std::size_t w = 0; w < partition_.num_blocks(); ++w) {
        const Vector local = factors_[w].solve(y);
        const auto& block = partition_.blocks[w];
        for (std::size_t i = 0; i < block.size(); ++i) beta[block[i]] = local[i];
    }
    return beta;
}

}  // namespace loco
