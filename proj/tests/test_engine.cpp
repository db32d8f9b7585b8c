#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "loco/datagen.hpp"
#include "loco/engine.hpp"
#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/rng.hpp"

using namespace loco;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    DenseMatrix m(r, c);
    for (double& v : m.data) v = rng.normal();
    return m;
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("partition_features: balanced disjoint cover") {
    const auto part = partition_features(8, 2, 1);
    REQUIRE(part.num_blocks() == 2);
    CHECK(part.blocks[0].size() == 4);
    CHECK(part.blocks[1].size() == 4);
    std::set<std::size_t> all;
    for (const auto& b : part.blocks) all.insert(b.begin(), b.end());
    CHECK(all.size() == 8);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 7);
}

TEST_CASE("partition_features: p=10 K=3 gives sizes 4,3,3") {
    const auto part = partition_features(10, 3, 9);
    REQUIRE(part.num_blocks() == 3);
    CHECK(part.blocks[0].size() == 4);
    CHECK(part.blocks[1].size() == 3);
    CHECK(part.blocks[2].size() == 3);
}

TEST_CASE("partition_features: K=1 single block, K>p rejected") {
    const auto part = partition_features(6, 1, 5);
    REQUIRE(part.num_blocks() == 1);
    CHECK(part.blocks[0].size() == 6);
    CHECK_THROWS_AS(partition_features(4, 5, 0), ConfigError);
}

TEST_CASE("partition_features: deterministic given seed, varies across seeds") {
    const auto a = partition_features(50, 4, 11);
    const auto b = partition_features(50, 4, 11);
    const auto c = partition_features(50, 4, 12);
    CHECK(a.blocks == b.blocks);
    CHECK(a.blocks != c.blocks);
}

TEST_CASE("local_dimension reproduces the published scenario integers") {
    LocoConfig cfg;
    cfg.ratio = 0.01;
    cfg.num_workers = 3;
    CHECK(local_dimension(cfg, 150000) == 51000);
    cfg.num_workers = 12;
    CHECK(local_dimension(cfg, 150000) == 13875);
    cfg.num_workers = 1;
    CHECK(local_dimension(cfg, 150000) == 150000);
}

TEST_CASE("local_dimension decreases in K at fixed ratio") {
    LocoConfig cfg;
    cfg.ratio = 0.05;
    std::size_t prev = SIZE_MAX;
    for (std::size_t k : {2, 4, 8, 16, 32}) {
        cfg.num_workers = k;
        const std::size_t d = local_dimension(cfg, 4096);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("loco_fit: K=1 equals full ridge") {
    const DenseMatrix x = standardize_columns(random_matrix(60, 24, 5)).matrix;
    const Vector y = random_vector(60, 6);
    LocoConfig cfg;
    cfg.num_workers = 1;
    cfg.lambda = 0.2;
    cfg.seed = 3;
    const FitResult fit = loco_fit(x, y, cfg);
    const Vector exact = ridge_closed_form({x, y, 0.2});
    CHECK(norm2(sub(fit.beta, exact)) / norm2(exact) < 1e-8);
    CHECK(fit.publish_count == 0);  // nothing to exchange
    CHECK(fit.read_count == 0);
}

TEST_CASE("loco_fit: every coordinate assigned exactly once") {
    const DenseMatrix x = standardize_columns(random_matrix(40, 30, 15)).matrix;
    const Vector y = random_vector(40, 16);
    LocoConfig cfg;
    cfg.num_workers = 5;
    cfg.tau_subs = 3;
    cfg.lambda = 0.5;
    cfg.seed = 1;
    const FitResult fit = loco_fit(x, y, cfg);
    CHECK(fit.beta.size() == 30);
    // the scatter covered all of beta: refitting with y=0 gives exact zeros,
    // with random y no coordinate stays at the 0.0 sentinel almost surely
    std::size_t zeros = 0;
    for (double v : fit.beta)
        if (v == 0.0) ++zeros;
    CHECK(zeros == 0);
    // partition is a cover
    std::set<std::size_t> seen;
    for (const auto& b : fit.partition.blocks) seen.insert(b.begin(), b.end());
    CHECK(seen.size() == 30);
}

TEST_CASE("loco_fit: one-shot exchange counters") {
    const DenseMatrix x = standardize_columns(random_matrix(30, 24, 25)).matrix;
    const Vector y = random_vector(30, 26);
    LocoConfig cfg;
    cfg.num_workers = 4;
    cfg.tau_subs = 2;
    cfg.lambda = 0.3;
    cfg.seed = 9;
    const FitResult fit = loco_fit(x, y, cfg);
    CHECK(fit.publish_count == 4);
    CHECK(fit.read_count == 4 * 3);
}

TEST_CASE("loco_fit: bit-identical across thread counts") {
    const DenseMatrix x = standardize_columns(random_matrix(50, 32, 35)).matrix;
    const Vector y = random_vector(50, 36);
    for (ProjectionKind kind : {ProjectionKind::Srht, ProjectionKind::Sparse}) {
        for (MergeMode merge : {MergeMode::Concatenate, MergeMode::Sum}) {
            LocoConfig cfg;
            cfg.num_workers = 4;
            cfg.tau_subs = 2;
            cfg.lambda = 0.25;
            cfg.seed = 42;
            cfg.projection = kind;
            cfg.merge = merge;
            cfg.threads = 1;
            const FitResult a = loco_fit(x, y, cfg);
            cfg.threads = 2;
            const FitResult b = loco_fit(x, y, cfg);
            cfg.threads = 4;
            const FitResult c = loco_fit(x, y, cfg);
            REQUIRE(a.beta.size() == b.beta.size());
            for (std::size_t i = 0; i < a.beta.size(); ++i) {
                CHECK(a.beta[i] == b.beta[i]);
                CHECK(a.beta[i] == c.beta[i]);
            }
        }
    }
}

TEST_CASE("loco_fit: sdca solver agrees with closed form at tight gap") {
    const DenseMatrix x = standardize_columns(random_matrix(40, 16, 45)).matrix;
    const Vector y = random_vector(40, 46);
    LocoConfig cfg;
    cfg.num_workers = 2;
    cfg.tau_subs = 4;
    cfg.lambda = 0.4;
    cfg.seed = 5;
    const FitResult closed = loco_fit(x, y, cfg);
    cfg.solver = SolverChoice::Sdca;
    cfg.sdca.gap_tol = 1e-12;
    cfg.sdca.max_epochs = 4000;
    const FitResult sdca = loco_fit(x, y, cfg);
    CHECK(norm2(sub(sdca.beta, closed.beta)) / norm2(closed.beta) < 1e-5);
}

TEST_CASE("loco_fit: invalid configs rejected") {
    const DenseMatrix x = random_matrix(20, 10, 55);
    const Vector y = random_vector(20, 56);
    LocoConfig cfg;
    cfg.num_workers = 2;
    cfg.tau_subs = 2;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(loco_fit(x, y, cfg), ConfigError);  // lambda must be positive
    cfg.lambda = 0.1;
    cfg.num_workers = 11;
    CHECK_THROWS_AS(loco_fit(x, y, cfg), ConfigError);  // K > p
    cfg.num_workers = 2;
    cfg.tau_subs = 6;
    CHECK_THROWS_AS(loco_fit(x, y, cfg), ConfigError);  // tau_subs > block size
    cfg.tau_subs = 0;
    cfg.ratio = 0.0;
    CHECK_THROWS_AS(loco_fit(x, y, cfg), ConfigError);  // no sketch size given
}

TEST_CASE("LocoPlan::fit matches loco_fit on the same config") {
    const DenseMatrix x = standardize_columns(random_matrix(45, 28, 65)).matrix;
    const Vector y = random_vector(45, 66);
    LocoConfig cfg;
    cfg.num_workers = 4;
    cfg.tau_subs = 3;
    cfg.lambda = 0.15;
    cfg.seed = 21;
    const FitResult reference = loco_fit(x, y, cfg);
    const LocoPlan plan(x, cfg);
    const Vector beta = plan.fit(y);
    for (std::size_t i = 0; i < beta.size(); ++i) CHECK(beta[i] == reference.beta[i]);
}

TEST_CASE("loco_fit: coefficient error vs full ridge shrinks with the sketch size") {
    // scaled-down version of the block-correlated trend run
    SimSpec spec;
    spec.n = 300;
    spec.p = 512;
    spec.num_blocks = 8;
    spec.sigma_r = {0.7};
    spec.snr = 1.0;
    spec.n_test = 0;
    for (MergeMode merge : {MergeMode::Concatenate, MergeMode::Sum}) {
        std::vector<double> err_small, err_large;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            spec.seed = seed;
            const SimulatedDataset ds = generate(spec);
            const DenseMatrix x = standardize_columns(ds.x_train).matrix;
            Vector y = ds.y_train;
            const double mu = mean(y);
            for (double& v : y) v -= mu;
            const Vector ridge = ridge_closed_form({x, y, 0.05});
            auto run = [&](double ratio) {
                LocoConfig cfg;
                cfg.num_workers = 4;
                cfg.ratio = ratio;
                cfg.lambda = 0.05;
                cfg.seed = seed;
                cfg.merge = merge;
                cfg.projection =
                    merge == MergeMode::Sum ? ProjectionKind::Sparse : ProjectionKind::Srht;
                const FitResult fit = loco_fit(x, y, cfg);
                return norm2_sq(sub(fit.beta, ridge)) / norm2_sq(ridge);
            };
            err_small.push_back(run(0.01));
            err_large.push_back(run(0.10));
        }
        std::sort(err_small.begin(), err_small.end());
        std::sort(err_large.begin(), err_large.end());
        CHECK(err_large[2] < err_small[2]);  // median improves with the larger sketch
    }
}
