#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loco/baselines.hpp"
#include "loco/datagen.hpp"
#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/metrics.hpp"
#include "loco/rng.hpp"
#include "loco/solver.hpp"

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

double rel_err(const Vector& a, const Vector& b) { return norm2(sub(a, b)) / norm2(b); }

}  // namespace

TEST_CASE("diagonal_approx: orthogonal columns reduce to OLS") {
    DenseMatrix x(6, 2);
    for (std::size_t i = 0; i < 3; ++i) x(i, 0) = 1.0;
    for (std::size_t i = 3; i < 6; ++i) x(i, 1) = 2.0;
    const Vector y = random_vector(6, 1);
    const Vector diag = diagonal_approx(x, y);
    const Vector ols = ols_min_norm(x, y);
    CHECK(rel_err(diag, ols) < 1e-8);
}

TEST_CASE("diagonal_approx: correlation blindness on duplicated columns") {
    Rng rng(2);
    Vector v(12);
    for (double& e : v) e = rng.normal();
    DenseMatrix x(12, 2);
    for (std::size_t i = 0; i < 12; ++i) x(i, 0) = x(i, 1) = v[i];
    const Vector diag = diagonal_approx(x, v);
    CHECK(diag[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(diag[1] == doctest::Approx(1.0).epsilon(1e-12));
    const Vector ols = ols_min_norm(x, v);  // min-norm gives the 0.5/0.5 split
    CHECK(ols[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("diagonal_approx: zero column rejected") {
    DenseMatrix x(4, 2);
    for (std::size_t i = 0; i < 4; ++i) x(i, 1) = 1.0;
    CHECK_THROWS_AS(diagonal_approx(x, {1, 2, 3, 4}), DegenerateError);
}

TEST_CASE("column_compression: square SRHT recovers full ridge") {
    // tau_subs = p = power of two: the realized operator is orthogonal
    const DenseMatrix x = random_matrix(30, 16, 3);
    const Vector y = random_vector(30, 4);
    const Vector full = ridge_closed_form({x, y, 0.2});
    const Vector comp = column_compression(x, y, 0.2, 16, 99, ProjectionKind::Srht);
    CHECK(rel_err(comp, full) < 1e-8);
}

TEST_CASE("column_compression: tau_subs = 1 gives a multiple of the single column") {
    const DenseMatrix x = random_matrix(20, 8, 5);
    const Vector y = random_vector(20, 6);
    const Vector beta = column_compression(x, y, 0.1, 1, 7, ProjectionKind::Sparse);
    ProjectionSpec spec{ProjectionKind::Sparse, 8, 1, 7};
    const SparseProjection pi(spec);
    const Vector col = pi.up_apply({1.0});
    // beta is alpha * col for the scalar solution alpha
    double alpha = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        if (col[i] != 0.0) {
            alpha = beta[i] / col[i];
            break;
        }
    for (std::size_t i = 0; i < 8; ++i) CHECK(beta[i] == doctest::Approx(alpha * col[i]));
}

TEST_CASE("column_compression: dimension checks") {
    const DenseMatrix x = random_matrix(10, 6, 8);
    const Vector y = random_vector(10, 9);
    CHECK_THROWS_AS(column_compression(x, y, 0.1, 0, 1), DimensionError);
    CHECK_THROWS_AS(column_compression(x, y, 0.1, 7, 1), DimensionError);
}

TEST_CASE("row_compression: full-size SRHT recovers full ridge") {
    const DenseMatrix x = random_matrix(16, 40, 11);
    const Vector y = random_vector(16, 12);
    const Vector full = ridge_closed_form({x, y, 0.3});
    const Vector comp = row_compression(x, y, 0.3, 16, 13, ProjectionKind::Srht);
    CHECK(rel_err(comp, full) < 1e-8);
}

TEST_CASE("row_compression: n_subs = 1 solves without error") {
    const DenseMatrix x = random_matrix(12, 5, 15);
    const Vector y = random_vector(12, 16);
    const Vector beta = row_compression(x, y, 0.5, 1, 17);
    CHECK(beta.size() == 5);
    for (double v : beta) CHECK(std::isfinite(v));
}

TEST_CASE("row_compression: halving the sample hurts test error on p >> n data") {
    SimSpec spec;
    spec.n = 120;
    spec.p = 512;
    spec.num_blocks = 8;
    spec.sigma_r = {0.7};
    spec.seed = 21;
    spec.n_test = 200;
    const SimulatedDataset ds = generate(spec);
    const StandardizeResult st = standardize_columns(ds.x_train);
    const DenseMatrix xte = apply_standardization(ds.x_test, st.means, st.sds);
    Vector ytr = ds.y_train, yte = ds.y_test;
    const double mu = mean(ytr);
    for (double& v : ytr) v -= mu;
    for (double& v : yte) v -= mu;
    const double lambda = 0.1;

    const Vector full = ridge_closed_form({st.matrix, ytr, lambda});
    double full_mse = normalized_mse(yte, matvec(xte, full));
    // median over a few projection seeds to damp sketch noise
    std::vector<double> mses;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Vector rc = row_compression(st.matrix, ytr, lambda, 60, 100 + s);
        mses.push_back(normalized_mse(yte, matvec(xte, rc)));
    }
    std::sort(mses.begin(), mses.end());
    CHECK(mses[2] > full_mse);
}

TEST_CASE("column_compression: decent prediction, poor coefficient recovery") {
    SimSpec spec;
    spec.n = 300;
    spec.p = 512;
    spec.num_blocks = 8;
    spec.sigma_r = {0.7};
    spec.seed = 31;
    spec.n_test = 150;
    const SimulatedDataset ds = generate(spec);
    const StandardizeResult st = standardize_columns(ds.x_train);
    const DenseMatrix xte = apply_standardization(ds.x_test, st.means, st.sds);
    Vector ytr = ds.y_train, yte = ds.y_test;
    const double mu = mean(ytr);
    for (double& v : ytr) v -= mu;
    for (double& v : yte) v -= mu;
    const double lambda = 0.1;
    const std::size_t tau_subs = 51;  // 10% of p

    const Vector full = ridge_closed_form({st.matrix, ytr, lambda});
    const double full_mse = normalized_mse(yte, matvec(xte, full));

    std::vector<double> mse_ratio, corr;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Vector cc = column_compression(st.matrix, ytr, lambda, tau_subs, 500 + s);
        mse_ratio.push_back(normalized_mse(yte, matvec(xte, cc)) / full_mse);
        corr.push_back(pearson(cc, full));
    }
    std::sort(mse_ratio.begin(), mse_ratio.end());
    std::sort(corr.begin(), corr.end());
    CHECK(mse_ratio[2] < 1.25);  // prediction within 25% of full ridge
    CHECK(corr[2] < 0.8);        // up-projected coefficients poorly aligned
}
