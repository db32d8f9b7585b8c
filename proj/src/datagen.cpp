#include "loco/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/rng.hpp"

namespace loco {

namespace {

DenseMatrix equicorrelation_cholesky(std::size_t size, double rho) {
    DenseMatrix sigma(size, size, rho);
    for (std::size_t i = 0; i < size; ++i) sigma(i, i) = 1.0;
    return cholesky(sigma);
}

DenseMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    for (double& v : m.data) v = rng.normal();
    return m;
}

double stddev_n(const Vector& v) {
    const double mu = mean(v);
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mu;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

SimulatedDataset generate(const SimSpec& spec) {
    const std::size_t p = spec.p;
    const std::size_t r = spec.num_blocks;
    if (spec.n < 1 || p < 1) throw ConfigError("generate: n and p must be positive");
    if (r < 1 || r > p) throw ConfigError("generate: need 1 <= R <= p");
    if (r > 20 && !spec.allow_mean_reuse)
        throw ConfigError("generate: R > 20 exhausts the blockwise-mean pool "
                          "(set allow_mean_reuse to sample with replacement)");
    if (spec.snr <= 0.0) throw ConfigError("generate: SNR must be positive");
    std::vector<double> sigmas = spec.sigma_r;
    if (sigmas.empty()) sigmas.assign(1, 0.0);
    if (sigmas.size() == 1) sigmas.assign(r, sigmas.front());
    if (sigmas.size() != r) throw ConfigError("generate: sigma_r must have 1 or R entries");
    for (double s : sigmas)
        if (s < 0.0 || s >= 1.0) throw ConfigError("generate: sigma_r must lie in [0, 1)");

    Rng rng = Rng::keyed(spec.seed, 0xda7a);

    // block sizes, near-balanced
    std::vector<std::size_t> bsize(r, p / r);
    for (std::size_t b = 0; b < p % r; ++b) ++bsize[b];

    // blockwise means from {-10..-1, 1..10}
    std::vector<int> pool;
    for (int v = -10; v <= 10; ++v)
        if (v != 0) pool.push_back(v);
    std::vector<double> mu(r);
    if (spec.allow_mean_reuse) {
        for (std::size_t b = 0; b < r; ++b)
            mu[b] = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    } else {
        rng.shuffle(pool);
        for (std::size_t b = 0; b < r; ++b) mu[b] = pool[b];
    }

    // true coefficients, blockwise N(mu_b, 0.5 I)
    Vector beta_ordered(p);
    {
        const double sd = std::sqrt(0.5);
        std::size_t at = 0;
        for (std::size_t b = 0; b < r; ++b)
            for (std::size_t i = 0; i < bsize[b]; ++i) beta_ordered[at++] = mu[b] + sd * rng.normal();
    }

    // standard normal draws, then the per-block correlation transform
    const DenseMatrix z_train = gaussian_matrix(rng, spec.n, p);
    const DenseMatrix z_test = gaussian_matrix(rng, spec.n_test, p);
    Vector eps_train(spec.n), eps_test(spec.n_test);
    for (double& v : eps_train) v = rng.normal();
    for (double& v : eps_test) v = rng.normal();
    std::vector<std::size_t> perm(p);
    for (std::size_t i = 0; i < p; ++i) perm[i] = i;
    rng.shuffle(perm);

    auto correlate = [&](const DenseMatrix& z) {
        DenseMatrix x(z.rows, p);
        if (z.rows == 0) return x;
        std::size_t at = 0;
        for (std::size_t b = 0; b < r; ++b) {
            const std::size_t bs = bsize[b];
            DenseMatrix zb(z.rows, bs);
            for (std::size_t j = 0; j < bs; ++j)
                std::copy(z.col(at + j), z.col(at + j) + z.rows, zb.col(j));
            // rows x_i = L z_i  <=>  X_b = Z_b L^T
            const DenseMatrix lt = transpose(equicorrelation_cholesky(bs, sigmas[b]));
            const DenseMatrix xb = matmul(zb, lt);
            for (std::size_t j = 0; j < bs; ++j)
                std::copy(xb.col(j), xb.col(j) + z.rows, x.col(at + j));
            at += bs;
        }
        return x;
    };

    const DenseMatrix x_train_ordered = correlate(z_train);
    const DenseMatrix x_test_ordered = correlate(z_test);

    SimulatedDataset out;
    out.spec = spec;
    out.y_train_clean = matvec(x_train_ordered, beta_ordered);
    out.y_test_clean = spec.n_test > 0 ? matvec(x_test_ordered, beta_ordered) : Vector();
    out.sigma_s = stddev_n(out.y_train_clean) / spec.snr;
    out.y_train = out.y_train_clean;
    for (std::size_t i = 0; i < spec.n; ++i) out.y_train[i] += out.sigma_s * eps_train[i];
    out.y_test = out.y_test_clean;
    for (std::size_t i = 0; i < spec.n_test; ++i) out.y_test[i] += out.sigma_s * eps_test[i];

    // same permutation for columns and coefficients
    out.permutation = perm;
    out.beta_star.resize(p);
    out.block_of.resize(p);
    std::vector<std::size_t> block_of_ordered(p);
    {
        std::size_t at = 0;
        for (std::size_t b = 0; b < r; ++b)
            for (std::size_t i = 0; i < bsize[b]; ++i) block_of_ordered[at++] = b;
    }
    out.x_train = DenseMatrix(spec.n, p);
    out.x_test = DenseMatrix(spec.n_test, p);
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t src = perm[j];
        out.beta_star[j] = beta_ordered[src];
        out.block_of[j] = block_of_ordered[src];
        std::copy(x_train_ordered.col(src), x_train_ordered.col(src) + spec.n, out.x_train.col(j));
        if (spec.n_test > 0)
            std::copy(x_test_ordered.col(src), x_test_ordered.col(src) + spec.n_test,
                      out.x_test.col(j));
    }
    return out;
}

double effective_rank_ratio(const DenseMatrix& x, std::size_t r) {
    const std::size_t minside = std::min(x.rows, x.cols);
    if (r + 1 > minside)
        throw ConfigError("effective_rank_ratio: need min(n, p) >= R + 1");
    const DenseMatrix small_gram = x.rows <= x.cols ? gram(transpose(x)) : gram(x);
    Vector eig = sym_eigenvalues(small_gram);
    std::vector<double> sv(minside);
    for (std::size_t i = 0; i < minside; ++i) sv[i] = std::sqrt(std::max(eig[i], 0.0));
    const double hi = sv[r - 1];
    const double lo = sv[r];
    if (lo <= 1e-7 * std::max(sv[0], 1e-300))
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

SimSpec preset(const std::string& name, std::uint64_t seed) {
    SimSpec s;
    s.seed = seed;
    if (name == "scenario-one-desk") {
        s.n = 1000;
        s.p = 4096;
        s.num_blocks = 16;
        s.sigma_r = {0.7};
        s.snr = 1.0;
        s.n_test = 250;
    } else if (name == "scenario-two-desk") {
        s.n = 2000;
        s.p = 16384;
        s.num_blocks = 32;
        s.sigma_r = {0.7};
        s.snr = 1.0;
        s.n_test = 500;
        s.allow_mean_reuse = true;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return s;
}

}  // namespace loco
