// Timings of the OpenMP kernels against their serial reference
// implementations, plus end-to-end fit timings over the worker count.

#include <chrono>
#include <cstdio>
#include <functional>

#include "loco/datagen.hpp"
#include "loco/engine.hpp"
#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/projection.hpp"
#include "loco/rng.hpp"

using namespace loco;

namespace {

double time_once(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) best = std::min(best, time_once(fn));
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3f ms   openmp %8.3f ms   speedup %5.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    DenseMatrix m(r, c);
    for (double& v : m.data) v = rng.normal();
    return m;
}

}  // namespace

int main() {
    std::printf("threads: %d\n\n", max_threads());

    {
        const DenseMatrix a = random_matrix(1200, 900, 1);
        const DenseMatrix b = random_matrix(900, 400, 2);
        const double s = time_best_of(3, [&] { (void)matmul_serial(a, b); });
        const double p = time_best_of(3, [&] { (void)matmul(a, b); });
        report("matmul 1200x900x400", s, p);
    }
    {
        const DenseMatrix m = random_matrix(2000, 700, 3);
        const double s = time_best_of(3, [&] { (void)gram_serial(m); });
        const double p = time_best_of(3, [&] { (void)gram(m); });
        report("gram 2000x700", s, p);
    }
    {
        const DenseMatrix a = random_matrix(4000, 2000, 4);
        Rng rng(5);
        Vector x(2000), z(4000);
        for (double& v : x) v = rng.normal();
        for (double& v : z) v = rng.normal();
        const double s = time_best_of(5, [&] { (void)matvec_serial(a, x); });
        const double p = time_best_of(5, [&] { (void)matvec(a, x); });
        report("matvec 4000x2000", s, p);
        const double st = time_best_of(5, [&] { (void)matvec_t_serial(a, z); });
        const double pt = time_best_of(5, [&] { (void)matvec_t(a, z); });
        report("matvec_t 4000x2000", st, pt);
    }
    {
        // batch SRHT application is a row-parallel FWHT; the serial reference
        // mirrors the full operation (transpose, signs, transform, gather)
        const DenseMatrix x = random_matrix(2000, 1024, 6);
        ProjectionSpec spec{ProjectionKind::Srht, 1024, 128, 7};
        const SrhtProjection pi(spec);
        Rng sign_rng(7);
        Vector signs(1024);
        for (double& v : signs) v = sign_rng.sign();
        const double s = time_best_of(3, [&] {
            const DenseMatrix xt = transpose(x);
            Vector buf(1024);
            DenseMatrix out_t(128, 2000);
            for (std::size_t i = 0; i < 2000; ++i) {
                const double* row = xt.col(i);
                for (std::size_t c = 0; c < 1024; ++c) buf[c] = row[c] * signs[c];
                fwht_pow2(buf.data(), 1024);
                for (std::size_t j = 0; j < 128; ++j) out_t(j, i) = buf[j];
            }
            (void)transpose(out_t);
        });
        const double p = time_best_of(3, [&] { (void)pi.apply_columns(x); });
        report("srht 2000 rows of 1024", s, p);
    }
    {
        const DenseMatrix m = random_matrix(5000, 800, 8);
        const double p = time_best_of(3, [&] { (void)standardize_columns(m); });
        // serial reference: run under a single-thread team by timing the same
        // call with OMP_NUM_THREADS=1 externally; here report parallel only
        std::printf("%-28s openmp %8.3f ms\n", "standardize 5000x800", p * 1e3);
    }

    std::printf("\nend-to-end fits, n=1000 p=8192 ratio 5%% (wall seconds)\n");
    SimSpec spec;
    spec.n = 1000;
    spec.p = 8192;
    spec.num_blocks = 16;
    spec.sigma_r = {0.7};
    spec.seed = 9;
    const SimulatedDataset ds = generate(spec);
    const DenseMatrix x = standardize_columns(ds.x_train).matrix;
    Vector y = ds.y_train;
    const double mu = mean(y);
    for (double& v : y) v -= mu;
    for (std::size_t k : {2, 4, 8}) {
        LocoConfig cfg;
        cfg.num_workers = k;
        cfg.ratio = 0.05;
        cfg.lambda = 0.1;
        cfg.seed = 1;
        const double t = time_once([&] { (void)loco_fit(x, y, cfg); });
        std::printf("  K=%-2zu  %.3f s\n", k, t);
    }
    return 0;
}
