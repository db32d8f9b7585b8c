#include "loco/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/rng.hpp"
#include "loco/solver.hpp"

namespace loco::theory {

double predicted_rho(std::size_t rank, double delta, std::size_t num_workers,
                     std::size_t tau_subs, double c_const) {
    if (num_workers < 2) throw ConfigError("predicted_rho: undefined for K = 1");
    if (rank < 1) throw ConfigError("predicted_rho: rank must be at least 1");
    if (delta <= 0.0 || delta >= 1.0) throw ConfigError("predicted_rho: need 0 < delta < 1");
    if (c_const <= 0.0) throw ConfigError("predicted_rho: C must be positive");
    const double m = static_cast<double>(num_workers - 1) * static_cast<double>(tau_subs);
    if (m < 1.0) throw ConfigError("predicted_rho: (K-1)*tau_subs must be at least 1");
    const double r = static_cast<double>(rank);
    return c_const * std::sqrt(r * std::log(2.0 * r / delta) / m);
}

std::vector<ProjectionSpec> engine_projection_specs(const FeaturePartition& partition,
                                                    const LocoConfig& cfg) {
    const std::size_t k = partition.num_blocks();
    const std::size_t tau_subs = resolve_tau_subs(cfg, partition.p);
    std::vector<ProjectionSpec> specs(k);
    for (std::size_t w = 0; w < k; ++w) {
        specs[w].kind = cfg.projection;
        specs[w].input_dim = partition.blocks[w].size();
        specs[w].output_dim = tau_subs;
        specs[w].seed = Rng::keyed(cfg.seed, 0xa110c0 + w).next_u64();
    }
    return specs;
}

namespace {

DenseMatrix rows_of(const DenseMatrix& m, const std::vector<std::size_t>& idx) {
    DenseMatrix out(idx.size(), m.cols);
    for (std::size_t j = 0; j < m.cols; ++j)
        for (std::size_t i = 0; i < idx.size(); ++i) out(i, j) = m(idx[i], j);
    return out;
}

DenseMatrix apply_spec_columns(const DenseMatrix& m, const ProjectionSpec& spec) {
    return spec.kind == ProjectionKind::Srht ? SrhtProjection(spec).apply_columns(m)
                                             : SparseProjection(spec).apply_columns(m);
}

}  // namespace

double empirical_rho(const DenseMatrix& x, const FeaturePartition& partition,
                     const std::vector<ProjectionSpec>& specs, std::size_t self_id) {
    return empirical_rho(thin_svd(x), partition, specs, self_id);
}

double empirical_rho(const ThinSvd& svd, const FeaturePartition& partition,
                     const std::vector<ProjectionSpec>& specs, std::size_t self_id) {
    require(specs.size() == partition.num_blocks(), "empirical_rho: one spec per block");
    const std::size_t r = svd.rank;
    if (r == 0) return 0.0;

    // W = Theta^T V, stacked blockwise: raw rows for self_id, projected rows
    // for everyone else (ascending worker id, matching the engine merge).
    std::vector<DenseMatrix> parts;
    parts.push_back(rows_of(svd.v, partition.blocks[self_id]));
    for (std::size_t w = 0; w < partition.num_blocks(); ++w) {
        if (w == self_id) continue;
        const DenseMatrix vk = rows_of(svd.v, partition.blocks[w]);
        // Pi^T V_k = (V_k^T Pi)^T
        parts.push_back(transpose(apply_spec_columns(transpose(vk), specs[w])));
    }
    std::size_t total_rows = 0;
    for (const auto& m : parts) total_rows += m.rows;
    DenseMatrix w(total_rows, r);
    std::size_t at = 0;
    for (const auto& m : parts) {
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t i = 0; i < m.rows; ++i) w(at + i, j) = m(i, j);
        at += m.rows;
    }
    DenseMatrix g = gram(w);  // V^T Theta Theta^T V
    for (std::size_t i = 0; i < r; ++i) g(i, i) -= 1.0;
    return sym_spectral_norm(g);
}

DenseMatrix local_design_matrix(const DenseMatrix& x, const FeaturePartition& partition,
                                const std::vector<ProjectionSpec>& specs, std::size_t self_id) {
    require(specs.size() == partition.num_blocks(), "local_design_matrix: one spec per block");
    std::vector<DenseMatrix> parts;
    {
        DenseMatrix raw(x.rows, partition.blocks[self_id].size());
        for (std::size_t j = 0; j < raw.cols; ++j)
            std::copy(x.col(partition.blocks[self_id][j]),
                      x.col(partition.blocks[self_id][j]) + x.rows, raw.col(j));
        parts.push_back(std::move(raw));
    }
    for (std::size_t w = 0; w < partition.num_blocks(); ++w) {
        if (w == self_id) continue;
        DenseMatrix xk(x.rows, partition.blocks[w].size());
        for (std::size_t j = 0; j < xk.cols; ++j)
            std::copy(x.col(partition.blocks[w][j]), x.col(partition.blocks[w][j]) + x.rows,
                      xk.col(j));
        parts.push_back(apply_spec_columns(xk, specs[w]));
    }
    std::size_t total_cols = 0;
    for (const auto& m : parts) total_cols += m.cols;
    DenseMatrix out(x.rows, total_cols);
    std::size_t at = 0;
    for (const auto& m : parts) {
        std::copy(m.data.begin(), m.data.end(), out.col(at));
        at += m.cols;
    }
    return out;
}

bool spectral_sandwich_check(const DenseMatrix& x, const DenseMatrix& xbar, double rho_hat) {
    require(x.rows == xbar.rows, "spectral_sandwich_check: row count mismatch");
    const DenseMatrix outer = gram(transpose(x));      // X X^T
    const DenseMatrix outer_bar = gram(transpose(xbar));
    const double scale = sym_spectral_norm(outer);
    const double slack = 1e-8 * scale;

    DenseMatrix upper = outer;  // (1+rho) X X^T - Xbar Xbar^T
    for (std::size_t i = 0; i < upper.data.size(); ++i)
        upper.data[i] = (1.0 + rho_hat) * outer.data[i] - outer_bar.data[i];
    DenseMatrix lower = outer;  // Xbar Xbar^T - (1-rho) X X^T
    for (std::size_t i = 0; i < lower.data.size(); ++i)
        lower.data[i] = outer_bar.data[i] - (1.0 - rho_hat) * outer.data[i];

    const Vector eu = sym_eigenvalues(upper);
    const Vector el = sym_eigenvalues(lower);
    return eu.back() >= -slack && el.back() >= -slack;
}

double risk_fixed(const DenseMatrix& x, const Vector& beta_star, const Vector& beta_hat) {
    const Vector fs = matvec(x, beta_star);
    const Vector fh = matvec(x, beta_hat);
    double s = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double d = fs[i] - fh[i];
        s += d * d;
    }
    return s / static_cast<double>(x.rows);
}

double risk_monte_carlo(const DenseMatrix& x, const Vector& beta_star, double sigma,
                        const std::function<Vector(const Vector&)>& fit, std::size_t draws,
                        std::uint64_t seed) {
    const Vector clean = matvec(x, beta_star);
    Rng rng = Rng::keyed(seed, 0x415c);
    double acc = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        Vector y = clean;
        for (double& v : y) v += sigma * rng.normal();
        acc += risk_fixed(x, beta_star, fit(y));
    }
    return acc / static_cast<double>(draws);
}

ShrinkageReport shrinkage_report(const DenseMatrix& x, const Vector& y, const Vector& beta_star,
                                 double lambda, std::size_t top_j) {
    ShrinkageReport rep;
    rep.top_components = top_j;
    const ThinSvd svd = thin_svd(x);
    if (top_j < 1 || top_j > svd.rank)
        throw ConfigError("shrinkage_report: J must lie in [1, rank]");
    const double n = static_cast<double>(x.rows);
    // eigenvalues of X^T X / n are squared singular values over n
    const double sv = svd.singular_values[top_j - 1];
    rep.lambda_j = sv * sv / n;
    rep.eigenvalue_positive = rep.lambda_j > 1e-12;

    // signal energy of beta* in the top-J principal directions
    double energy = 0.0;
    for (std::size_t j = 0; j < top_j; ++j) {
        const double c = dot(svd.v.col(j), beta_star.data(), beta_star.size());
        energy += c * c;
    }
    rep.signal_energy = energy;

    const Vector beta_rr = RidgeFactor(x, lambda).solve(y);
    rep.realized_norm_sq = norm2_sq(beta_rr);
    rep.active_fraction = energy > 0.0
                              ? rep.realized_norm_sq / energy
                              : std::numeric_limits<double>::infinity();
    rep.margin_raw = 1.0 - rep.active_fraction;
    rep.constraint_active = rep.margin_raw > 0.0;
    rep.margin_in_range = rep.margin_raw > 0.0 && rep.margin_raw < 0.5;
    rep.margin = std::clamp(rep.margin_raw, 0.0, 0.5 - 1e-12);
    return rep;
}

FixedDesignModel make_low_rank_model(std::size_t n, std::size_t p, std::size_t rank, double snr,
                                     std::uint64_t seed) {
    if (rank < 1 || rank > std::min(n, p))
        throw ConfigError("make_low_rank_model: need 1 <= rank <= min(n, p)");
    Rng rng = Rng::keyed(seed, 0x10e4);
    DenseMatrix a(n, rank), b(rank, p);
    for (double& v : a.data) v = rng.normal();
    for (double& v : b.data) v = rng.normal();
    FixedDesignModel model;
    model.x = standardize_columns(matmul(a, b)).matrix;

    // place the signal inside the row space so the top principal components
    // carry all of it
    const ThinSvd svd = thin_svd(model.x);
    Vector w(svd.rank);
    for (double& v : w) v = rng.normal();
    model.beta_star = matvec(svd.v, w);

    const Vector clean = matvec(model.x, model.beta_star);
    double mu = mean(clean), ss = 0.0;
    for (double v : clean) ss += (v - mu) * (v - mu);
    model.sigma = std::sqrt(ss / static_cast<double>(n)) / snr;
    model.y = clean;
    for (double& v : model.y) v += model.sigma * rng.normal();
    return model;
}

BoundReport coefficient_bound_report(const FixedDesignModel& model, const LocoConfig& cfg,
                                     double c_const, double delta, std::size_t top_j,
                                     std::size_t draws) {
    BoundReport rep;
    rep.num_workers = cfg.num_workers;
    rep.draws = draws;

    const ThinSvd svd = thin_svd(model.x);
    rep.rank = svd.rank;

    if (cfg.num_workers == 1) {
        rep.rho = 0.0;
    } else {
        rep.rho = predicted_rho(svd.rank, delta, cfg.num_workers, resolve_tau_subs(cfg, model.x.cols),
                                c_const);
    }
    if (rep.rho >= 1.0) {
        rep.vacuous = true;
        rep.rhs = std::numeric_limits<double>::infinity();
    }

    const ShrinkageReport shrink =
        shrinkage_report(model.x, model.y, model.beta_star, cfg.lambda, top_j);
    rep.lambda_j = shrink.lambda_j;
    rep.margin = shrink.margin;
    rep.assumptions_ok = shrink.eigenvalue_positive && shrink.constraint_active;

    // Monte-Carlo expectation over fresh noise, conditional on the realized
    // projections: factors are built once and reused for every draw.
    const RidgeFactor full(model.x, cfg.lambda);
    const LocoPlan plan(model.x, cfg);
    const Vector clean = matvec(model.x, model.beta_star);
    Rng rng = Rng::keyed(cfg.seed, 0xb0d1);
    double gap_acc = 0.0;
    double risk_acc = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        Vector y = clean;
        for (double& v : y) v += model.sigma * rng.normal();
        const Vector beta_rr = full.solve(y);
        const Vector beta_loco = plan.fit(y);
        double g = 0.0;
        for (std::size_t i = 0; i < beta_rr.size(); ++i) {
            const double dd = beta_rr[i] - beta_loco[i];
            g += dd * dd;
        }
        gap_acc += g;
        risk_acc += risk_fixed(model.x, model.beta_star, beta_rr);
    }
    rep.lhs = gap_acc / static_cast<double>(draws);
    rep.risk = risk_acc / static_cast<double>(draws);

    if (!rep.vacuous) {
        const double shrinkage_factor = 1.0 / ((1.0 - rep.rho) * (1.0 - rep.rho)) - 1.0;
        const double margin = std::max(shrink.margin, 1e-12);
        rep.rhs = 5.0 * static_cast<double>(cfg.num_workers) / (margin * rep.lambda_j) *
                  shrinkage_factor * rep.risk;
    }
    // K = 1: the two estimators coincide and the comparison is degenerate
    rep.holds = !rep.vacuous && (rep.lhs <= rep.rhs || cfg.num_workers == 1);
    return rep;
}

double excess_kurtosis(CompressionLaw law) {
    switch (law) {
        case CompressionLaw::Gaussian: return 0.0;
        case CompressionLaw::Sparse: return 0.0;
        case CompressionLaw::Sign: return -2.0;
    }
    return 0.0;
}

CompressiveLsResult compressive_ls_check(const DenseMatrix& x, const Vector& beta,
                                         std::size_t tau_subs, CompressionLaw law,
                                         std::size_t draws, std::uint64_t seed) {
    const std::size_t p = x.cols;
    require(beta.size() == p, "compressive_ls_check: coefficient length mismatch");
    if (tau_subs < 1 || tau_subs >= p)
        throw DimensionError("compressive_ls_check: need 1 <= tau_subs < p");

    const double n = static_cast<double>(x.rows);
    DenseMatrix sigma = gram(x);
    for (double& v : sigma.data) v /= n;

    // rhs: (1/tau_subs) beta^T (Sigma + tr(Sigma) I + kappa sum_i e_i B_i) beta
    const SymEigen eig = sym_eigen(sigma);
    double trace = 0.0;
    for (double v : eig.values) trace += v;
    const Vector sb = matvec(sigma, beta);
    double quad = dot(sb, beta);
    const double kappa = excess_kurtosis(law);
    double kurt = 0.0;
    if (kappa != 0.0) {
        // beta^T (sum_i e_i B_i) beta = sum_j beta_j^2 sum_a U_aj^2 Sigma_aa
        Vector col_weight(p, 0.0);  // sum_a U_aj^2 Sigma_aa
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < p; ++a) {
                const double u = eig.vectors(a, j);
                s += u * u * sigma(a, a);
            }
            col_weight[j] = s;
        }
        for (std::size_t j = 0; j < p; ++j) kurt += beta[j] * beta[j] * col_weight[j];
        kurt *= kappa;
    }
    CompressiveLsResult res;
    res.kurtosis_term = kurt / static_cast<double>(tau_subs);
    res.rhs = (quad + trace * norm2_sq(beta) + kurt) / static_cast<double>(tau_subs);

    // lhs: Monte-Carlo mean of (beta - Pi Pi^T beta)^T Sigma (beta - Pi Pi^T beta)
    Rng rng = Rng::keyed(seed, 0xcafd);
    const double entry_sd = std::sqrt(1.0 / static_cast<double>(tau_subs));
    const double sparse_val = std::sqrt(3.0 / static_cast<double>(tau_subs));
    double acc = 0.0;
    DenseMatrix pi(p, tau_subs);
    for (std::size_t d = 0; d < draws; ++d) {
        for (double& v : pi.data) {
            switch (law) {
                case CompressionLaw::Gaussian: v = entry_sd * rng.normal(); break;
                case CompressionLaw::Sparse: {
                    const double u = rng.uniform();
                    v = u < 1.0 / 6.0 ? sparse_val : (u < 1.0 / 3.0 ? -sparse_val : 0.0);
                    break;
                }
                case CompressionLaw::Sign: v = rng.sign() * entry_sd; break;
            }
        }
        const Vector proj = matvec(pi, matvec_t(pi, beta));  // Pi Pi^T beta
        Vector diff(p);
        for (std::size_t i = 0; i < p; ++i) diff[i] = beta[i] - proj[i];
        acc += dot(matvec(sigma, diff), diff);
    }
    res.lhs = acc / static_cast<double>(draws);
    return res;
}

DenseMatrix hadamard_columns(std::size_t n, std::size_t cols) {
    require(n > 0 && (n & (n - 1)) == 0, "hadamard_columns: n must be a power of two");
    require(cols >= 1 && cols <= n, "hadamard_columns: need 1 <= cols <= n");
    DenseMatrix w(n, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        fwht_pow2(e.data(), n);  // column j of the normalized Hadamard matrix
        std::copy(e.begin(), e.end(), w.col(j));
    }
    return w;
}

RowSamplingResult row_sampling_check(const DenseMatrix& w, std::size_t num_blocks,
                                     std::size_t samples_per_block, double delta, double eta,
                                     std::size_t trials, std::uint64_t seed) {
    const std::size_t n = w.rows;
    const std::size_t pp = w.cols;
    if (n % num_blocks != 0)
        throw ConfigError("row_sampling_check: K must divide the row count");
    const std::size_t tau = n / num_blocks;
    if (samples_per_block < 1 || samples_per_block > tau)
        throw ConfigError("row_sampling_check: need 1 <= l <= n/K");
    const std::size_t lk = samples_per_block * num_blocks;

    // coherence M = n * max_j ||row_j||^2
    double max_row = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < pp; ++j) s += w(i, j) * w(i, j);
        max_row = std::max(max_row, s);
    }
    RowSamplingResult res;
    res.trials = trials;
    res.coherence = static_cast<double>(n) * max_row;

    const double lo = std::sqrt((1.0 - delta) * static_cast<double>(lk) / static_cast<double>(n));
    const double hi = std::sqrt((1.0 + eta) * static_cast<double>(lk) / static_cast<double>(n));

    Rng rng = Rng::keyed(seed, 0x2051);
    std::size_t pass = 0;
    std::vector<std::size_t> rows(n);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        rng.shuffle(rows);  // random balanced partition: block b = rows [b*tau, (b+1)*tau)
        DenseMatrix sampled(lk, pp);
        std::size_t at = 0;
        for (std::size_t b = 0; b < num_blocks; ++b) {
            const auto pick = rng.sample_without_replacement(tau, samples_per_block);
            for (std::size_t s : pick) {
                const std::size_t src = rows[b * tau + s];
                for (std::size_t j = 0; j < pp; ++j) sampled(at, j) = w(src, j);
                ++at;
            }
        }
        const Vector eig = sym_eigenvalues(gram(sampled));
        const double smax = std::sqrt(std::max(eig.front(), 0.0));
        const double smin = std::sqrt(std::max(eig.back(), 0.0));
        if (smin >= lo - 1e-12 && smax <= hi + 1e-12) ++pass;
    }
    res.pass_fraction = static_cast<double>(pass) / static_cast<double>(trials);

    // matrix Chernoff failure bound with exponent l*K / M
    const double expo = static_cast<double>(lk) / res.coherence;
    const double low_base = std::exp(-delta) / std::pow(1.0 - delta, 1.0 - delta);
    const double high_base = std::exp(eta) / std::pow(1.0 + eta, 1.0 + eta);
    res.chernoff_failure_bound =
        static_cast<double>(pp) * (std::pow(low_base, expo) + std::pow(high_base, expo));
    return res;
}

}  // namespace loco::theory
