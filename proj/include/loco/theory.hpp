#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "loco/engine.hpp"
#include "loco/linalg.hpp"
#include "loco/matrix.hpp"

namespace loco::theory {

/// Sketch distortion bound rho = C * sqrt(r * log(2r/delta) / ((K-1)*tau_subs)).
/// The absolute constant C is a reported parameter (default 1), never hidden.
double predicted_rho(std::size_t rank, double delta, std::size_t num_workers,
                     std::size_t tau_subs, double c_const = 1.0);

/// Measured distortion rho_hat = ||V^T Theta Theta^T V - I_r|| for worker
/// self_id, where Theta keeps block self_id raw and applies each other
/// block's realized projection, and V spans the right singular subspace
/// of x.
double empirical_rho(const DenseMatrix& x, const FeaturePartition& partition,
                     const std::vector<ProjectionSpec>& specs, std::size_t self_id = 0);

/// Same with a precomputed SVD of x (for loops over many projection seeds).
double empirical_rho(const ThinSvd& svd, const FeaturePartition& partition,
                     const std::vector<ProjectionSpec>& specs, std::size_t self_id = 0);

/// Worker self_id's un-standardized local design [raw block | concatenated
/// projections of the other blocks] = X * Theta. Column order matches the
/// engine's concatenate merge.
DenseMatrix local_design_matrix(const DenseMatrix& x, const FeaturePartition& partition,
                                const std::vector<ProjectionSpec>& specs, std::size_t self_id);

/// Per-worker projection specs matching what loco_fit realizes for cfg
/// under the concatenate merge (the mode the distortion analysis covers).
std::vector<ProjectionSpec> engine_projection_specs(const FeaturePartition& partition,
                                                    const LocoConfig& cfg);

/// True iff (1-rho) X X^T <= Xbar Xbar^T <= (1+rho) X X^T up to a
/// 1e-8 * ||X X^T|| eigenvalue slack on each side.
bool spectral_sandwich_check(const DenseMatrix& x, const DenseMatrix& xbar, double rho_hat);

/// Fixed-design prediction risk n^-1 ||X beta* - X beta_hat||^2 of one
/// estimate.
double risk_fixed(const DenseMatrix& x, const Vector& beta_star, const Vector& beta_hat);

/// Monte-Carlo risk of an estimation procedure: average risk_fixed over
/// fresh noise draws y = X beta* + sigma * eps.
double risk_monte_carlo(const DenseMatrix& x, const Vector& beta_star, double sigma,
                        const std::function<Vector(const Vector&)>& fit, std::size_t draws,
                        std::uint64_t seed);

/// Where the regularized solution sits relative to the signal energy in the
/// top principal components. margin is c = 1 - t / L_J with t the realized
/// squared norm of the ridge solution and L_J the rotated true-signal energy
/// in the top J components, clamped to [0, 1/2).
struct ShrinkageReport {
    std::size_t top_components = 0;  // J
    double lambda_j = 0.0;           // J-th largest eigenvalue of X^T X / n
    double signal_energy = 0.0;      // L_J
    double realized_norm_sq = 0.0;   // t = ||beta_rr(lambda)||^2
    double active_fraction = 0.0;    // t / L_J
    double margin = 0.0;             // clamped c
    double margin_raw = 0.0;         // unclamped 1 - t / L_J
    bool margin_in_range = false;    // raw margin in (0, 1/2)
    bool eigenvalue_positive = false;
    bool constraint_active = false;  // raw margin > 0
};
ShrinkageReport shrinkage_report(const DenseMatrix& x, const Vector& y, const Vector& beta_star,
                                 double lambda, std::size_t top_j);

/// Fixed design + known truth, the setting every Monte-Carlo check runs in.
struct FixedDesignModel {
    DenseMatrix x;      // standardized columns
    Vector beta_star;   // inside the row space of x
    Vector y;           // one realized response
    double sigma = 0.0; // noise scale
};

/// Exactly low-rank regression model: x = standardized (A B) with A n x rank
/// and B rank x p Gaussian, beta* in the row space, SNR-scaled noise.
FixedDesignModel make_low_rank_model(std::size_t n, std::size_t p, std::size_t rank, double snr,
                                     std::uint64_t seed);

/// Comparison of the Monte-Carlo coefficient gap E||beta_rr - beta_loco||^2
/// against 5K/(c lambda_J) * (1/(1-rho)^2 - 1) * risk, with rho from
/// predicted_rho at the given C and delta.
struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool vacuous = false;         // rho >= 1: the bound says nothing
    bool assumptions_ok = false;  // lambda_J > 0 and the constraint is active
    double rho = 0.0;
    double lambda_j = 0.0;
    double risk = 0.0;
    double margin = 0.0;  // c
    std::size_t num_workers = 0;
    std::size_t rank = 0;
    std::size_t draws = 0;
};
BoundReport coefficient_bound_report(const FixedDesignModel& model, const LocoConfig& cfg,
                                     double c_const, double delta, std::size_t top_j,
                                     std::size_t draws);

/// Law of the i.i.d. entries of an explicit random projection with entry
/// variance 1/tau_subs. Gaussian and the 1/6-2/3-1/6 sparse law have excess
/// kurtosis 0; the pure sign law has -2.
enum class CompressionLaw { Gaussian, Sparse, Sign };
double excess_kurtosis(CompressionLaw law);

/// Monte-Carlo lhs vs closed-form rhs for the compressed least squares
/// identity: n^-1 E||X b - X Pi Pi^T b||^2 =
/// (1/tau_subs) * b^T (Sigma + tr(Sigma) I + kappa * sum_i e_i B_i) b.
struct CompressiveLsResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double kurtosis_term = 0.0;  // the kappa-weighted part of rhs
};
CompressiveLsResult compressive_ls_check(const DenseMatrix& x, const Vector& beta,
                                         std::size_t tau_subs, CompressionLaw law,
                                         std::size_t draws, std::uint64_t seed);

/// Concatenated row sampling of an orthonormal-column matrix: fraction of
/// trials in which all singular values of the stacked subsample stay within
/// [sqrt((1-delta) l K / n), sqrt((1+eta) l K / n)], plus the matrix
/// Chernoff failure bound for those parameters.
struct RowSamplingResult {
    double pass_fraction = 0.0;
    double chernoff_failure_bound = 0.0;  // may exceed 1 (vacuous)
    double coherence = 0.0;               // M = n * max_j ||row_j||^2
    std::size_t trials = 0;
};
RowSamplingResult row_sampling_check(const DenseMatrix& w, std::size_t num_blocks,
                                     std::size_t samples_per_block, double delta, double eta,
                                     std::size_t trials, std::uint64_t seed);

/// First `cols` columns of the normalized Hadamard matrix of order n:
/// orthonormal with perfectly flat row leverage.
DenseMatrix hadamard_columns(std::size_t n, std::size_t cols);

}  // namespace loco::theory
