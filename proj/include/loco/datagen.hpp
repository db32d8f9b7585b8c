#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loco/matrix.hpp"

namespace loco {

/// Block-correlated Gaussian design: R feature blocks, equicorrelation
/// sigma_r within a block, independence across blocks, blockwise mean-shifted
/// true coefficients, SNR-controlled additive noise, and a final column
/// permutation that hides the block structure.
struct SimSpec {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t num_blocks = 1;       // R
    std::vector<double> sigma_r;      // one entry (shared) or one per block
    double snr = 1.0;
    std::uint64_t seed = 0;
    std::size_t n_test = 0;
    // The blockwise means are drawn without replacement from the 20 integers
    // {-10..-1, 1..10}, capping R at 20. Set this to sample with replacement
    // instead when more blocks are needed.
    bool allow_mean_reuse = false;
};

struct SimulatedDataset {
    DenseMatrix x_train;
    DenseMatrix x_test;
    Vector y_train;
    Vector y_test;
    Vector y_train_clean;  // X beta* before noise
    Vector y_test_clean;
    Vector beta_star;      // permuted order, matching the columns of X
    double sigma_s = 0.0;  // noise scale std(clean train) / snr
    std::vector<std::size_t> permutation;  // column j came from pre-permutation index permutation[j]
    std::vector<std::size_t> block_of;     // block id of each (permuted) column
    SimSpec spec;
};

SimulatedDataset generate(const SimSpec& spec);

/// Ratio sigma_R / sigma_{R+1} of the singular values of x, computed through
/// the Gram matrix on the smaller side. Returns +inf when sigma_{R+1} is
/// numerically zero (exactly rank-R input).
double effective_rank_ratio(const DenseMatrix& x, std::size_t r);

/// Named desk-scale presets (scaled-down stand-ins for the large scenarios).
SimSpec preset(const std::string& name, std::uint64_t seed);

}  // namespace loco
