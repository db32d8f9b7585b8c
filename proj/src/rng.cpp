#include "loco/rng.hpp"

#include <algorithm>

namespace loco {

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    // partial Fisher-Yates over an index array
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k && i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(std::min(k, n));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace loco
