#pragma once

#include <string>

#include "loco/datagen.hpp"

namespace loco {

// Binary matrix-plus-response file:
//   magic "LOCOMAT1" (8 bytes) | u64 n | u64 p | u64 layout (0 = column-major)
//   | n*p f64 (column-major X) | n f64 (y)
// A dataset is <base>.train.bin + <base>.test.bin + <base>.json, the sidecar
// carrying spec, beta*, sigma_s, permutation, block ids and the clean
// responses.

void write_dataset(const std::string& base_path, const SimulatedDataset& ds);
SimulatedDataset load_dataset(const std::string& base_path);

}  // namespace loco
