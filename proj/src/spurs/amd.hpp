#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spurs {

// Approximate minimum degree ordering of a symmetric sparsity pattern given
// as adjacency lists (self loops ignored, lists need not be sorted but must
// be symmetric). Returns perm with perm[k] = node eliminated k-th.
std::vector<std::int32_t> amd_order(const std::vector<std::vector<std::int32_t>>& adjacency);

}  // namespace spurs
