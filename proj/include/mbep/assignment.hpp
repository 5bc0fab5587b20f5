#pragma once

#include <cstddef>
#include <vector>

namespace mbep {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
// Returns col[row].
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace mbep
