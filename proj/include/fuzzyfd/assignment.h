#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fuzzyfd {

// Minimum-cost assignment on a dense rows x cols cost matrix (row-major).
// Rectangular inputs are fine: min(rows, cols) pairs are returned, sorted by
// row, and their total cost is minimal among all assignments of that size.
//
// Shortest augmenting paths with row/column potentials, one augmentation
// per row of the smaller side (Crouse's formulation of Jonker-Volgenant).
// Costs must be finite.
std::vector<std::pair<std::size_t, std::size_t>> linear_sum_assignment(
    std::span<const double> cost, std::size_t rows, std::size_t cols);

}  // namespace fuzzyfd
