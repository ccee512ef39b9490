#include "fuzzyfd/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuzzyfd/errors.h"

namespace fuzzyfd {
namespace {

constexpr std::ptrdiff_t kNone = -1;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Solver {
  std::size_t nr;
  std::size_t nc;
  std::span<const double> cost;  // nr <= nc, row-major
  std::vector<double> u, v, shortest;
  std::vector<std::ptrdiff_t> path, col4row, row4col;
  std::vector<char> in_rows, in_cols;
  std::vector<std::size_t> remaining;

  Solver(std::size_t r, std::size_t c, std::span<const double> m)
      : nr(r),
        nc(c),
        cost(m),
        u(r, 0.0),
        v(c, 0.0),
        shortest(c),
        path(c, kNone),
        col4row(r, kNone),
        row4col(c, kNone),
        in_rows(r),
        in_cols(c),
        remaining(c) {}

  // Dijkstra over columns from `row`; returns the free column that ends the
  // shortest augmenting path and its length.
  std::ptrdiff_t augmenting_path(std::size_t row, double& min_value) {
    min_value = 0.0;
    std::size_t num_remaining = nc;
    // Reverse order so ties favour low column indices.
    for (std::size_t it = 0; it < nc; ++it) remaining[it] = nc - it - 1;
    std::fill(in_rows.begin(), in_rows.end(), 0);
    std::fill(in_cols.begin(), in_cols.end(), 0);
    std::fill(shortest.begin(), shortest.end(), kInf);

    std::ptrdiff_t sink = kNone;
    std::size_t i = row;
    while (sink == kNone) {
      std::size_t index = nc;
      double lowest = kInf;
      in_rows[i] = 1;
      const double* row_cost = cost.data() + i * nc;
      for (std::size_t it = 0; it < num_remaining; ++it) {
        const std::size_t j = remaining[it];
        const double r = min_value + row_cost[j] - u[i] - v[j];
        if (r < shortest[j]) {
          path[j] = static_cast<std::ptrdiff_t>(i);
          shortest[j] = r;
        }
        if (shortest[j] < lowest ||
            (shortest[j] == lowest && row4col[j] == kNone)) {
          lowest = shortest[j];
          index = it;
        }
      }
      min_value = lowest;
      if (index == nc || min_value == kInf) return kNone;
      const std::size_t j = remaining[index];
      if (row4col[j] == kNone) {
        sink = static_cast<std::ptrdiff_t>(j);
      } else {
        i = static_cast<std::size_t>(row4col[j]);
      }
      in_cols[j] = 1;
      remaining[index] = remaining[--num_remaining];
    }
    return sink;
  }

  // Row reduction: u_i = min_j c_ij with v = 0 is dual feasible, and a row
  // may take its cheapest column outright if no cheaper row claimed it.
  // Only the rows left over need augmenting paths.
  void greedy_start() {
    std::vector<std::size_t> best(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      const double* row_cost = cost.data() + i * nc;
      best[i] = static_cast<std::size_t>(
          std::min_element(row_cost, row_cost + nc) - row_cost);
      u[i] = row_cost[best[i]];
    }
    std::vector<std::size_t> order(nr);
    for (std::size_t i = 0; i < nr; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    for (std::size_t i : order) {
      if (row4col[best[i]] == kNone) {
        row4col[best[i]] = static_cast<std::ptrdiff_t>(i);
        col4row[i] = static_cast<std::ptrdiff_t>(best[i]);
      }
    }
  }

  void run() {
    greedy_start();
    for (std::size_t row = 0; row < nr; ++row) {
      if (col4row[row] != kNone) continue;
      double min_value = 0.0;
      const std::ptrdiff_t sink = augmenting_path(row, min_value);
      if (sink == kNone) throw ContractViolation("assignment is infeasible");

      u[row] += min_value;
      for (std::size_t i = 0; i < nr; ++i) {
        if (in_rows[i] && i != row) {
          u[i] += min_value - shortest[static_cast<std::size_t>(col4row[i])];
        }
      }
      for (std::size_t j = 0; j < nc; ++j) {
        if (in_cols[j]) v[j] -= min_value - shortest[j];
      }

      std::ptrdiff_t j = sink;
      while (true) {
        const std::ptrdiff_t i = path[static_cast<std::size_t>(j)];
        row4col[static_cast<std::size_t>(j)] = i;
        std::swap(col4row[static_cast<std::size_t>(i)], j);
        if (static_cast<std::size_t>(i) == row) break;
      }
    }
  }
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> linear_sum_assignment(
    std::span<const double> cost, std::size_t rows, std::size_t cols) {
  if (cost.size() != rows * cols) {
    throw ContractViolation("cost matrix size does not match its shape");
  }
  if (rows == 0 || cols == 0) return {};
  if (!std::all_of(cost.begin(), cost.end(),
                   [](double c) { return std::isfinite(c); })) {
    throw ContractViolation("cost matrix has non-finite entries");
  }

  const bool transpose = cols < rows;
  std::vector<double> matrix;
  if (transpose) {
    matrix.resize(cost.size());
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        matrix[j * rows + i] = cost[i * cols + j];
      }
    }
  }
  Solver solver(transpose ? cols : rows, transpose ? rows : cols,
                transpose ? std::span<const double>(matrix) : cost);
  solver.run();

  std::vector<std::pair<std::size_t, std::size_t>> result;
  result.reserve(solver.nr);
  for (std::size_t i = 0; i < solver.nr; ++i) {
    const auto j = static_cast<std::size_t>(solver.col4row[i]);
    result.emplace_back(transpose ? j : i, transpose ? i : j);
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace fuzzyfd
