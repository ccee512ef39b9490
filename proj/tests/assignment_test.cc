#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fuzzyfd/assignment.h"
#include "fuzzyfd/errors.h"
#include "random_instances.h"

namespace fuzzyfd {
namespace {

double total_of(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                const std::vector<double>& cost, std::size_t cols) {
  double total = 0.0;
  for (const auto& [i, j] : pairs) total += cost[i * cols + j];
  return total;
}

void expect_valid(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                  std::size_t rows, std::size_t cols) {
  ASSERT_EQ(pairs.size(), std::min(rows, cols));
  std::vector<char> used_r(rows), used_c(cols);
  for (const auto& [i, j] : pairs) {
    ASSERT_LT(i, rows);
    ASSERT_LT(j, cols);
    EXPECT_FALSE(used_r[i]++);
    EXPECT_FALSE(used_c[j]++);
  }
  EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end()));
}

TEST(LinearSumAssignment, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> uniform(0.0, 2.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 7, cols = 1 + rng() % 7;
    std::vector<double> cost(rows * cols);
    // Every third instance uses a coarse grid to provoke ties.
    for (double& c : cost) c = trial % 3 == 0 ? coarse(rng) * 0.5 : uniform(rng);
    const auto pairs = linear_sum_assignment(cost, rows, cols);
    expect_valid(pairs, rows, cols);
    EXPECT_EQ(total_of(pairs, cost, cols), testing::brute_force_assignment(cost, rows, cols))
        << rows << "x" << cols << " trial " << trial;
  }
}

TEST(LinearSumAssignment, LargerInstancesAgreeWithTransposedSolve) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 20 + rng() % 30, cols = 20 + rng() % 30;
    std::vector<double> cost(rows * cols), transposed(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        cost[i * cols + j] = transposed[j * rows + i] = uniform(rng);
      }
    }
    const auto a = linear_sum_assignment(cost, rows, cols);
    const auto b = linear_sum_assignment(transposed, cols, rows);
    expect_valid(a, rows, cols);
    EXPECT_NEAR(total_of(a, cost, cols), total_of(b, transposed, rows), 1e-9);
  }
}

TEST(LinearSumAssignment, Identity) {
  const std::size_t n = 50;
  std::vector<double> cost(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) cost[i * n + (n - 1 - i)] = 0.0;
  const auto pairs = linear_sum_assignment(cost, n, n);
  for (const auto& [i, j] : pairs) EXPECT_EQ(j, n - 1 - i);
}

TEST(LinearSumAssignment, GreedyChoiceIsNotOptimal) {
  // Row 0 prefers column 0, but the optimum gives it column 1.
  const std::vector<double> cost = {0.0, 0.1,
                                    0.1, 1.0};
  const auto pairs = linear_sum_assignment(cost, 2, 2);
  EXPECT_EQ(pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
}

TEST(LinearSumAssignment, EmptyAndErrors) {
  EXPECT_TRUE(linear_sum_assignment({}, 0, 4).empty());
  EXPECT_TRUE(linear_sum_assignment({}, 3, 0).empty());
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(linear_sum_assignment(three, 2, 2), ContractViolation);
  const std::vector<double> bad = {0.0, std::nan("")};
  EXPECT_THROW(linear_sum_assignment(bad, 1, 2), ContractViolation);
  const std::vector<double> inf = {0.0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(linear_sum_assignment(inf, 2, 1), ContractViolation);
}

}  // namespace
}  // namespace fuzzyfd
