#include "fuzzyfd/pipeline.h"

#include <chrono>

namespace fuzzyfd {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

IntegrationResult integrate(const AlignedRelationSet& set,
                            const IntegrationOptions& options) {
  if (options.mode == IntegrationMode::kRegular) {
    const auto start = std::chrono::steady_clock::now();
    IntegratedTable table = full_disjunction(set, options.fd);
    return IntegrationResult{std::nullopt, std::move(table), 0.0,
                             seconds_since(start)};
  }

  auto start = std::chrono::steady_clock::now();
  MatchPartition partition = match_all(set, options.matcher, options.jobs);
  const AlignedRelationSet rewritten =
      rewrite_tables(set, representative_map(partition));
  const double match_seconds = seconds_since(start);

  start = std::chrono::steady_clock::now();
  IntegratedTable table = full_disjunction(rewritten, options.fd);
  return IntegrationResult{std::move(partition), std::move(table),
                           match_seconds, seconds_since(start)};
}

}  // namespace fuzzyfd
