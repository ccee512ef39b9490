#pragma once

#include <optional>

#include "fuzzyfd/full_disjunction.h"
#include "fuzzyfd/value_matcher.h"

namespace fuzzyfd {

enum class IntegrationMode { kFuzzy, kRegular };

struct IntegrationOptions {
  IntegrationMode mode = IntegrationMode::kFuzzy;
  MatcherConfig matcher;
  std::size_t jobs = 1;
  FdOptions fd;
};

struct IntegrationResult {
  std::optional<MatchPartition> partition;  // fuzzy mode only
  IntegratedTable table;
  double match_seconds = 0.0;  // matching and rewriting
  double fd_seconds = 0.0;
};

// Fuzzy mode: match values, rewrite the tables, then full disjunction.
// Regular mode: full disjunction of the tables as given.
IntegrationResult integrate(const AlignedRelationSet& set,
                            const IntegrationOptions& options);

}  // namespace fuzzyfd
