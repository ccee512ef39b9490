#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fuzzyfd/embedding.h"
#include "fuzzyfd/table.h"
#include "json.hpp"

namespace fuzzyfd {

inline constexpr double kDefaultTheta = 0.7;

struct MatcherConfig {
  // A pair is kept iff its cosine distance is strictly below theta.
  double theta = kDefaultTheta;
  std::shared_ptr<EmbeddingProvider> provider;
};

// A value as it occurs in one aligned column.
struct Member {
  TableId table_id = 0;
  std::string value;

  friend auto operator<=>(const Member&, const Member&) = default;
};

struct MemberHash {
  std::size_t operator()(const Member& m) const {
    return std::hash<std::string>{}(m.value) * 31 +
           static_cast<std::size_t>(m.table_id);
  }
};

struct EmbeddedValue {
  std::string value;
  EmbeddingVector vector;
};

struct AssignedPair {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
};

struct PairwiseResult {
  std::vector<AssignedPair> matches;   // distance < theta
  std::vector<AssignedPair> rejected;  // assigned, but distance >= theta
  std::vector<std::size_t> unmatched_left;
  std::vector<std::size_t> unmatched_right;
};

// Optimal assignment over the full cosine-distance matrix, then pairs at or
// above `theta` are dropped. Either side may be empty.
PairwiseResult pairwise_assign(std::span<const EmbeddedValue> left,
                               std::span<const EmbeddedValue> right,
                               double theta);

// Occurrences of each value across all aligned columns of one attribute,
// within-column duplicates included.
using ValueCounts = std::unordered_map<std::string, std::size_t>;

// Highest count wins; ties go to the value seen in the lowest table id, then
// to the lexicographically smallest string.
std::string select_representative(std::span<const Member> members,
                                  const ValueCounts& counts);

// An edge created by one assignment step.
struct MatchEdge {
  std::string combined_value;  // representative at the time of the step
  Member next;
  double distance = 0.0;
};

struct CombinedEntry {
  std::string representative;
  EmbeddingVector vector;  // the representative's own embedding
  std::vector<Member> members;
  std::size_t frequency = 0;  // count of the representative
  std::vector<MatchEdge> edges;
};

struct CombinedColumn {
  std::vector<CombinedEntry> entries;
};

struct ColumnValues {
  TableId table_id = 0;
  std::vector<EmbeddedValue> values;  // distinct
};

CombinedColumn initial_combined(const ColumnValues& column,
                                const ValueCounts& counts);

// Matches the running combined column against one more aligned column.
CombinedColumn fold_combine(CombinedColumn combined, const ColumnValues& next,
                            const MatcherConfig& config,
                            const ValueCounts& counts);

struct ValueSet {
  std::string representative;
  std::vector<Member> members;  // ascending table id
  std::vector<MatchEdge> edges;
};

struct AttributeMatch {
  std::string attribute;
  std::vector<ValueSet> sets;

  std::unordered_map<Member, std::string, MemberHash> representatives() const;
};

// Disjoint value sets of every aligned attribute, in alignment-spec order.
struct MatchPartition {
  std::vector<AttributeMatch> attributes;

  const AttributeMatch* find(std::string_view attribute) const;
};

// attribute -> (table id, value) -> representative
using RepresentativeMap =
    std::map<std::string, std::unordered_map<Member, std::string, MemberHash>>;

RepresentativeMap representative_map(const MatchPartition& partition);

// Folds the attribute's columns in ascending table id, starting from the
// lowest one.
AttributeMatch match_values(const AlignedRelationSet& set,
                            const std::string& attribute,
                            const MatcherConfig& config);

// match_values over every aligned attribute; attributes run on up to `jobs`
// threads.
MatchPartition match_all(const AlignedRelationSet& set,
                         const MatcherConfig& config, std::size_t jobs = 1);

// Replaces every aligned cell by its representative. NULLs, unaligned
// columns and cells that already hold a representative of their attribute
// are left alone. Throws ContractViolation on any other value the map does
// not cover.
AlignedRelationSet rewrite_tables(const AlignedRelationSet& set,
                                  const RepresentativeMap& map);

// Audit document: per attribute, each set with its representative, members,
// assignment edges, and the largest distance between any two members
// (computed with `provider` when given).
nlohmann::ordered_json match_report_json(const MatchPartition& partition,
                                         double theta,
                                         EmbeddingProvider* provider);
MatchPartition parse_match_report(const nlohmann::json& doc);

}  // namespace fuzzyfd
