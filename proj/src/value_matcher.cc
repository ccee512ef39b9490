#include "fuzzyfd/value_matcher.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <unordered_set>

#include "fuzzyfd/assignment.h"
#include "fuzzyfd/errors.h"

namespace fuzzyfd {

PairwiseResult pairwise_assign(std::span<const EmbeddedValue> left,
                               std::span<const EmbeddedValue> right,
                               double theta) {
  PairwiseResult result;
  std::vector<char> left_used(left.size()), right_used(right.size());
  if (!left.empty() && !right.empty()) {
    std::vector<EmbeddingVector> lv, rv;
    lv.reserve(left.size());
    rv.reserve(right.size());
    for (const auto& e : left) lv.push_back(e.vector);
    for (const auto& e : right) rv.push_back(e.vector);
    // Reused across calls on this thread; fresh multi-hundred-megabyte
    // matrices cost more in page faults than in arithmetic.
    thread_local std::vector<double> scratch;
    const std::size_t n = left.size() * right.size();
    if (scratch.size() < n) scratch.resize(n);
    const std::span<const double> cost(scratch.data(), n);
    cosine_distance_matrix(lv, rv, std::span<double>(scratch.data(), n));

    for (const auto& [i, j] :
         linear_sum_assignment(cost, left.size(), right.size())) {
      const AssignedPair pair{i, j, cost[i * right.size() + j]};
      if (pair.distance < theta) {
        result.matches.push_back(pair);
        left_used[i] = 1;
        right_used[j] = 1;
      } else {
        result.rejected.push_back(pair);
      }
    }
  }
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (!left_used[i]) result.unmatched_left.push_back(i);
  }
  for (std::size_t j = 0; j < right.size(); ++j) {
    if (!right_used[j]) result.unmatched_right.push_back(j);
  }
  return result;
}

std::string select_representative(std::span<const Member> members,
                                  const ValueCounts& counts) {
  if (members.empty()) {
    throw ContractViolation("select_representative: empty member set");
  }
  const Member* best = nullptr;
  std::size_t best_count = 0;
  TableId best_table = 0;
  for (const Member& m : members) {
    const auto it = counts.find(m.value);
    if (it == counts.end()) {
      throw ContractViolation("no occurrence count for value '" + m.value +
                              "'");
    }
    TableId first_table = m.table_id;
    for (const Member& other : members) {
      if (other.value == m.value) {
        first_table = std::min(first_table, other.table_id);
      }
    }
    const bool better =
        best == nullptr || it->second > best_count ||
        (it->second == best_count &&
         (first_table < best_table ||
          (first_table == best_table && m.value < best->value)));
    if (better) {
      best = &m;
      best_count = it->second;
      best_table = first_table;
    }
  }
  return best->value;
}

CombinedColumn initial_combined(const ColumnValues& column,
                                const ValueCounts& counts) {
  CombinedColumn combined;
  combined.entries.reserve(column.values.size());
  for (const auto& v : column.values) {
    const auto it = counts.find(v.value);
    combined.entries.push_back(CombinedEntry{
        v.value, v.vector, {Member{column.table_id, v.value}},
        it == counts.end() ? 0 : it->second, {}});
  }
  return combined;
}

CombinedColumn fold_combine(CombinedColumn combined, const ColumnValues& next,
                            const MatcherConfig& config,
                            const ValueCounts& counts) {
  if (next.values.empty()) return combined;

  std::vector<EmbeddedValue> left;
  left.reserve(combined.entries.size());
  for (const auto& e : combined.entries) {
    left.push_back(EmbeddedValue{e.representative, e.vector});
  }
  const PairwiseResult assignment =
      pairwise_assign(left, next.values, config.theta);

  for (const AssignedPair& p : assignment.matches) {
    CombinedEntry& entry = combined.entries[p.left];
    const EmbeddedValue& incoming = next.values[p.right];
    const Member member{next.table_id, incoming.value};
    entry.edges.push_back(MatchEdge{entry.representative, member, p.distance});
    entry.members.push_back(member);

    std::string rep = select_representative(entry.members, counts);
    if (rep != entry.representative) {
      if (rep == incoming.value) {
        entry.vector = incoming.vector;
      } else if (config.provider) {
        entry.vector = config.provider->embed(rep);
      } else {
        throw ContractViolation("fold_combine needs a provider to embed '" +
                                rep + "'");
      }
      entry.representative = std::move(rep);
    }
    entry.frequency = counts.count(entry.representative)
                          ? counts.at(entry.representative)
                          : 0;
  }
  for (std::size_t j : assignment.unmatched_right) {
    const EmbeddedValue& v = next.values[j];
    const auto it = counts.find(v.value);
    combined.entries.push_back(CombinedEntry{
        v.value, v.vector, {Member{next.table_id, v.value}},
        it == counts.end() ? 0 : it->second, {}});
  }
  return combined;
}

std::unordered_map<Member, std::string, MemberHash>
AttributeMatch::representatives() const {
  std::unordered_map<Member, std::string, MemberHash> map;
  for (const auto& set : sets) {
    for (const auto& m : set.members) map.emplace(m, set.representative);
  }
  return map;
}

const AttributeMatch* MatchPartition::find(std::string_view attribute) const {
  for (const auto& a : attributes) {
    if (a.attribute == attribute) return &a;
  }
  return nullptr;
}

RepresentativeMap representative_map(const MatchPartition& partition) {
  RepresentativeMap map;
  for (const auto& a : partition.attributes) {
    map[a.attribute] = a.representatives();
  }
  return map;
}

AttributeMatch match_values(const AlignedRelationSet& set,
                            const std::string& attribute,
                            const MatcherConfig& config) {
  if (!config.provider) {
    throw ContractViolation("match_values requires an embedding provider");
  }
  AttributeMatch result{attribute, {}};
  const std::vector<AlignedColumn> columns = project_aligned(set, attribute);

  ValueCounts counts;
  std::vector<ColumnValues> values;
  for (const auto& column : columns) {
    ColumnValues cv{column.table_id, {}};
    std::vector<std::string> distinct;
    std::unordered_map<std::string_view, char> seen;
    for (const auto& cell : column.cells) {
      if (!cell) continue;
      ++counts[*cell];
      if (seen.emplace(*cell, 1).second) distinct.push_back(*cell);
    }
    if (distinct.empty()) continue;
    auto vectors = config.provider->embed_batch(distinct);
    cv.values.reserve(distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      cv.values.push_back(
          EmbeddedValue{std::move(distinct[i]), std::move(vectors[i])});
    }
    values.push_back(std::move(cv));
  }
  if (values.empty()) return result;

  CombinedColumn combined = initial_combined(values.front(), counts);
  for (std::size_t k = 1; k < values.size(); ++k) {
    combined = fold_combine(std::move(combined), values[k], config, counts);
  }

  result.sets.reserve(combined.entries.size());
  for (auto& entry : combined.entries) {
    std::sort(entry.members.begin(), entry.members.end());
    result.sets.push_back(ValueSet{std::move(entry.representative),
                                   std::move(entry.members),
                                   std::move(entry.edges)});
  }
  return result;
}

MatchPartition match_all(const AlignedRelationSet& set,
                         const MatcherConfig& config, std::size_t jobs) {
  const auto& attributes = set.spec().attributes();
  MatchPartition partition;
  partition.attributes.resize(attributes.size());
  std::vector<std::exception_ptr> errors(attributes.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t a = next++; a < attributes.size(); a = next++) {
      try {
        partition.attributes[a] = match_values(set, attributes[a], config);
      } catch (...) {
        errors[a] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(jobs, attributes.size()));
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return partition;
}

AlignedRelationSet rewrite_tables(const AlignedRelationSet& set,
                                  const RepresentativeMap& map) {
  std::vector<Table> tables = set.tables();
  for (const auto& attribute : set.spec().attributes()) {
    const auto found = map.find(attribute);
    // Representatives are fixed points, so rewritten tables rewrite to
    // themselves even where a representative came from another table.
    std::unordered_set<std::string_view> representatives;
    if (found != map.end()) {
      for (const auto& [member, rep] : found->second) representatives.insert(rep);
    }
    for (const auto& ref : set.spec().columns(attribute)) {
      Table& table = tables[ref.table_id - 1];
      const std::size_t col = table.column_index(ref.column);
      for (auto& row : table.rows) {
        Cell& cell = row[col];
        if (!cell) continue;
        if (found != map.end()) {
          const auto it = found->second.find(Member{ref.table_id, *cell});
          if (it != found->second.end()) {
            if (it->second != *cell) cell = it->second;
            continue;
          }
          if (representatives.count(*cell)) continue;
        }
        throw ContractViolation("representative map has no entry for '" +
                                *cell + "' in table " +
                                std::to_string(ref.table_id) +
                                ", attribute '" + attribute + "'");
      }
    }
  }
  return set.with_tables(std::move(tables));
}

}  // namespace fuzzyfd
