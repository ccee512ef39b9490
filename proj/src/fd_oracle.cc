// Brute-force full disjunction used to check the permutation-fold engine.
// Deliberately shares nothing with it beyond the data types: tuples are
// compared as strings, merging and containment are re-derived here.

#include <algorithm>
#include <map>

#include "fuzzyfd/full_disjunction.h"

namespace fuzzyfd {
namespace {

struct OracleTuple {
  std::vector<Cell> cells;
  RowRef origin;
};

bool agree(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i] && *a[i] != *b[i]) return false;
  }
  return true;
}

bool share_value(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i] && *a[i] == *b[i]) return true;
  }
  return false;
}

bool contained_in(const std::vector<Cell>& small,
                  const std::vector<Cell>& big) {
  if (small == big) return false;
  for (std::size_t i = 0; i < small.size(); ++i) {
    if (small[i] && (!big[i] || *big[i] != *small[i])) return false;
  }
  return true;
}

struct Enumerator {
  const std::vector<std::vector<OracleTuple>>& by_table;
  std::vector<const OracleTuple*> chosen;
  std::map<std::vector<Cell>, std::vector<RowRef>> merged;

  bool connected() const {
    std::vector<char> reached(chosen.size());
    std::vector<std::size_t> stack{0};
    reached[0] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < chosen.size(); ++j) {
        if (!reached[j] && share_value(chosen[i]->cells, chosen[j]->cells)) {
          reached[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(reached.begin(), reached.end(),
                       [](char r) { return r != 0; });
  }

  void record() {
    std::vector<Cell> cells = chosen.front()->cells;
    std::vector<RowRef> provenance;
    for (const OracleTuple* t : chosen) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i]) cells[i] = t->cells[i];
      }
      provenance.push_back(t->origin);
    }
    std::sort(provenance.begin(), provenance.end());
    auto [it, inserted] = merged.try_emplace(std::move(cells), provenance);
    if (!inserted && provenance < it->second) it->second = provenance;
  }

  void run(std::size_t table) {
    if (table == by_table.size()) {
      if (!chosen.empty() && connected()) record();
      return;
    }
    run(table + 1);  // nothing from this table
    for (const OracleTuple& t : by_table[table]) {
      const bool fits = std::all_of(
          chosen.begin(), chosen.end(),
          [&](const OracleTuple* c) { return agree(c->cells, t.cells); });
      if (!fits) continue;
      chosen.push_back(&t);
      run(table + 1);
      chosen.pop_back();
    }
  }
};

}  // namespace

IntegratedTable fd_oracle(const AlignedRelationSet& set,
                          std::size_t max_tuples) {
  const std::size_t arity = set.attributes().size();
  std::vector<std::vector<OracleTuple>> by_table;
  std::size_t total = 0;
  for (const auto& table : set.tables()) {
    std::vector<OracleTuple> tuples;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      std::vector<Cell> cells(arity);
      bool any = false;
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (!table.rows[r][c]) continue;
        cells[set.attribute_of(table.table_id, c)] = table.rows[r][c];
        any = true;
      }
      if (any) tuples.push_back(OracleTuple{std::move(cells), {table.table_id, r}});
    }
    total += tuples.size();
    by_table.push_back(std::move(tuples));
  }
  if (total > max_tuples) {
    throw InputError("fd_oracle refuses " + std::to_string(total) +
                     " tuples (bound is " + std::to_string(max_tuples) + ")");
  }

  Enumerator enumerator{by_table, {}, {}};
  enumerator.run(0);

  IntegratedTable out(set.attributes(), std::make_shared<ValuePool>());
  for (const auto& [cells, provenance] : enumerator.merged) {
    const bool dominated = std::any_of(
        enumerator.merged.begin(), enumerator.merged.end(),
        [&](const auto& other) { return contained_in(cells, other.first); });
    if (!dominated) out.add(cells, provenance);
  }
  out.sort();
  return out;
}

}  // namespace fuzzyfd
