#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fuzzyfd/full_disjunction.h"
#include "fuzzyfd/table.h"
#include "json.hpp"
#include "test_util.h"

namespace fuzzyfd::testing {

// Minimum total cost over all injective maps from the smaller side into the
// larger, summed in row order so that equal matchings compare equal.
inline double brute_force_assignment(const std::vector<double>& cost,
                                     std::size_t rows, std::size_t cols) {
  const bool flip = rows > cols;
  const std::size_t small = flip ? cols : rows, big = flip ? rows : cols;
  const auto at = [&](std::size_t s, std::size_t b) {
    return flip ? cost[b * cols + s] : cost[s * cols + b];
  };
  std::vector<std::size_t> perm(big);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> by_row(rows);
  std::vector<char> has(rows);
  do {
    std::fill(by_row.begin(), by_row.end(), 0.0);
    std::fill(has.begin(), has.end(), 0);
    for (std::size_t s = 0; s < small; ++s) {
      const std::size_t r = flip ? perm[s] : s;
      by_row[r] = at(s, perm[s]);
      has[r] = 1;
    }
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (has[r]) total += by_row[r];
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Random instances over attributes A..D. Each table holds a random subset
// of attributes; small value domains make joins and conflicts common.
struct Instance {
  std::vector<std::vector<std::string>> schemas;
  std::vector<Table> tables;
};

// GYO reduction: repeatedly drop attributes found in one edge only and
// edges contained in another edge.
inline bool acyclic(std::vector<std::set<std::string>> edges) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::string, int> degree;
    for (const auto& e : edges) {
      for (const auto& a : e) ++degree[a];
    }
    for (auto& e : edges) {
      for (auto it = e.begin(); it != e.end();) {
        if (degree[*it] == 1) {
          it = e.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    const auto contained = [&](std::size_t i) {
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (i != j && std::includes(edges[j].begin(), edges[j].end(),
                                    edges[i].begin(), edges[i].end())) {
          return true;
        }
      }
      return false;
    };
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (contained(i)) {
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return edges.size() <= 1;
}

inline std::string alignment_json(const Instance& inst) {
  std::map<std::string, std::vector<std::size_t>> where;
  for (std::size_t t = 0; t < inst.schemas.size(); ++t) {
    for (const auto& a : inst.schemas[t]) where[a].push_back(t + 1);
  }
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [a, tables] : where) {
    for (std::size_t t : tables) doc[a].push_back({{"table", t}, {"column", a}});
  }
  return doc.dump();
}

inline AlignedRelationSet build(const Instance& inst, const std::vector<std::size_t>& order) {
  Instance reordered;
  for (std::size_t k = 0; k < order.size(); ++k) {
    reordered.schemas.push_back(inst.schemas[order[k]]);
    Table t = inst.tables[order[k]];
    t.table_id = static_cast<TableId>(k + 1);
    reordered.tables.push_back(std::move(t));
  }
  return AlignedRelationSet(reordered.tables,
                            parse_alignment_spec(alignment_json(reordered)));
}

inline Instance random_instance(std::mt19937& rng, bool want_acyclic) {
  const std::vector<std::string> all = {"A", "B", "C", "D"};
  while (true) {
    Instance inst;
    const std::size_t n = 2 + rng() % 2;
    std::vector<std::set<std::string>> edges;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<std::string> schema;
      for (const auto& a : all) {
        if (rng() % 2) schema.push_back(a);
      }
      if (schema.empty()) schema.push_back(all[rng() % all.size()]);
      edges.emplace_back(schema.begin(), schema.end());
      inst.schemas.push_back(schema);
    }
    if (acyclic(edges) != want_acyclic) continue;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<std::vector<std::string>> rows;
      const std::size_t count = 1 + rng() % 5;
      for (std::size_t r = 0; r < count; ++r) {
        std::vector<std::string> row;
        for (std::size_t c = 0; c < inst.schemas[t].size(); ++c) {
          row.push_back(rng() % 6 == 0 ? "-" : std::to_string(rng() % 3));
        }
        rows.push_back(row);
      }
      inst.tables.push_back(
          make_table(static_cast<TableId>(t + 1), inst.schemas[t], rows));
    }
    return inst;
  }
}

// Rows with columns in attribute-name order. The attribute union follows
// table order, so reordered inputs are compared through this.
inline std::multiset<std::vector<Cell>> canonical_rows(const IntegratedTable& t) {
  std::vector<std::size_t> order(t.attributes().size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.attributes()[a] < t.attributes()[b];
  });
  std::multiset<std::vector<Cell>> out;
  for (const auto& row : t.rows()) {
    std::vector<Cell> sorted;
    for (std::size_t i : order) sorted.push_back(row[i]);
    out.insert(std::move(sorted));
  }
  return out;
}

}  // namespace fuzzyfd::testing
