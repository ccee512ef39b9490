#include "fuzzyfd/full_disjunction.h"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace fuzzyfd {
namespace {

struct ValuesHash {
  std::size_t operator()(const std::vector<ValueId>& v) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
    for (ValueId x : v) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

using TupleIndex =
    std::unordered_map<std::vector<ValueId>, std::size_t, ValuesHash>;

std::vector<RowRef> union_provenance(const std::vector<RowRef>& a,
                                     const std::vector<RowRef>& b) {
  std::vector<RowRef> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

WideTuple merge_pair(const WideTuple& a, const WideTuple& b) {
  WideTuple out;
  out.values = a.values;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out.values[i] == kNullValue) out.values[i] = b.values[i];
  }
  out.provenance = union_provenance(a.provenance, b.provenance);
  return out;
}

bool consistent(const WideTuple& a, const WideTuple& b) {
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const ValueId x = a.values[i];
    const ValueId y = b.values[i];
    if (x != kNullValue && y != kNullValue && x != y) return false;
  }
  return true;
}

// Postings of one relation: attribute -> value -> tuple indices.
struct JoinIndex {
  std::vector<std::size_t> attributes;  // attributes with any non-NULL value
  std::vector<std::unordered_map<ValueId, std::vector<std::uint32_t>>> postings;

  explicit JoinIndex(const IntegratedTable& s)
      : postings(s.attributes().size()) {
    std::vector<char> used(s.attributes().size());
    for (std::size_t t = 0; t < s.size(); ++t) {
      const auto& values = s.tuples()[t].values;
      for (std::size_t a = 0; a < values.size(); ++a) {
        if (values[a] == kNullValue) continue;
        postings[a][values[a]].push_back(static_cast<std::uint32_t>(t));
        used[a] = 1;
      }
    }
    for (std::size_t a = 0; a < used.size(); ++a) {
      if (used[a]) attributes.push_back(a);
    }
  }
};

IntegratedTable join_indexed(const IntegratedTable& r, const IntegratedTable& s,
                             const JoinIndex& index) {
  IntegratedTable out(r.attributes(), r.pool());
  auto& result = out.tuples();
  result.reserve(r.size() + s.size());
  std::vector<char> s_matched(s.size());
  std::vector<std::size_t> stamp(s.size(), static_cast<std::size_t>(-1));

  for (std::size_t ri = 0; ri < r.size(); ++ri) {
    const WideTuple& rt = r.tuples()[ri];
    bool matched = false;
    for (std::size_t a : index.attributes) {
      const ValueId v = rt.values[a];
      if (v == kNullValue) continue;
      const auto it = index.postings[a].find(v);
      if (it == index.postings[a].end()) continue;
      for (std::uint32_t si : it->second) {
        if (stamp[si] == ri) continue;
        stamp[si] = ri;
        const WideTuple& st = s.tuples()[si];
        if (!consistent(rt, st)) continue;
        result.push_back(merge_pair(rt, st));
        s_matched[si] = 1;
        matched = true;
      }
    }
    if (!matched) result.push_back(rt);
  }
  for (std::size_t si = 0; si < s.size(); ++si) {
    if (!s_matched[si]) result.push_back(s.tuples()[si]);
  }
  return out;
}

void check_compatible(const IntegratedTable& r, const IntegratedTable& s) {
  if (r.attributes() != s.attributes() || r.pool() != s.pool()) {
    throw ContractViolation(
        "relations must share attributes and value pool to be joined");
  }
}

// Adds `t` to a deduplicated collection, keeping the smaller provenance.
void insert_distinct(std::vector<WideTuple>& tuples, TupleIndex& index,
                     const WideTuple& t) {
  const auto [it, inserted] = index.try_emplace(t.values, tuples.size());
  if (inserted) {
    tuples.push_back(t);
  } else if (t.provenance < tuples[it->second].provenance) {
    tuples[it->second].provenance = t.provenance;
  }
}

// Fold state for the permutation walk.
struct PermutationWalk {
  const std::vector<IntegratedTable>& relations;
  const std::vector<JoinIndex>& indexes;
  const FdOptions& options;
  std::vector<WideTuple> collected;
  TupleIndex collected_index;

  void check_deadline() const {
    if (options.deadline &&
        std::chrono::steady_clock::now() > *options.deadline) {
      throw DeadlineExceeded("full disjunction exceeded its deadline");
    }
  }

  void walk(const IntegratedTable& prefix, std::vector<char>& used,
            std::size_t depth) {
    if (depth == relations.size()) {
      for (const auto& t : prefix.tuples()) {
        insert_distinct(collected, collected_index, t);
      }
      return;
    }
    for (std::size_t k = 0; k < relations.size(); ++k) {
      if (used[k]) continue;
      check_deadline();
      used[k] = 1;
      walk(join_indexed(prefix, relations[k], indexes[k]), used, depth + 1);
      used[k] = 0;
    }
  }
};

}  // namespace

ValuePool::ValuePool() { strings_.emplace_back(); }

ValueId ValuePool::intern(std::string_view text) {
  if (const auto it = ids_.find(text); it != ids_.end()) return it->second;
  strings_.emplace_back(text);
  const auto id = static_cast<ValueId>(strings_.size() - 1);
  ids_.emplace(strings_.back(), id);
  return id;
}

std::optional<ValueId> ValuePool::find(std::string_view text) const {
  if (const auto it = ids_.find(text); it != ids_.end()) return it->second;
  return std::nullopt;
}

JoinCheck join_consistent(const WideTuple& a, const WideTuple& b) {
  if (a.values.size() != b.values.size()) {
    throw ContractViolation("tuples over different attribute universes");
  }
  JoinCheck check{true, false};
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const ValueId x = a.values[i];
    const ValueId y = b.values[i];
    if (x == kNullValue || y == kNullValue) continue;
    if (x != y) return JoinCheck{false, false};
    check.connected = true;
  }
  return check;
}

WideTuple merge_tuples(std::span<const WideTuple> parts) {
  if (parts.empty()) throw ContractViolation("merge_tuples: nothing to merge");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (!join_consistent(parts[i], parts[j]).consistent) {
        throw ContractViolation("merge_tuples: parts are not join-consistent");
      }
    }
  }
  WideTuple out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = merge_pair(out, parts[i]);
  return out;
}

bool subsumes(const WideTuple& a, const WideTuple& b) {
  if (a.values.size() != b.values.size()) {
    throw ContractViolation("tuples over different attribute universes");
  }
  bool strictly_more = false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const ValueId x = a.values[i];
    const ValueId y = b.values[i];
    if (y == kNullValue) {
      if (x != kNullValue) strictly_more = true;
    } else if (x != y) {
      return false;
    }
  }
  return strictly_more;
}

IntegratedTable::IntegratedTable(std::vector<std::string> attributes,
                                 std::shared_ptr<ValuePool> pool)
    : attributes_(std::move(attributes)), pool_(std::move(pool)) {
  if (!pool_) pool_ = std::make_shared<ValuePool>();
}

void IntegratedTable::add(const std::vector<Cell>& cells,
                          std::vector<RowRef> provenance) {
  if (cells.size() != attributes_.size()) {
    throw ContractViolation("tuple arity does not match the attributes");
  }
  WideTuple t;
  t.values.reserve(cells.size());
  for (const Cell& c : cells) {
    t.values.push_back(c ? pool_->intern(*c) : kNullValue);
  }
  std::sort(provenance.begin(), provenance.end());
  t.provenance = std::move(provenance);
  tuples_.push_back(std::move(t));
}

std::vector<Cell> IntegratedTable::cells(const WideTuple& t) const {
  std::vector<Cell> out;
  out.reserve(t.values.size());
  for (ValueId v : t.values) {
    out.push_back(v == kNullValue ? Cell{} : Cell{pool_->text(v)});
  }
  return out;
}

std::vector<std::vector<Cell>> IntegratedTable::rows() const {
  std::vector<std::vector<Cell>> out;
  out.reserve(tuples_.size());
  for (const auto& t : tuples_) out.push_back(cells(t));
  return out;
}

void IntegratedTable::sort() {
  // Rank every id by its text once; NULL sorts after everything.
  std::vector<ValueId> ids(pool_->size());
  std::iota(ids.begin(), ids.end(), ValueId{0});
  std::sort(ids.begin() + 1, ids.end(), [&](ValueId a, ValueId b) {
    return pool_->text(a) < pool_->text(b);
  });
  std::vector<std::uint32_t> rank(ids.size());
  for (std::size_t i = 1; i < ids.size(); ++i) {
    rank[ids[i]] = static_cast<std::uint32_t>(i);
  }
  rank[kNullValue] = static_cast<std::uint32_t>(ids.size());

  std::sort(tuples_.begin(), tuples_.end(),
            [&](const WideTuple& a, const WideTuple& b) {
              for (std::size_t i = 0; i < a.values.size(); ++i) {
                const auto ra = rank[a.values[i]];
                const auto rb = rank[b.values[i]];
                if (ra != rb) return ra < rb;
              }
              return a.provenance < b.provenance;
            });
}

IntegratedTable outer_join(const IntegratedTable& r, const IntegratedTable& s) {
  check_compatible(r, s);
  return join_indexed(r, s, JoinIndex(s));
}

IntegratedTable outer_union(std::span<const IntegratedTable> relations) {
  if (relations.empty()) return IntegratedTable({}, nullptr);
  std::vector<std::string> attributes;
  for (const auto& rel : relations) {
    for (const auto& a : rel.attributes()) {
      if (std::find(attributes.begin(), attributes.end(), a) ==
          attributes.end()) {
        attributes.push_back(a);
      }
    }
  }
  IntegratedTable out(attributes, relations.front().pool());
  TupleIndex index;
  for (const auto& rel : relations) {
    std::vector<std::size_t> position(rel.attributes().size());
    for (std::size_t a = 0; a < rel.attributes().size(); ++a) {
      position[a] = static_cast<std::size_t>(
          std::find(attributes.begin(), attributes.end(), rel.attributes()[a]) -
          attributes.begin());
    }
    const bool same_pool = rel.pool() == out.pool();
    for (const auto& t : rel.tuples()) {
      WideTuple padded;
      padded.values.assign(attributes.size(), kNullValue);
      for (std::size_t a = 0; a < t.values.size(); ++a) {
        const ValueId v = t.values[a];
        padded.values[position[a]] =
            (v == kNullValue || same_pool) ? v
                                           : out.pool()->intern(
                                                 rel.pool()->text(v));
      }
      padded.provenance = t.provenance;
      insert_distinct(out.tuples(), index, padded);
    }
  }
  return out;
}

IntegratedTable remove_subsumed(const IntegratedTable& table) {
  IntegratedTable distinct(table.attributes(), table.pool());
  TupleIndex index;
  for (const auto& t : table.tuples()) {
    insert_distinct(distinct.tuples(), index, t);
  }
  const auto& tuples = distinct.tuples();
  const std::size_t arity = table.attributes().size();

  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> postings;
  std::vector<std::size_t> filled(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    for (std::size_t a = 0; a < arity; ++a) {
      const ValueId v = tuples[t].values[a];
      if (v == kNullValue) continue;
      postings[(static_cast<std::uint64_t>(a) << 32) | v].push_back(
          static_cast<std::uint32_t>(t));
      ++filled[t];
    }
  }
  const bool any_filled =
      std::any_of(filled.begin(), filled.end(), [](auto f) { return f > 0; });

  IntegratedTable out(table.attributes(), table.pool());
  for (std::size_t b = 0; b < tuples.size(); ++b) {
    if (filled[b] == 0) {
      // An all-NULL tuple is contained in any tuple with information.
      if (!any_filled && out.size() == 0) out.tuples().push_back(tuples[b]);
      continue;
    }
    // Candidates must share b's rarest (attribute, value).
    const std::vector<std::uint32_t>* rarest = nullptr;
    for (std::size_t a = 0; a < arity; ++a) {
      const ValueId v = tuples[b].values[a];
      if (v == kNullValue) continue;
      const auto& p = postings.at((static_cast<std::uint64_t>(a) << 32) | v);
      if (!rarest || p.size() < rarest->size()) rarest = &p;
    }
    bool subsumed = false;
    for (std::uint32_t a : *rarest) {
      if (filled[a] > filled[b] && subsumes(tuples[a], tuples[b])) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) out.tuples().push_back(tuples[b]);
  }
  return out;
}

std::vector<IntegratedTable> base_relations(const AlignedRelationSet& set,
                                            std::shared_ptr<ValuePool> pool) {
  if (!pool) pool = std::make_shared<ValuePool>();
  std::vector<IntegratedTable> out;
  out.reserve(set.tables().size());
  const std::size_t arity = set.attributes().size();
  for (const auto& table : set.tables()) {
    IntegratedTable rel(set.attributes(), pool);
    rel.tuples().reserve(table.rows.size());
    std::vector<std::size_t> attr(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      attr[c] = set.attribute_of(table.table_id, c);
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      WideTuple t;
      t.values.assign(arity, kNullValue);
      bool any = false;
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const Cell& cell = table.rows[r][c];
        if (!cell) continue;
        t.values[attr[c]] = pool->intern(*cell);
        any = true;
      }
      if (!any) continue;
      t.provenance.push_back(RowRef{table.table_id, r});
      rel.tuples().push_back(std::move(t));
    }
    out.push_back(std::move(rel));
  }
  return out;
}

IntegratedTable full_disjunction(const AlignedRelationSet& set,
                                 const FdOptions& options) {
  const std::size_t n = set.tables().size();
  if (n > options.permutation_cap) {
    throw PermutationCapExceeded(
        "full disjunction over " + std::to_string(n) +
        " tables exceeds the permutation cap of " +
        std::to_string(options.permutation_cap) + " (raise it with --perm-cap)");
  }
  auto pool = std::make_shared<ValuePool>();
  std::vector<IntegratedTable> all = base_relations(set, pool);

  std::vector<IntegratedTable> relations;
  for (auto& rel : all) {
    if (rel.size() > 0) relations.push_back(std::move(rel));
  }
  IntegratedTable result(set.attributes(), pool);
  if (relations.empty()) return result;

  std::vector<JoinIndex> indexes;
  indexes.reserve(relations.size());
  for (const auto& rel : relations) indexes.emplace_back(rel);

  PermutationWalk walk{relations, indexes, options, {}, {}};
  std::vector<char> used(relations.size());
  for (std::size_t k = 0; k < relations.size(); ++k) {
    walk.check_deadline();
    used[k] = 1;
    walk.walk(relations[k], used, 1);
    used[k] = 0;
  }
  result.tuples() = std::move(walk.collected);
  IntegratedTable out = remove_subsumed(result);
  out.sort();
  return out;
}

std::string format_integrated(const IntegratedTable& table,
                              bool with_provenance, char delimiter) {
  const std::vector<std::string> null_markers = LoadOptions{}.null_markers;
  std::string out;
  for (std::size_t a = 0; a < table.attributes().size(); ++a) {
    if (a > 0) out.push_back(delimiter);
    out += escape_field(table.attributes()[a], delimiter, {});
  }
  if (with_provenance) {
    if (!table.attributes().empty()) out.push_back(delimiter);
    out += "provenance";
  }
  out.push_back('\n');
  for (const auto& t : table.tuples()) {
    for (std::size_t a = 0; a < t.values.size(); ++a) {
      if (a > 0) out.push_back(delimiter);
      if (t.values[a] != kNullValue) {
        out += escape_field(table.pool()->text(t.values[a]), delimiter,
                            null_markers);
      }
    }
    if (with_provenance) {
      if (!t.values.empty()) out.push_back(delimiter);
      std::string refs;
      for (std::size_t i = 0; i < t.provenance.size(); ++i) {
        if (i > 0) refs.push_back(';');
        refs += std::to_string(t.provenance[i].table_id) + ":" +
                std::to_string(t.provenance[i].row);
      }
      out += escape_field(refs, delimiter, null_markers);
    }
    out.push_back('\n');
  }
  return out;
}

void write_integrated(const IntegratedTable& table,
                      const std::filesystem::path& path, bool with_provenance,
                      char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << format_integrated(table, with_provenance, delimiter);
}

}  // namespace fuzzyfd
