#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fuzzyfd/errors.h"
#include "fuzzyfd/table.h"

namespace fuzzyfd {

using ValueId = std::uint32_t;
inline constexpr ValueId kNullValue = 0;

// Interned cell values. Id 0 is the labeled null. Not thread-safe for
// writers; the FD engine interns everything before joining.
class ValuePool {
 public:
  ValuePool();
  ValuePool(const ValuePool&) = delete;
  ValuePool& operator=(const ValuePool&) = delete;

  ValueId intern(std::string_view text);
  std::optional<ValueId> find(std::string_view text) const;
  const std::string& text(ValueId id) const { return strings_[id]; }
  std::size_t size() const { return strings_.size(); }

 private:
  std::deque<std::string> strings_;
  std::unordered_map<std::string_view, ValueId> ids_;
};

struct RowRef {
  TableId table_id = 0;
  std::size_t row = 0;  // 0-based data row

  friend auto operator<=>(const RowRef&, const RowRef&) = default;
};

// A tuple over the attribute union; provenance lists the input rows that
// were merged into it, ascending.
struct WideTuple {
  std::vector<ValueId> values;
  std::vector<RowRef> provenance;
};

struct JoinCheck {
  bool consistent = false;  // equal wherever both are non-NULL
  bool connected = false;   // at least one attribute non-NULL in both
};

JoinCheck join_consistent(const WideTuple& a, const WideTuple& b);

// Attribute-wise union of pairwise consistent tuples; provenance is the
// union of the parts'. Throws ContractViolation on inconsistent parts.
WideTuple merge_tuples(std::span<const WideTuple> parts);

// True iff b is NULL or equal to a on every attribute and a != b.
bool subsumes(const WideTuple& a, const WideTuple& b);

class IntegratedTable {
 public:
  IntegratedTable(std::vector<std::string> attributes,
                  std::shared_ptr<ValuePool> pool);

  const std::vector<std::string>& attributes() const { return attributes_; }
  const std::shared_ptr<ValuePool>& pool() const { return pool_; }
  std::vector<WideTuple>& tuples() { return tuples_; }
  const std::vector<WideTuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }

  // Appends a tuple given as cells, one per attribute.
  void add(const std::vector<Cell>& cells, std::vector<RowRef> provenance = {});
  std::vector<Cell> cells(const WideTuple& t) const;
  std::vector<std::vector<Cell>> rows() const;

  // Orders tuples by attribute values (string order, NULLs last), then by
  // provenance.
  void sort();

 private:
  std::vector<std::string> attributes_;
  std::shared_ptr<ValuePool> pool_;
  std::vector<WideTuple> tuples_;
};

// Full outer join: every join-consistent and connected pair is merged,
// tuples of either side without a partner are kept as they are.
// Both sides must share attributes and pool.
IntegratedTable outer_join(const IntegratedTable& r, const IntegratedTable& s);

// Union over the attribute union (missing attributes become NULL), exact
// value duplicates collapsed keeping the smallest provenance.
IntegratedTable outer_union(std::span<const IntegratedTable> relations);

// Keeps one copy of each distinct tuple that no other tuple subsumes.
IntegratedTable remove_subsumed(const IntegratedTable& table);

class PermutationCapExceeded : public InputError {
 public:
  using InputError::InputError;
};

struct FdOptions {
  std::size_t permutation_cap = 7;  // max number of input tables
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Each table padded to the attribute union. Rows with no non-NULL cell are
// dropped.
std::vector<IntegratedTable> base_relations(const AlignedRelationSet& set,
                                            std::shared_ptr<ValuePool> pool);

// Outer joins left-folded over every order of the input tables, outer
// unioned, subsumed tuples removed; output sorted. Folds that share a
// prefix share its intermediate result, and empty tables are left out of
// the orders since joining with them is the identity.
IntegratedTable full_disjunction(const AlignedRelationSet& set,
                                 const FdOptions& options = {});

// Brute-force reference: every set of at most one tuple per table that is
// pairwise consistent and connected is merged, then subsumed tuples are
// dropped. Refuses inputs with more than `max_tuples` tuples.
IntegratedTable fd_oracle(const AlignedRelationSet& set,
                          std::size_t max_tuples = 20);

std::string format_integrated(const IntegratedTable& table,
                              bool with_provenance, char delimiter = ',');
void write_integrated(const IntegratedTable& table,
                      const std::filesystem::path& path, bool with_provenance,
                      char delimiter = ',');

}  // namespace fuzzyfd
