#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fuzzyfd {

using Cell = std::optional<std::string>;  // std::nullopt is a labeled null
using Row = std::vector<Cell>;

// 1-based position of a table in its integration set.
using TableId = int;

struct Table {
  TableId table_id = 0;
  std::string name;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  // Index of `column`, or throws InputError.
  std::size_t column_index(std::string_view column) const;
  std::optional<std::size_t> find_column(std::string_view column) const;
};

struct LoadOptions {
  char delimiter = ',';
  // Compared case-insensitively against the whitespace-trimmed cell.
  std::vector<std::string> null_markers = {"", "NULL", "nan"};
};

// Reads a delimited text file whose first record is the header. Quoted
// fields are taken literally (no trimming, never a null marker).
Table load_table(const std::filesystem::path& path, TableId table_id,
                 const LoadOptions& options = {});
Table parse_table(std::string_view text, TableId table_id,
                  const LoadOptions& options = {});

// Writes a table so that load_table with the same options reproduces it.
void write_table(const Table& table, const std::filesystem::path& path,
                 const LoadOptions& options = {});
std::string format_table(const Table& table, const LoadOptions& options = {});

// Quotes `field` when needed for a delimited-text record.
std::string escape_field(std::string_view field, char delimiter,
                         const std::vector<std::string>& null_markers);

// Non-NULL values of one column, duplicates removed, first-occurrence order.
// `counts` keeps the multiplicity of every value.
struct DistinctValues {
  std::vector<std::string> values;
  std::unordered_map<std::string, std::size_t> counts;
};

DistinctValues distinct_values(const Table& table, std::string_view column);

struct ColumnRef {
  TableId table_id = 0;
  std::string column;

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

// Aligned attribute name -> the physical columns that carry it. Attribute
// order is the order in which attributes were declared.
class AlignmentSpec {
 public:
  void add(const std::string& attribute, ColumnRef column);

  const std::vector<std::string>& attributes() const { return order_; }
  const std::vector<ColumnRef>& columns(const std::string& attribute) const;
  bool contains(const std::string& attribute) const {
    return columns_.count(attribute) > 0;
  }
  bool empty() const { return order_.empty(); }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<ColumnRef>> columns_;
};

// Parses {"attr": [{"table": 1, "column": "City"}, ...], ...}.
AlignmentSpec parse_alignment_spec(std::string_view json_text);
AlignmentSpec load_alignment_spec(const std::filesystem::path& path);

// Tables of one integration set bound to their integrated attributes.
// Columns not named by the alignment spec become single-column attributes
// named after their header (qualified as "header@T<id>" on a clash).
class AlignedRelationSet {
 public:
  AlignedRelationSet() = default;
  // Validates that every referenced table and column exists, that at most
  // one column per table joins an attribute, and that table ids are 1..n in
  // order. Throws InputError otherwise.
  AlignedRelationSet(std::vector<Table> tables, AlignmentSpec spec);

  const std::vector<Table>& tables() const { return tables_; }
  const Table& table(TableId id) const;
  const AlignmentSpec& spec() const { return spec_; }
  const std::vector<std::string>& attributes() const { return attributes_; }

  // Attribute index of column `column` of table `id`.
  std::size_t attribute_of(TableId id, std::size_t column) const {
    return column_attribute_[id - 1][column];
  }
  std::optional<std::size_t> attribute_index(std::string_view name) const;

  // Same alignment, different cell contents (e.g. after value rewriting).
  AlignedRelationSet with_tables(std::vector<Table> tables) const;

 private:
  std::vector<Table> tables_;
  AlignmentSpec spec_;
  std::vector<std::string> attributes_;
  std::vector<std::vector<std::size_t>> column_attribute_;
};

// Values of one aligned column.
struct AlignedColumn {
  TableId table_id = 0;
  std::string column;
  std::vector<Cell> cells;
};

// One entry per aligned column of `attribute`, ascending table id.
std::vector<AlignedColumn> project_aligned(const AlignedRelationSet& set,
                                           const std::string& attribute);

// Loads `paths` as tables 1..n plus the alignment spec.
AlignedRelationSet load_relation_set(
    const std::vector<std::filesystem::path>& paths,
    const std::filesystem::path& alignment_path,
    const LoadOptions& options = {});

}  // namespace fuzzyfd
