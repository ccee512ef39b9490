#include "fuzzyfd/table.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fuzzyfd/errors.h"
#include "json.hpp"

namespace fuzzyfd {
namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool is_null_marker(std::string_view s,
                    const std::vector<std::string>& null_markers) {
  return std::any_of(null_markers.begin(), null_markers.end(),
                     [&](const std::string& m) { return iequals(s, m); });
}

// RFC 4180 style records; quotes may span lines.
std::vector<std::vector<Field>> split_records(std::string_view text,
                                              char delimiter) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  std::vector<std::vector<Field>> records;
  std::vector<Field> record;
  Field field;
  bool in_quotes = false;
  bool record_has_content = false;

  const auto end_field = [&] {
    if (!field.quoted) field.text = std::string(trim(field.text));
    record.push_back(std::move(field));
    field = Field{};
  };
  const auto end_record = [&] {
    end_field();
    if (record_has_content) records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field.text).empty()) {
      field.text.clear();
      field.quoted = true;
      in_quotes = true;
      record_has_content = true;
    } else if (c == delimiter) {
      end_field();
      record_has_content = true;
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // dropped; handles CRLF
    } else {
      if (!field.quoted) field.text.push_back(c);
      record_has_content = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field");
  end_record();
  return records;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw InputError("cannot read " + path.string());
  return buffer.str();
}

}  // namespace

std::optional<std::size_t> Table::find_column(std::string_view column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

std::size_t Table::column_index(std::string_view column) const {
  if (auto idx = find_column(column)) return *idx;
  throw InputError("table " + std::to_string(table_id) + " has no column '" +
                   std::string(column) + "'");
}

Table parse_table(std::string_view text, TableId table_id,
                  const LoadOptions& options) {
  auto records = split_records(text, options.delimiter);
  if (records.empty()) throw InputError("missing header row");

  Table table;
  table.table_id = table_id;
  for (auto& f : records.front()) table.columns.push_back(std::move(f.text));

  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& record = records[r];
    if (record.size() != table.columns.size()) {
      throw InputError("row " + std::to_string(r) + " has " +
                       std::to_string(record.size()) + " cells, header has " +
                       std::to_string(table.columns.size()));
    }
    Row row;
    row.reserve(record.size());
    for (auto& f : record) {
      if (!f.quoted && is_null_marker(f.text, options.null_markers)) {
        row.emplace_back(std::nullopt);
      } else {
        row.emplace_back(std::move(f.text));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table load_table(const std::filesystem::path& path, TableId table_id,
                 const LoadOptions& options) {
  const std::string text = read_file(path);
  try {
    Table table = parse_table(text, table_id, options);
    table.name = path.stem().string();
    return table;
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string escape_field(std::string_view field, char delimiter,
                         const std::vector<std::string>& null_markers) {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
          std::string_view::npos ||
      trim(field) != field || is_null_marker(field, null_markers);
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_table(const Table& table, const LoadOptions& options) {
  std::string out;
  const auto write_record = [&](const auto& cells, auto&& cell_text) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(options.delimiter);
      out += cell_text(cells[i]);
    }
    out.push_back('\n');
  };
  write_record(table.columns, [&](const std::string& c) {
    return escape_field(c, options.delimiter, {});
  });
  for (const auto& row : table.rows) {
    write_record(row, [&](const Cell& c) -> std::string {
      if (!c) return "";
      return escape_field(*c, options.delimiter, options.null_markers);
    });
  }
  return out;
}

void write_table(const Table& table, const std::filesystem::path& path,
                 const LoadOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << format_table(table, options);
}

DistinctValues distinct_values(const Table& table, std::string_view column) {
  const std::size_t idx = table.column_index(column);
  DistinctValues result;
  for (const auto& row : table.rows) {
    const Cell& cell = row[idx];
    if (!cell) continue;
    auto [it, inserted] = result.counts.try_emplace(*cell, 0);
    ++it->second;
    if (inserted) result.values.push_back(*cell);
  }
  return result;
}

void AlignmentSpec::add(const std::string& attribute, ColumnRef column) {
  auto [it, inserted] = columns_.try_emplace(attribute);
  if (inserted) order_.push_back(attribute);
  it->second.push_back(std::move(column));
}

const std::vector<ColumnRef>& AlignmentSpec::columns(
    const std::string& attribute) const {
  const auto it = columns_.find(attribute);
  if (it == columns_.end()) {
    throw InputError("unknown attribute '" + attribute + "'");
  }
  return it->second;
}

AlignmentSpec parse_alignment_spec(std::string_view json_text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("alignment spec is not valid JSON: ") +
                     e.what());
  }
  if (!doc.is_object()) {
    throw InputError("alignment spec must be a JSON object");
  }
  AlignmentSpec spec;
  for (const auto& [attribute, refs] : doc.items()) {
    if (!refs.is_array()) {
      throw InputError("attribute '" + attribute + "' must map to an array");
    }
    for (const auto& ref : refs) {
      if (!ref.is_object() || !ref.contains("table") ||
          !ref.contains("column") || !ref["table"].is_number_integer() ||
          !ref["column"].is_string()) {
        throw InputError("attribute '" + attribute +
                         "': entries need integer 'table' and string "
                         "'column'");
      }
      spec.add(attribute, ColumnRef{ref["table"].get<int>(),
                                    ref["column"].get<std::string>()});
    }
  }
  return spec;
}

AlignmentSpec load_alignment_spec(const std::filesystem::path& path) {
  try {
    return parse_alignment_spec(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

AlignedRelationSet::AlignedRelationSet(std::vector<Table> tables,
                                       AlignmentSpec spec)
    : tables_(std::move(tables)), spec_(std::move(spec)) {
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (tables_[i].table_id != static_cast<TableId>(i + 1)) {
      throw InputError("table ids must be 1..n in input order");
    }
    for (const auto& row : tables_[i].rows) {
      if (row.size() != tables_[i].columns.size()) {
        throw InputError("table " + std::to_string(i + 1) +
                         " has a ragged row");
      }
    }
  }

  column_attribute_.resize(tables_.size());
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    column_attribute_[i].assign(tables_[i].columns.size(),
                                static_cast<std::size_t>(-1));
  }

  for (const auto& attribute : spec_.attributes()) {
    std::set<TableId> seen;
    for (const auto& ref : spec_.columns(attribute)) {
      if (ref.table_id < 1 ||
          ref.table_id > static_cast<TableId>(tables_.size())) {
        throw InputError("attribute '" + attribute + "' references table " +
                         std::to_string(ref.table_id) + " which does not exist");
      }
      if (!seen.insert(ref.table_id).second) {
        throw InputError("attribute '" + attribute +
                         "' aligns two columns of table " +
                         std::to_string(ref.table_id));
      }
      const Table& t = tables_[ref.table_id - 1];
      const auto col = t.find_column(ref.column);
      if (!col) {
        throw InputError("attribute '" + attribute + "' references column '" +
                         ref.column + "' missing from table " +
                         std::to_string(ref.table_id));
      }
      if (column_attribute_[ref.table_id - 1][*col] !=
          static_cast<std::size_t>(-1)) {
        throw InputError("column '" + ref.column + "' of table " +
                         std::to_string(ref.table_id) +
                         " is aligned to two attributes");
      }
      column_attribute_[ref.table_id - 1][*col] = 0;  // placeholder
    }
  }

  // Names for unaligned columns; a header repeated across tables or equal to
  // an aligned attribute name is qualified with its table id.
  std::map<std::string, int> header_uses;
  for (const auto& t : tables_) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (column_attribute_[t.table_id - 1][c] == static_cast<std::size_t>(-1))
        ++header_uses[t.columns[c]];
    }
  }
  const auto unaligned_name = [&](const Table& t, std::size_t c) {
    const std::string& h = t.columns[c];
    if (header_uses[h] > 1 || spec_.contains(h)) {
      return h + "@T" + std::to_string(t.table_id);
    }
    return h;
  };

  // Attribute order: first appearance scanning tables, then columns.
  std::map<std::string, std::size_t> index_of;
  const auto intern = [&](const std::string& name) {
    auto [it, inserted] = index_of.try_emplace(name, attributes_.size());
    if (inserted) attributes_.push_back(name);
    return it->second;
  };
  std::map<std::pair<TableId, std::size_t>, std::string> aligned_name;
  for (const auto& attribute : spec_.attributes()) {
    for (const auto& ref : spec_.columns(attribute)) {
      aligned_name[{ref.table_id,
                    *tables_[ref.table_id - 1].find_column(ref.column)}] =
          attribute;
    }
  }
  for (const auto& t : tables_) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto it = aligned_name.find({t.table_id, c});
      column_attribute_[t.table_id - 1][c] =
          intern(it != aligned_name.end() ? it->second : unaligned_name(t, c));
    }
  }
  // Aligned attributes with no columns still belong to the universe.
  for (const auto& attribute : spec_.attributes()) intern(attribute);
}

const Table& AlignedRelationSet::table(TableId id) const {
  if (id < 1 || id > static_cast<TableId>(tables_.size())) {
    throw InputError("no table " + std::to_string(id));
  }
  return tables_[id - 1];
}

std::optional<std::size_t> AlignedRelationSet::attribute_index(
    std::string_view name) const {
  const auto it = std::find(attributes_.begin(), attributes_.end(), name);
  if (it == attributes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - attributes_.begin());
}

AlignedRelationSet AlignedRelationSet::with_tables(
    std::vector<Table> tables) const {
  if (tables.size() != tables_.size()) {
    throw ContractViolation("with_tables: table count changed");
  }
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].columns != tables_[i].columns) {
      throw ContractViolation("with_tables: columns changed");
    }
  }
  AlignedRelationSet copy = *this;
  copy.tables_ = std::move(tables);
  return copy;
}

std::vector<AlignedColumn> project_aligned(const AlignedRelationSet& set,
                                           const std::string& attribute) {
  std::vector<AlignedColumn> result;
  for (const auto& ref : set.spec().columns(attribute)) {
    const Table& t = set.table(ref.table_id);
    const std::size_t idx = t.column_index(ref.column);
    AlignedColumn column{ref.table_id, ref.column, {}};
    column.cells.reserve(t.rows.size());
    for (const auto& row : t.rows) column.cells.push_back(row[idx]);
    result.push_back(std::move(column));
  }
  std::sort(result.begin(), result.end(),
            [](const AlignedColumn& a, const AlignedColumn& b) {
              return a.table_id < b.table_id;
            });
  return result;
}

AlignedRelationSet load_relation_set(
    const std::vector<std::filesystem::path>& paths,
    const std::filesystem::path& alignment_path, const LoadOptions& options) {
  AlignmentSpec spec = load_alignment_spec(alignment_path);
  std::vector<Table> tables;
  tables.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    tables.push_back(load_table(paths[i], static_cast<TableId>(i + 1), options));
  }
  return AlignedRelationSet(std::move(tables), std::move(spec));
}

}  // namespace fuzzyfd
