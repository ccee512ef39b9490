#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "fuzzyfd/embedding.h"
#include "fuzzyfd/full_disjunction.h"
#include "fuzzyfd/table.h"

namespace fuzzyfd::testing {

inline std::filesystem::path data_dir() { return FUZZYFD_TEST_DATA; }
inline std::filesystem::path cities_dir() { return data_dir() / "cities"; }

// Cells written as "-" become NULL.
inline Table make_table(TableId id, std::vector<std::string> columns,
                        const std::vector<std::vector<std::string>>& rows) {
  Table t;
  t.table_id = id;
  t.name = "T" + std::to_string(id);
  t.columns = std::move(columns);
  for (const auto& r : rows) {
    Row row;
    for (const auto& c : r) {
      row.push_back(c == "-" ? Cell{} : Cell{c});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline AlignedRelationSet load_cities() {
  const auto dir = cities_dir();
  return load_relation_set({dir / "t1.csv", dir / "t2.csv", dir / "t3.csv"},
                           dir / "alignment.json");
}

inline std::shared_ptr<EmbeddingProvider> cities_dictionary() {
  return std::make_shared<DictionaryEmbedder>(
      load_synonym_groups(cities_dir() / "dictionary.json"));
}

// Output rows as a set, for order-insensitive comparison.
inline std::multiset<std::vector<Cell>> row_set(const IntegratedTable& t) {
  auto rows = t.rows();
  return {rows.begin(), rows.end()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fuzzyfd_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name,
                              const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace fuzzyfd::testing
