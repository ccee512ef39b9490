#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "fuzzyfd/errors.h"
#include "fuzzyfd/evaluation.h"

namespace fuzzyfd {
namespace {

constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::size_t kKeyLength = 12;

constexpr std::array<std::string_view, 16> kWords = {
    "silent", "river", "night", "empire", "garden", "shadow", "winter", "city",
    "last", "broken", "golden", "storm", "echo", "lantern", "harbor", "signal"};
constexpr std::array<std::string_view, 8> kGenres = {
    "Drama", "Comedy", "Action", "Documentary",
    "Horror", "Romance", "Thriller", "Animation"};
constexpr std::array<std::string_view, 8> kRegions = {"US", "GB", "DE", "FR",
                                                      "JP", "IN", "BR", "CA"};
constexpr std::array<std::string_view, 5> kCategories = {
    "actor", "actress", "director", "writer", "producer"};
constexpr std::array<std::string_view, 12> kNames = {
    "Ada", "Bruno", "Chen", "Dara", "Emil", "Farah",
    "Goran", "Hana", "Ivo", "Jun", "Kemal", "Lena"};

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

template <std::size_t N>
std::string pick(Rng& rng, const std::array<std::string_view, N>& items) {
  return std::string(items[uniform(rng, 0, N - 1)]);
}

class KeyFactory {
 public:
  explicit KeyFactory(Rng& rng) : rng_(rng) {}

  std::string fresh() {
    for (;;) {
      std::string key(kKeyLength, ' ');
      for (char& c : key) c = kAlphabet[uniform(rng_, 0, kAlphabet.size() - 1)];
      if (used_.insert(key).second) return key;
    }
  }

  // One random edit of `key` that collides with no key handed out so far.
  std::string misspell(const std::string& key) {
    for (;;) {
      std::string out = key;
      const std::size_t pos = uniform(rng_, 0, key.size() - 2);
      switch (uniform(rng_, 0, 3)) {
        case 0:
          std::swap(out[pos], out[pos + 1]);
          break;
        case 1:
          out.erase(pos, 1);
          break;
        case 2:
          out.insert(pos, 1, out[pos]);
          break;
        default:
          out[pos] = kAlphabet[uniform(rng_, 0, kAlphabet.size() - 1)];
          break;
      }
      if (out != key && used_.insert(out).second) return out;
    }
  }

 private:
  Rng& rng_;
  std::unordered_set<std::string> used_;
};

// Universe row: target table (0-based) and cells.
struct UniverseRow {
  std::size_t table = 0;
  Row cells;
};

struct TableShape {
  std::string_view name;
  std::vector<std::string> columns;
  int title_column = -1;
  int person_column = -1;
};

const std::array<TableShape, 6>& shapes() {
  static const std::array<TableShape, 6> s = {{
      {"title_basics", {"tconst", "primaryTitle", "startYear", "genres"}, 0, -1},
      {"title_ratings", {"tconst", "averageRating", "numVotes"}, 0, -1},
      {"title_akas", {"titleId", "title", "region"}, 0, -1},
      {"title_principals", {"tconst", "nconst", "category"}, 0, 1},
      {"name_basics", {"nconst", "primaryName", "birthYear"}, -1, 0},
      {"title_crew", {"tconst", "directors", "writers"}, 0, -1},
  }};
  return s;
}

std::string title_text(Rng& rng) {
  std::string t = pick(rng, kWords);
  t[0] = static_cast<char>(t[0] - 'a' + 'A');
  return "The " + t + " " + pick(rng, kWords);
}

std::string person_name(Rng& rng) {
  return pick(rng, kNames) + " " + pick(rng, kNames) + "son";
}

UniverseRow aka_row(Rng& rng, const std::string& title) {
  return {2, {title, title_text(rng), pick(rng, kRegions)}};
}

}  // namespace

SyntheticSet generate_synthetic(const GeneratorParams& params) {
  if (!(params.overlap > 0.0 && params.overlap <= 1.0)) {
    throw InputError("overlap must be in (0, 1]");
  }
  if (!(params.corruption_rate >= 0.0 && params.corruption_rate <= 1.0)) {
    throw InputError("corruption rate must be in [0, 1]");
  }
  Rng rng(params.seed);
  KeyFactory keys(rng);

  // Each title contributes basics, ratings, crew, 1-3 akas and 1-3
  // principals with one name_basics row per principal. Titles are added while
  // the full minimum of six rows still fits; leftover slots become extra
  // akas of random titles.
  const std::size_t universe_size = static_cast<std::size_t>(
      std::llround(static_cast<double>(params.total_tuples) / params.overlap));
  std::vector<UniverseRow> universe;
  std::vector<std::string> titles;
  while (universe.size() + 6 <= universe_size) {
    const std::size_t room = universe_size - universe.size();
    const std::string title = keys.fresh();
    titles.push_back(title);
    const std::size_t akas = std::min<std::size_t>(uniform(rng, 1, 3), room - 5);
    const std::size_t principals =
        std::min<std::size_t>(uniform(rng, 1, 3), (room - 3 - akas) / 2);
    universe.push_back({0, {title, title_text(rng),
                            std::to_string(uniform(rng, 1950, 2023)),
                            pick(rng, kGenres)}});
    universe.push_back(
        {1, {title, std::to_string(uniform(rng, 10, 99) / 10.0).substr(0, 3),
             std::to_string(uniform(rng, 5, 500000))}});
    for (std::size_t i = 0; i < akas; ++i) universe.push_back(aka_row(rng, title));
    for (std::size_t i = 0; i < principals; ++i) {
      const std::string person = keys.fresh();
      universe.push_back({3, {title, person, pick(rng, kCategories)}});
      universe.push_back({4, {person, person_name(rng),
                              std::to_string(uniform(rng, 1920, 2005))}});
    }
    universe.push_back({5, {title, person_name(rng), person_name(rng)}});
  }
  while (universe.size() < universe_size && !titles.empty()) {
    universe.push_back(aka_row(rng, titles[uniform(rng, 0, titles.size() - 1)]));
  }

  // Sample exactly total_tuples rows, keeping universe order.
  std::vector<std::size_t> keep(universe.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (params.total_tuples < universe.size()) {
    std::shuffle(keep.begin(), keep.end(), rng);
    keep.resize(params.total_tuples);
    std::sort(keep.begin(), keep.end());
  }

  std::vector<Table> tables(6);
  for (std::size_t t = 0; t < 6; ++t) {
    tables[t].table_id = static_cast<TableId>(t + 1);
    tables[t].name = std::string(shapes()[t].name);
    tables[t].columns = shapes()[t].columns;
  }
  for (std::size_t i : keep) {
    tables[universe[i].table].rows.push_back(std::move(universe[i].cells));
  }

  // Misspell keys: the first table carrying a key keeps it, every other
  // table misspells it with probability corruption_rate.
  SyntheticSet out;
  for (const auto& [attribute, column_of] :
       std::array<std::pair<std::string, int TableShape::*>, 2>{
           {{"title", &TableShape::title_column},
            {"person", &TableShape::person_column}}}) {
    std::map<std::string, std::vector<std::string>> variants;  // key -> group
    std::map<std::string, std::set<std::pair<std::string, std::size_t>>>
        carriers;  // key -> (string, table)
    std::unordered_set<std::string> seen;
    for (std::size_t t = 0; t < 6; ++t) {
      const int c = shapes()[t].*column_of;
      if (c < 0) continue;
      std::map<std::string, std::string> replacement;
      for (auto& row : tables[t].rows) {
        const std::string key = *row[c];
        auto it = replacement.find(key);
        if (it == replacement.end()) {
          std::string value = key;
          const bool first = seen.insert(key).second;
          if (!first && params.corruption_rate > 0.0 &&
              std::bernoulli_distribution(params.corruption_rate)(rng)) {
            value = keys.misspell(key);
            auto& group = variants[key];
            if (group.empty()) group.push_back(key);
            group.push_back(value);
          }
          it = replacement.emplace(key, value).first;
        }
        carriers[key].insert({it->second, t});
        row[c] = it->second;
      }
    }
    for (auto& [key, group] : variants) {
      out.synonym_groups.push_back(group);
      const auto& present = carriers[key];
      for (auto a = present.begin(); a != present.end(); ++a) {
        for (auto b = std::next(a); b != present.end(); ++b) {
          if (a->first != b->first && a->second != b->second) {
            out.gold.pairs[attribute].insert(unordered_pair(a->first, b->first));
          }
        }
      }
    }
    if (!out.gold.pairs.count(attribute)) out.gold.pairs[attribute];
  }

  AlignmentSpec spec;
  for (std::size_t t = 0; t < 6; ++t) {
    const TableShape& s = shapes()[t];
    if (s.title_column >= 0) {
      spec.add("title", {static_cast<TableId>(t + 1), s.columns[s.title_column]});
    }
  }
  for (std::size_t t = 0; t < 6; ++t) {
    const TableShape& s = shapes()[t];
    if (s.person_column >= 0) {
      spec.add("person",
               {static_cast<TableId>(t + 1), s.columns[s.person_column]});
    }
  }
  out.set = AlignedRelationSet(std::move(tables), std::move(spec));
  return out;
}

}  // namespace fuzzyfd
