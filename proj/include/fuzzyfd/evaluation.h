#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fuzzyfd/value_matcher.h"
#include "json.hpp"

namespace fuzzyfd {

// Unordered pair of distinct values, stored smaller-first.
using ValuePair = std::pair<std::string, std::string>;
ValuePair unordered_pair(std::string a, std::string b);

// attribute -> pairs of values that should land in one set.
struct GoldPairs {
  std::map<std::string, std::set<ValuePair>> pairs;
};

// Parses {"attribute": [["a", "b"], ...], ...}. Throws InputError naming the
// offending entry.
GoldPairs parse_gold(std::string_view json_text);
GoldPairs load_gold(const std::filesystem::path& path);
nlohmann::ordered_json gold_json(const GoldPairs& gold);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t correct = 0;
};

// Empty prediction: precision 1 if gold is empty, else 0. Empty gold:
// recall 1. F1 is 0 when precision + recall is 0.
Prf score_pairs(const std::set<ValuePair>& predicted,
                const std::set<ValuePair>& gold);

// Pairs of distinct values that share a set. Identical strings from
// different columns are equi-join matches and are not counted.
std::set<ValuePair> predicted_pairs(const AttributeMatch& match);

struct MatchScore {
  std::map<std::string, Prf> per_attribute;
  Prf macro;  // mean of per-attribute scores
  Prf micro;  // pooled pair counts
  std::vector<std::string> warnings;
};

// Scores every gold attribute that the prediction covers. Gold pairs naming
// values absent from the attribute's columns, or pairing a value with
// itself, are ignored with a warning.
MatchScore matching_prf(const MatchPartition& predicted, const GoldPairs& gold);

nlohmann::ordered_json score_json(const MatchScore& score);
std::string score_text(const MatchScore& score);

// Seeded IMDB-shaped integration set of six tables:
//   1 title_basics(tconst, primaryTitle, startYear, genres)
//   2 title_ratings(tconst, averageRating, numVotes)
//   3 title_akas(titleId, title, region)
//   4 title_principals(tconst, nconst, category)
//   5 name_basics(nconst, primaryName, birthYear)
//   6 title_crew(tconst, directors, writers)
// aligned on "title" (tables 1, 2, 3, 4, 6) and "person" (tables 4, 5).
struct GeneratorParams {
  std::uint64_t seed = 42;
  std::size_t total_tuples = 5000;
  // Probability that a row of the universe is kept. Below 1, keys of one
  // table have no partner in some others.
  double overlap = 1.0;
  // Probability that a key is misspelled in a table other than the first
  // one carrying it (consistently within that table).
  double corruption_rate = 0.0;
};

struct SyntheticSet {
  AlignedRelationSet set;
  // Each group is a key followed by its misspellings; only keys that were
  // actually misspelled get a group.
  std::vector<std::vector<std::string>> synonym_groups;
  GoldPairs gold;
};

SyntheticSet generate_synthetic(const GeneratorParams& params);

struct BenchOptions {
  GeneratorParams generator;  // total_tuples is overridden per size
  std::vector<std::size_t> sizes;
  bool run_regular = true;
  bool run_fuzzy = true;
  std::size_t repeats = 3;
  double theta = kDefaultTheta;
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
  std::size_t max_tuples = 200000;
  std::size_t jobs = 1;
};

struct BenchPoint {
  std::size_t input_tuples = 0;
  std::optional<double> regular_seconds;  // medians over repeats
  std::optional<double> fuzzy_seconds;
  std::optional<double> matcher_seconds;
  std::optional<std::size_t> regular_output;
  std::optional<std::size_t> fuzzy_output;
  // Whether both modes produced the same tuples; only checked on
  // equi-join data (no corruption) when both modes ran.
  std::optional<bool> parity;
  bool censored = false;
  std::string note;
};

struct BenchReport {
  std::vector<BenchPoint> points;  // ascending input_tuples
};

// Times full disjunction alone (regular) against matching + rewriting +
// full disjunction (fuzzy, with one cached n-gram provider, or the synthetic
// synonym dictionary when corruption is on) for each size.
BenchReport bench_scaling(const BenchOptions& options,
                          std::ostream* progress = nullptr);

std::string bench_csv(const BenchReport& report);
// Plot-ready: x = input tuples, one y column per mode.
std::string bench_series(const BenchReport& report);
nlohmann::ordered_json bench_json(const BenchReport& report,
                                  const BenchOptions& options);

}  // namespace fuzzyfd
