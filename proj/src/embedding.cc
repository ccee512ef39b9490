#include "fuzzyfd/embedding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fuzzyfd/errors.h"
#include "json.hpp"

namespace fuzzyfd {
namespace {

double distance_from_dot(double dot_product, double norm_u, double norm_v) {
  if (norm_u == 0.0 || norm_v == 0.0) return 2.0;
  const double d = 1.0 - dot_product / (norm_u * norm_v);
  return std::clamp(d, 0.0, 2.0);
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

// Decodes UTF-8; malformed bytes are passed through as single code points.
std::vector<char32_t> code_points(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    }
    bool ok = len == 1 || i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      cp = b0;
      len = 1;
    }
    if (cp < 0x80) cp = static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_gram(std::uint64_t seed, const char32_t* begin,
                        std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (std::size_t i = 0; i < len; ++i) {
    std::uint32_t cp = static_cast<std::uint32_t>(begin[i]);
    for (int b = 0; b < 4; ++b) {
      h ^= (cp >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return mix64(h);
}

constexpr char32_t kBegin = 0x02;
constexpr char32_t kEnd = 0x03;

}  // namespace

EmbeddingVector::EmbeddingVector() : data_(std::make_shared<const Data>()) {}

EmbeddingVector::EmbeddingVector(std::vector<double> values) {
  Data data;
  data.values = std::move(values);
  double sum = 0.0;
  for (std::size_t i = 0; i < data.values.size(); ++i) {
    if (data.values[i] != 0.0) {
      data.nonzero.push_back(static_cast<std::uint32_t>(i));
      sum += data.values[i] * data.values[i];
    }
  }
  data.norm = std::sqrt(sum);
  data_ = std::make_shared<const Data>(std::move(data));
}

double dot(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension()) {
    throw ContractViolation("embedding dimension mismatch: " +
                            std::to_string(u.dimension()) + " vs " +
                            std::to_string(v.dimension()));
  }
  const auto a = u.values();
  const auto b = v.values();
  double sum = 0.0;
  if (u.is_sparse() || v.is_sparse()) {
    const auto ia = u.nonzero();
    const auto ib = v.nonzero();
    std::size_t i = 0, j = 0;
    while (i < ia.size() && j < ib.size()) {
      if (ia[i] < ib[j]) {
        ++i;
      } else if (ib[j] < ia[i]) {
        ++j;
      } else {
        sum += a[ia[i]] * b[ib[j]];
        ++i;
        ++j;
      }
    }
    return sum;
  }
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
  return distance_from_dot(dot(u, v), u.norm(), v.norm());
}

std::vector<double> cosine_distance_matrix(
    std::span<const EmbeddingVector> left,
    std::span<const EmbeddingVector> right) {
  std::vector<double> out(left.size() * right.size());
  cosine_distance_matrix(left, right, out);
  return out;
}

void cosine_distance_matrix(std::span<const EmbeddingVector> left,
                            std::span<const EmbeddingVector> right,
                            std::span<double> out) {
  const std::size_t rows = left.size();
  const std::size_t cols = right.size();
  if (out.size() < rows * cols) {
    throw ContractViolation("distance matrix buffer is too small");
  }
  if (rows == 0 || cols == 0) return;

  const std::size_t dim = left.front().dimension();
  const auto same_dim = [dim](const EmbeddingVector& e) {
    return e.dimension() == dim;
  };
  if (!std::all_of(left.begin(), left.end(), same_dim) ||
      !std::all_of(right.begin(), right.end(), same_dim)) {
    throw ContractViolation("embedding dimension mismatch in distance matrix");
  }

  const bool sparse =
      std::all_of(left.begin(), left.end(),
                  [](const EmbeddingVector& e) { return e.is_sparse(); }) &&
      std::all_of(right.begin(), right.end(),
                  [](const EmbeddingVector& e) { return e.is_sparse(); });
  if (!sparse) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        out[i * cols + j] = cosine_distance(left[i], right[j]);
      }
    }
    return;
  }

  // Inverted index over the right side. Each accumulator receives its terms
  // in ascending component order, which reproduces dot() exactly.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings(dim);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto values = right[j].values();
    for (std::uint32_t k : right[j].nonzero()) {
      postings[k].emplace_back(static_cast<std::uint32_t>(j), values[k]);
    }
  }
  // Pairs sharing no component have dot 0; their row is copied from
  // `untouched` and only the touched columns are recomputed.
  std::vector<double> untouched(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    untouched[j] = distance_from_dot(0.0, 1.0, right[j].norm());
  }
  std::vector<double> acc(cols, 0.0);
  std::vector<char> seen(cols, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = out.data() + i * cols;
    const double norm_i = left[i].norm();
    if (norm_i == 0.0) {
      std::fill(row, row + cols, 2.0);
      continue;
    }
    std::copy(untouched.begin(), untouched.end(), row);
    const auto values = left[i].values();
    for (std::uint32_t k : left[i].nonzero()) {
      const double x = values[k];
      for (const auto& [j, y] : postings[k]) {
        acc[j] += x * y;
        if (!seen[j]) {
          seen[j] = 1;
          touched.push_back(j);
        }
      }
    }
    for (std::uint32_t j : touched) {
      row[j] = distance_from_dot(acc[j], norm_i, right[j].norm());
      acc[j] = 0.0;
      seen[j] = 0;
    }
    touched.clear();
  }
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(
    std::span<const std::string> texts) {
  for (const auto& t : texts) {
    if (blank(t)) throw InputError("cannot embed an empty value");
  }
  std::vector<EmbeddingVector> result(texts.size());
  std::vector<std::string> misses;
  std::vector<std::size_t> miss_slots;
  {
    std::lock_guard lock(mutex_);
    std::unordered_map<std::string_view, std::size_t> pending;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (auto it = cache_.find(texts[i]); it != cache_.end()) {
        result[i] = it->second;
      } else if (!pending.count(texts[i])) {
        pending.emplace(texts[i], misses.size());
        misses.push_back(texts[i]);
        miss_slots.push_back(i);
      }
    }
  }
  if (misses.empty()) return result;

  std::vector<EmbeddingVector> computed = compute(misses);
  if (computed.size() != misses.size()) {
    throw ConfigError(kind() + " provider returned " +
                      std::to_string(computed.size()) + " vectors for " +
                      std::to_string(misses.size()) + " texts");
  }
  {
    std::lock_guard lock(mutex_);
    for (std::size_t m = 0; m < misses.size(); ++m) {
      // A concurrent caller may have inserted first; keep its vector.
      cache_.try_emplace(misses[m], computed[m]);
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (result[i].dimension() == 0) result[i] = cache_.at(texts[i]);
    }
  }
  return result;
}

EmbeddingVector EmbeddingProvider::embed(const std::string& text) {
  return embed_batch(std::span<const std::string>(&text, 1)).front();
}

std::size_t EmbeddingProvider::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

NgramEmbedder::NgramEmbedder(NgramOptions options) : options_(options) {
  if (options_.n == 0 || options_.dimension == 0) {
    throw ConfigError("n-gram size and dimension must be positive");
  }
}

EmbeddingVector NgramEmbedder::embed_text(std::string_view text) const {
  std::vector<char32_t> padded;
  padded.push_back(kBegin);
  const auto cps = code_points(text);
  padded.insert(padded.end(), cps.begin(), cps.end());
  padded.push_back(kEnd);

  std::vector<double> values(options_.dimension, 0.0);
  const std::size_t n = std::min(options_.n, padded.size());
  for (std::size_t i = 0; i + n <= padded.size(); ++i) {
    const std::uint64_t h = hash_gram(options_.seed, padded.data() + i, n);
    const std::size_t bucket = h % options_.dimension;
    values[bucket] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : values) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : values) x /= norm;
  }
  return EmbeddingVector(std::move(values));
}

std::vector<EmbeddingVector> NgramEmbedder::compute(
    std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

DictionaryEmbedder::DictionaryEmbedder(
    std::vector<std::vector<std::string>> groups, NgramOptions options)
    : groups_(std::move(groups)), ngram_(options) {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].empty()) throw InputError("empty synonym group");
    for (const auto& member : groups_[g]) {
      auto [it, inserted] = group_of_.try_emplace(member, g);
      if (!inserted && it->second != g) {
        throw InputError("value '" + member +
                         "' belongs to two synonym groups");
      }
    }
  }
}

std::vector<EmbeddingVector> DictionaryEmbedder::compute(
    std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto it = group_of_.find(t);
    out.push_back(ngram_.embed_text(
        it == group_of_.end() ? t : groups_[it->second].front()));
  }
  return out;
}

std::vector<std::vector<std::string>> parse_synonym_groups(
    std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("dictionary is not valid JSON: ") + e.what());
  }
  const nlohmann::json* groups = &doc;
  if (doc.is_object()) {
    if (!doc.contains("groups")) {
      throw InputError("dictionary object needs a 'groups' array");
    }
    groups = &doc["groups"];
  }
  if (!groups->is_array()) throw InputError("dictionary groups must be an array");
  std::vector<std::vector<std::string>> out;
  for (const auto& g : *groups) {
    if (!g.is_array()) throw InputError("each synonym group must be an array");
    std::vector<std::string> members;
    for (const auto& m : g) {
      if (!m.is_string()) throw InputError("synonym group members are strings");
      members.push_back(m.get<std::string>());
    }
    out.push_back(std::move(members));
  }
  return out;
}

std::vector<std::vector<std::string>> load_synonym_groups(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dictionary " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_synonym_groups(buffer.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace fuzzyfd
