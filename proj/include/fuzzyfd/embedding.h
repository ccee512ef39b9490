#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fuzzyfd {

// Immutable fixed-dimension vector with its Euclidean norm and the ascending
// indices of its nonzero components. Copies share storage.
class EmbeddingVector {
 public:
  EmbeddingVector();
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dimension() const { return data_->values.size(); }
  std::span<const double> values() const { return data_->values; }
  double norm() const { return data_->norm; }
  std::span<const std::uint32_t> nonzero() const { return data_->nonzero; }
  bool is_sparse() const {
    return data_->nonzero.size() * 4 <= data_->values.size();
  }

  friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) {
    return a.data_ == b.data_ || a.data_->values == b.data_->values;
  }

 private:
  struct Data {
    std::vector<double> values;
    std::vector<std::uint32_t> nonzero;
    double norm = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

// Dot product summed in ascending component order. The sparse and dense
// routes give bit-identical results.
double dot(const EmbeddingVector& u, const EmbeddingVector& v);

// 1 - cos(u, v), clamped to [0, 2]. A zero vector is at distance 2 from
// everything. Throws ContractViolation on a dimension mismatch.
double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v);

// Row-major |left| x |right| matrix of cosine_distance values.
std::vector<double> cosine_distance_matrix(
    std::span<const EmbeddingVector> left,
    std::span<const EmbeddingVector> right);
// Same, written to the first |left| * |right| entries of `out`.
void cosine_distance_matrix(std::span<const EmbeddingVector> left,
                            std::span<const EmbeddingVector> right,
                            std::span<double> out);

// Source of cell embeddings. embed_batch is safe to call concurrently; the
// per-provider cache is keyed by exact text.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string kind() const = 0;
  // 0 when not yet known (remote provider before its first response).
  virtual std::size_t dimension() const = 0;

  // One vector per text. Texts must be non-empty after trimming.
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);
  EmbeddingVector embed(const std::string& text);

  std::size_t cache_size() const;

 protected:
  // Computes vectors for cache misses; never called with an empty span.
  virtual std::vector<EmbeddingVector> compute(
      std::span<const std::string> texts) = 0;

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
};

struct NgramOptions {
  std::size_t n = 3;
  std::size_t dimension = 1024;
  std::uint64_t seed = 0x5eed'f00d'cafe'b0baULL;
};

// Hashed character n-grams over lower-cased code points with begin/end
// padding. Each n-gram adds +1 or -1 (chosen by the hash) to one bucket;
// the result is L2-normalized.
class NgramEmbedder : public EmbeddingProvider {
 public:
  explicit NgramEmbedder(NgramOptions options = {});

  std::string kind() const override { return "char-ngram"; }
  std::size_t dimension() const override { return options_.dimension; }

  EmbeddingVector embed_text(std::string_view text) const;

 protected:
  std::vector<EmbeddingVector> compute(
      std::span<const std::string> texts) override;

 private:
  NgramOptions options_;
};

// Synonym groups sharing one vector: every member of a group maps to the
// n-gram embedding of the group's first member. Other values fall back to
// the n-gram embedding of themselves.
class DictionaryEmbedder : public EmbeddingProvider {
 public:
  explicit DictionaryEmbedder(std::vector<std::vector<std::string>> groups,
                              NgramOptions options = {});

  std::string kind() const override { return "dictionary"; }
  std::size_t dimension() const override { return ngram_.dimension(); }

  const std::vector<std::vector<std::string>>& groups() const {
    return groups_;
  }

 protected:
  std::vector<EmbeddingVector> compute(
      std::span<const std::string> texts) override;

 private:
  std::vector<std::vector<std::string>> groups_;
  std::unordered_map<std::string, std::size_t> group_of_;
  NgramEmbedder ngram_;
};

// Reads {"groups": [["Berlin", "Berlinn"], ...]} or a bare array of groups.
std::vector<std::vector<std::string>> parse_synonym_groups(
    std::string_view json_text);
std::vector<std::vector<std::string>> load_synonym_groups(
    const std::filesystem::path& path);

struct RemoteOptions {
  std::string url;  // scheme://host:port, optional path prefix
  std::size_t expected_dimension = 0;  // 0: taken from the first response
  std::size_t batch_size = 64;
  std::size_t parallelism = 4;
  std::size_t retries = 2;
  std::chrono::milliseconds timeout{30000};
};

// Client for an embedding service speaking
//   POST /embed {"texts": [...]} -> {"embeddings": [[...], ...], "dim": d}
// Unreachable service or timeouts raise RetriableError with the failed
// batch; vectors whose size disagrees with the dimension raise ConfigError.
class RemoteEmbedder : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteOptions options);
  ~RemoteEmbedder() override;

  std::string kind() const override { return "remote"; }
  std::size_t dimension() const override;

 protected:
  std::vector<EmbeddingVector> compute(
      std::span<const std::string> texts) override;

 private:
  std::vector<EmbeddingVector> fetch_batch(std::span<const std::string> texts);

  RemoteOptions options_;
  std::string host_;
  int port_ = 80;
  std::string path_prefix_;
  mutable std::mutex dim_mutex_;
  std::size_t dimension_ = 0;
};

}  // namespace fuzzyfd
