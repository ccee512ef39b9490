#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "fuzzyfd/embedding.h"
#include "fuzzyfd/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace fuzzyfd {

RemoteEmbedder::RemoteEmbedder(RemoteOptions options)
    : options_(std::move(options)) {
  std::string_view url = options_.url;
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw ConfigError("remote embedder url must start with http://: " +
                      options_.url);
  }
  url.remove_prefix(kScheme.size());
  const auto slash = url.find('/');
  std::string_view authority = url.substr(0, slash);
  if (slash != std::string_view::npos) {
    path_prefix_ = std::string(url.substr(slash));
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    host_ = std::string(authority.substr(0, colon));
    try {
      port_ = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("bad port in remote embedder url: " + options_.url);
    }
  } else {
    host_ = std::string(authority);
  }
  if (host_.empty()) throw ConfigError("remote embedder url has no host");
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (options_.parallelism == 0) options_.parallelism = 1;
  dimension_ = options_.expected_dimension;
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::size_t RemoteEmbedder::dimension() const {
  std::lock_guard lock(dim_mutex_);
  return dimension_;
}

std::vector<EmbeddingVector> RemoteEmbedder::fetch_batch(
    std::span<const std::string> texts) {
  const std::vector<std::string> batch(texts.begin(), texts.end());
  const std::string body = nlohmann::json{{"texts", batch}}.dump();

  httplib::Client client(host_, port_);
  const auto seconds = options_.timeout.count() / 1000;
  const auto micros = (options_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  std::string last_error;
  for (std::size_t attempt = 0; attempt <= options_.retries; ++attempt) {
    auto res = client.Post(path_prefix_ + "/embed", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ConfigError("embedding service rejected the request with HTTP " +
                        std::to_string(res->status) + ": " + res->body);
    }

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("embedding service sent invalid JSON: ") +
                        e.what());
    }
    if (!doc.contains("embeddings") || !doc["embeddings"].is_array() ||
        !doc.contains("dim") || !doc["dim"].is_number_integer()) {
      throw ConfigError("embedding service response lacks 'embeddings'/'dim'");
    }
    const auto dim = doc["dim"].get<std::size_t>();
    {
      std::lock_guard lock(dim_mutex_);
      if (dimension_ == 0) dimension_ = dim;
      if (dim != dimension_) {
        throw ConfigError("embedding service reports dimension " +
                          std::to_string(dim) + ", expected " +
                          std::to_string(dimension_));
      }
    }
    const auto& embeddings = doc["embeddings"];
    if (embeddings.size() != batch.size()) {
      throw ConfigError("embedding service returned " +
                        std::to_string(embeddings.size()) + " vectors for " +
                        std::to_string(batch.size()) + " texts");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(batch.size());
    for (const auto& e : embeddings) {
      if (!e.is_array() || e.size() != dim) {
        throw ConfigError("embedding service returned a vector of size " +
                          std::to_string(e.size()) + ", expected " +
                          std::to_string(dim));
      }
      out.emplace_back(e.get<std::vector<double>>());
    }
    return out;
  }
  throw RetriableError("embedding service unavailable at " + options_.url +
                           ": " + last_error,
                       batch);
}

std::vector<EmbeddingVector> RemoteEmbedder::compute(
    std::span<const std::string> texts) {
  const std::size_t batches =
      (texts.size() + options_.batch_size - 1) / options_.batch_size;
  std::vector<std::vector<EmbeddingVector>> results(batches);
  std::vector<std::exception_ptr> errors(batches);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t b = next++; b < batches; b = next++) {
      const std::size_t begin = b * options_.batch_size;
      const std::size_t len =
          std::min(options_.batch_size, texts.size() - begin);
      try {
        results[b] = fetch_batch(texts.subspan(begin, len));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(options_.parallelism, batches);
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  // Configuration failures outrank transient ones.
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results) {
    for (auto& v : r) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace fuzzyfd
