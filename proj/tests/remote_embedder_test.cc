#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "fuzzyfd/embedding.h"
#include "fuzzyfd/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace fuzzyfd {
namespace {

enum class Mode { kOk, kFailTwice, kAlways500, kBadDim, kShortVector, kMalformed, k400 };

// In-process stand-in for the embedding service.
class FakeService {
 public:
  FakeService() {
    const auto handler = [this](const httplib::Request& req,
                                httplib::Response& res) {
      ++requests;
      const auto doc = nlohmann::json::parse(req.body);
      const auto texts = doc.at("texts").get<std::vector<std::string>>();
      max_batch = std::max<std::size_t>(max_batch, texts.size());
      switch (mode.load()) {
        case Mode::kFailTwice:
          if (failures++ < 2) {
            res.status = 503;
            return;
          }
          break;
        case Mode::kAlways500:
          res.status = 500;
          return;
        case Mode::k400:
          res.status = 400;
          res.set_content("bad texts", "text/plain");
          return;
        case Mode::kMalformed:
          res.set_content("{not json", "application/json");
          return;
        default:
          break;
      }
      nlohmann::json out;
      out["dim"] = mode == Mode::kBadDim ? 4 : 3;
      out["embeddings"] = nlohmann::json::array();
      for (const auto& t : texts) {
        std::vector<double> v = {static_cast<double>(t.size()), 1.0, 0.0};
        if (mode == Mode::kShortVector) v.pop_back();
        out["embeddings"].push_back(v);
      }
      res.set_content(out.dump(), "application/json");
    };
    server_.Post("/embed", handler);
    server_.Post("/v1/embed", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }

  std::atomic<Mode> mode{Mode::kOk};
  std::atomic<int> requests{0};
  std::atomic<int> failures{0};
  std::atomic<std::size_t> max_batch{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RemoteOptions options_for(const std::string& url) {
  RemoteOptions o;
  o.url = url;
  o.timeout = std::chrono::milliseconds(2000);
  return o;
}

TEST(RemoteEmbedder, EmbedsInBatchesAndCaches) {
  FakeService service;
  RemoteOptions o = options_for(service.url());
  o.batch_size = 4;
  o.parallelism = 3;
  RemoteEmbedder e(o);
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) texts.push_back(std::string(i + 1, 'x'));
  const auto v = e.embed_batch(texts);
  ASSERT_EQ(v.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(v[i].values()[0], i + 1.0);
  EXPECT_EQ(e.dimension(), 3u);
  EXPECT_EQ(service.requests.load(), 3);
  EXPECT_LE(service.max_batch.load(), 4u);
  e.embed_batch(texts);
  EXPECT_EQ(service.requests.load(), 3);  // all cached
}

TEST(RemoteEmbedder, PathPrefix) {
  FakeService service;
  RemoteEmbedder e(options_for(service.url("/v1/")));
  EXPECT_EQ(e.embed("abc").values()[0], 3.0);
}

TEST(RemoteEmbedder, RetriesTransientFailures) {
  FakeService service;
  service.mode = Mode::kFailTwice;
  RemoteEmbedder e(options_for(service.url()));
  EXPECT_EQ(e.embed("ab").values()[0], 2.0);
  EXPECT_EQ(service.requests.load(), 3);
}

TEST(RemoteEmbedder, GivesUpWithFailedBatch) {
  FakeService service;
  service.mode = Mode::kAlways500;
  RemoteOptions o = options_for(service.url());
  o.retries = 1;
  RemoteEmbedder e(o);
  const std::vector<std::string> texts = {"a", "b"};
  try {
    e.embed_batch(texts);
    FAIL() << "expected RetriableError";
  } catch (const RetriableError& err) {
    EXPECT_EQ(err.failed_batch(), texts);
  }
  EXPECT_EQ(service.requests.load(), 2);
}

TEST(RemoteEmbedder, UnreachableIsRetriable) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteOptions o = options_for("http://127.0.0.1:" + std::to_string(port));
  o.retries = 0;
  RemoteEmbedder e(o);
  EXPECT_THROW(e.embed("a"), RetriableError);
}

TEST(RemoteEmbedder, DimensionMismatchIsFatal) {
  FakeService service;
  service.mode = Mode::kBadDim;
  RemoteOptions o = options_for(service.url());
  o.expected_dimension = 3;
  RemoteEmbedder e(o);
  EXPECT_THROW(e.embed("a"), ConfigError);

  service.mode = Mode::kShortVector;
  RemoteEmbedder short_vectors(options_for(service.url()));
  EXPECT_THROW(short_vectors.embed("a"), ConfigError);
}

TEST(RemoteEmbedder, ClientErrorsAreFatal) {
  FakeService service;
  service.mode = Mode::k400;
  RemoteEmbedder e(options_for(service.url()));
  EXPECT_THROW(e.embed("a"), ConfigError);
  EXPECT_EQ(service.requests.load(), 1);

  service.mode = Mode::kMalformed;
  EXPECT_THROW(e.embed("b"), ConfigError);
}

TEST(RemoteEmbedder, BadUrls) {
  EXPECT_THROW(RemoteEmbedder(options_for("ftp://x")), ConfigError);
  EXPECT_THROW(RemoteEmbedder(options_for("http://:80")), ConfigError);
  EXPECT_THROW(RemoteEmbedder(options_for("http://host:port")), ConfigError);
}

}  // namespace
}  // namespace fuzzyfd
