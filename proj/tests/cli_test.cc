#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fuzzyfd/cli.h"
#include "fuzzyfd/full_disjunction.h"
#include "json.hpp"
#include "test_util.h"

namespace fuzzyfd {
namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> cities_inputs() {
  const auto dir = testing::cities_dir();
  return {"--tables", (dir / "t1.csv").string(), (dir / "t2.csv").string(),
          (dir / "t3.csv").string(), "--align", (dir / "alignment.json").string()};
}

std::string dictionary_provider() {
  return "dictionary:" + (testing::cities_dir() / "dictionary.json").string();
}

std::vector<std::string> with(std::vector<std::string> head,
                              const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({"integrate", "--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"integrate", "--tables", "/nonexistent.csv", "--align", "x"}).code,
            kExitUsage);
  EXPECT_EQ(run(with({"integrate", "--theta", "3"}, cities_inputs())).code, kExitUsage);
}

TEST(Cli, IntegrateFuzzyCities) {
  const CliRun r = run(with({"integrate", "--provider", dictionary_provider(), "--provenance"},
                         cities_inputs()));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(lines(r.out), 7u);
  EXPECT_EQ(r.out.rfind("City,Country,Cases,Deaths,Vaccinated,provenance\n", 0), 0u);
  EXPECT_NE(r.out.find("Berlin,Germany,1250,20,78,1:0;2:2;3:0\n"), std::string::npos);
  EXPECT_NE(r.out.find(",US,,95,,2:1\n"), std::string::npos);
}

TEST(Cli, IntegrateRegularCities) {
  const CliRun r = run(with({"integrate", "--regular"}, cities_inputs()));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(lines(r.out), 11u);
  EXPECT_NE(r.out.find("Berlinn,Germany,1250,,\n"), std::string::npos);
  EXPECT_EQ(run(with({"integrate", "--regular", "--report", "-"}, cities_inputs())).code,
            kExitUsage);
}

TEST(Cli, ZeroThresholdKeepsEverythingApart) {
  const CliRun r = run(with({"match", "--theta", "0", "--provider", dictionary_provider()},
                         cities_inputs()));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  std::size_t sets = 0;
  for (const auto& a : doc["attributes"]) {
    for (const auto& s : a["sets"]) {
      EXPECT_EQ(s["members"].size(), 1u);
      ++sets;
    }
  }
  EXPECT_EQ(sets, 19u);
}

TEST(Cli, MatchThenEval) {
  testing::TempDir dir;
  const auto report = dir.path() / "report.json";
  ASSERT_EQ(run(with({"match", "--provider", dictionary_provider(), "--out",
                      report.string()},
                     cities_inputs()))
                .code,
            kExitOk);
  const auto gold = (testing::cities_dir() / "gold.json").string();
  const CliRun text = run({"eval", "--report", report.string(), "--gold", gold});
  ASSERT_EQ(text.code, kExitOk) << text.err;
  EXPECT_NE(text.out.find("City  P=1.0000  R=1.0000  F1=1.0000"), std::string::npos);

  const auto scores = dir.path() / "scores.json";
  const CliRun json = run({"eval", "--report", report.string(), "--gold", gold, "--format",
                        "json", "--out", scores.string()});
  ASSERT_EQ(json.code, kExitOk);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(json.out)["macro"]["f1"].get<double>(), 1.0);
  EXPECT_EQ(nlohmann::json::parse(slurp(scores)), nlohmann::json::parse(json.out));

  const CliRun direct = run(with({"eval", "--gold", gold, "--provider", dictionary_provider()},
                              cities_inputs()));
  ASSERT_EQ(direct.code, kExitOk) << direct.err;
  EXPECT_EQ(direct.out, text.out);
}

TEST(Cli, EvalInputErrors) {
  testing::TempDir dir;
  const auto bad_gold = dir.write("gold.json", "{not json");
  const auto gold = (testing::cities_dir() / "gold.json").string();
  EXPECT_EQ(run(with({"eval", "--gold", bad_gold.string()}, cities_inputs())).code,
            kExitUsage);
  EXPECT_EQ(run({"eval", "--gold", gold}).code, kExitUsage);
  const auto bad_report = dir.write("report.json", "[");
  EXPECT_EQ(run({"eval", "--gold", gold, "--report", bad_report.string()}).code,
            kExitUsage);

  const auto unknown = dir.write("unknown.json", R"({"City": [["Berlin", "Atlantis"]]})");
  const CliRun r = run(with({"eval", "--gold", unknown.string(), "--provider",
                          dictionary_provider()},
                         cities_inputs()));
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("warning: City: gold value 'Atlantis'"), std::string::npos);
}

TEST(Cli, MissingAlignmentAndBadProvider) {
  const auto dir = testing::cities_dir();
  const CliRun missing = run({"integrate", "--tables", (dir / "t1.csv").string(), "--align",
                           "/nonexistent/align.json"});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("error: "), std::string::npos);
  EXPECT_EQ(run(with({"match", "--provider", "word2vec"}, cities_inputs())).code,
            kExitUsage);
  EXPECT_EQ(run(with({"match", "--provider", "dictionary:/nonexistent.json"},
                     cities_inputs()))
                .code,
            kExitUsage);
  EXPECT_EQ(run(with({"match", "--delimiter", "ab"}, cities_inputs())).code, kExitUsage);
}

TEST(Cli, RemoteUrlFromEnvironment) {
  ::unsetenv(kEmbedUrlEnv);
  EXPECT_EQ(run(with({"match", "--provider", "remote"}, cities_inputs())).code, kExitUsage);
  // The environment overrides the flag; a bad URL there is a configuration
  // error before any request is made.
  ::setenv(kEmbedUrlEnv, "ftp://nowhere", 1);
  const CliRun r = run(with({"match", "--provider", "remote:http://127.0.0.1:1"},
                         cities_inputs()));
  ::unsetenv(kEmbedUrlEnv);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("ftp://nowhere"), std::string::npos) << r.err;
}

TEST(Cli, PermutationCap) {
  const CliRun r = run(with({"integrate", "--regular", "--perm-cap", "2"}, cities_inputs()));
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--perm-cap"), std::string::npos);
}

TEST(Cli, EmptyIntegrationSet) {
  testing::TempDir dir;
  const auto align = dir.write("align.json", "{}");
  const CliRun r = run({"integrate", "--align", align.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "\n");
}

TEST(Cli, DelimiterAndNullMarkers) {
  testing::TempDir dir;
  const auto a = dir.write("a.tsv", "k\tv\nx\t?\ny\t1\n");
  const auto b = dir.write("b.tsv", "k\tw\nx\t2\n");
  const auto align = dir.write(
      "align.json",
      R"({"k": [{"table": 1, "column": "k"}, {"table": 2, "column": "k"}]})");
  const CliRun r = run({"integrate", "--regular", "--tables", a.string(), b.string(),
                     "--align", align.string(), "--delimiter", "tab",
                     "--null-marker", "?"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "k\tv\tw\nx\t\t2\ny\t1\t\n");
}

TEST(Cli, GenerateWritesALoadableSet) {
  testing::TempDir dir;
  const CliRun g = run({"generate", "--size", "500", "--corruption", "0.2", "--out-dir",
                     dir.path().string()});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  for (const char* f : {"alignment.json", "dictionary.json", "gold.json",
                        "title_basics.csv", "name_basics.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  }
  std::vector<std::string> args = {"eval", "--gold", (dir.path() / "gold.json").string(),
                                   "--provider",
                                   "dictionary:" + (dir.path() / "dictionary.json").string(),
                                   "--align", (dir.path() / "alignment.json").string(),
                                   "--tables"};
  for (const char* t : {"title_basics", "title_ratings", "title_akas", "title_principals",
                        "name_basics", "title_crew"}) {
    args.push_back((dir.path() / (std::string(t) + ".csv")).string());
  }
  const CliRun e = run(args);
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_NE(e.out.find("micro  P=1.0000  R=1.0000  F1=1.0000"), std::string::npos) << e.out;
}

TEST(Cli, BenchSmoke) {
  testing::TempDir dir;
  const auto csv = dir.path() / "bench.csv";
  const auto json = dir.path() / "bench.json";
  const auto series = dir.path() / "bench.tsv";
  const CliRun r = run({"bench", "--sizes", "1000,2000", "--repeats", "1", "--out-csv",
                     csv.string(), "--out-json", json.string(), "--out-series",
                     series.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(lines(r.out), 3u);
  EXPECT_EQ(slurp(csv), r.out);
  const auto doc = nlohmann::json::parse(slurp(json));
  EXPECT_EQ(doc["points"].size(), 2u);
  EXPECT_EQ(doc["points"][1]["parity"], true);
  EXPECT_EQ(lines(slurp(series)), 4u);

  EXPECT_EQ(run({"bench", "--sizes", "10,x"}).code, kExitUsage);
  EXPECT_EQ(run({"bench", "--sizes", "100", "--timeout", "0"}).code, kExitUsage);
}

}  // namespace
}  // namespace fuzzyfd
