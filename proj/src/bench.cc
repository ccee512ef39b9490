#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>

#include "fuzzyfd/errors.h"
#include "fuzzyfd/evaluation.h"
#include "fuzzyfd/pipeline.h"

namespace fuzzyfd {
namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string seconds_text(const std::optional<double>& s) {
  if (!s) return "";
  std::ostringstream out;
  out.precision(6);
  out << *s;
  return out.str();
}

template <typename T>
nlohmann::ordered_json or_null(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

struct Run {
  double seconds = 0.0;
  double match_seconds = 0.0;
  IntegratedTable table;
};

Run run_once(const AlignedRelationSet& set, IntegrationMode mode,
             const MatcherConfig& matcher, const BenchOptions& options) {
  IntegrationOptions io;
  io.mode = mode;
  io.matcher = matcher;
  io.jobs = options.jobs;
  io.fd.deadline = Clock::now() + options.timeout;
  const auto start = Clock::now();
  IntegrationResult result = integrate(set, io);
  const double seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return Run{seconds, result.match_seconds, std::move(result.table)};
}

}  // namespace

BenchReport bench_scaling(const BenchOptions& options, std::ostream* progress) {
  if (options.repeats == 0) throw InputError("repeats must be at least 1");
  if (!options.run_regular && !options.run_fuzzy) {
    throw InputError("at least one bench mode is required");
  }
  std::vector<std::size_t> sizes = options.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.empty()) throw InputError("no bench sizes given");

  // One provider for the whole sweep so repeated values hit its cache, as a
  // long-running integration service would.
  std::shared_ptr<EmbeddingProvider> ngram = std::make_shared<NgramEmbedder>();

  BenchReport report;
  for (std::size_t size : sizes) {
    BenchPoint point;
    point.input_tuples = size;
    if (size > options.max_tuples) {
      point.censored = true;
      point.note = "size exceeds budget of " +
                   std::to_string(options.max_tuples) + " tuples";
      if (progress) *progress << "size " << size << ": " << point.note << '\n';
      report.points.push_back(std::move(point));
      continue;
    }

    GeneratorParams gp = options.generator;
    gp.total_tuples = size;
    const SyntheticSet data = generate_synthetic(gp);
    MatcherConfig matcher{options.theta, ngram};
    if (gp.corruption_rate > 0.0) {
      matcher.provider = std::make_shared<DictionaryEmbedder>(data.synonym_groups);
    }

    std::vector<double> regular, fuzzy, matching;
    std::optional<IntegratedTable> regular_table, fuzzy_table;
    try {
      for (std::size_t r = 0; r < options.repeats; ++r) {
        if (options.run_regular) {
          Run run = run_once(data.set, IntegrationMode::kRegular, matcher, options);
          regular.push_back(run.seconds);
          if (!regular_table) regular_table.emplace(std::move(run.table));
        }
        if (options.run_fuzzy) {
          Run run = run_once(data.set, IntegrationMode::kFuzzy, matcher, options);
          fuzzy.push_back(run.seconds);
          matching.push_back(run.match_seconds);
          if (!fuzzy_table) fuzzy_table.emplace(std::move(run.table));
        }
      }
    } catch (const DeadlineExceeded&) {
      point.censored = true;
      point.note = "run exceeded timeout of " +
                   std::to_string(options.timeout.count()) + " ms";
    }

    if (!point.censored) {
      if (!regular.empty()) point.regular_seconds = median(regular);
      if (!fuzzy.empty()) {
        point.fuzzy_seconds = median(fuzzy);
        point.matcher_seconds = median(matching);
      }
      if (regular_table) point.regular_output = regular_table->size();
      if (fuzzy_table) point.fuzzy_output = fuzzy_table->size();
      if (regular_table && fuzzy_table && gp.corruption_rate == 0.0) {
        point.parity = regular_table->rows() == fuzzy_table->rows();
      }
    }
    if (progress) {
      *progress << "size " << size;
      if (point.censored) {
        *progress << ": censored (" << point.note << ")";
      } else {
        if (point.regular_seconds) {
          *progress << "  regular " << *point.regular_seconds << " s";
        }
        if (point.fuzzy_seconds) {
          *progress << "  fuzzy " << *point.fuzzy_seconds << " s (matching "
                    << *point.matcher_seconds << " s)";
        }
        if (point.parity) *progress << "  parity " << (*point.parity ? "yes" : "no");
      }
      *progress << '\n';
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "input_tuples,regular_seconds,fuzzy_seconds,matcher_seconds,"
         "regular_output,fuzzy_output,parity,censored,note\n";
  for (const auto& p : report.points) {
    out << p.input_tuples << ',' << seconds_text(p.regular_seconds) << ','
        << seconds_text(p.fuzzy_seconds) << ','
        << seconds_text(p.matcher_seconds) << ','
        << (p.regular_output ? std::to_string(*p.regular_output) : "") << ','
        << (p.fuzzy_output ? std::to_string(*p.fuzzy_output) : "") << ','
        << (p.parity ? (*p.parity ? "true" : "false") : "") << ','
        << (p.censored ? "true" : "false") << ','
        << escape_field(p.note, ',', {}) << '\n';
  }
  return out.str();
}

std::string bench_series(const BenchReport& report) {
  std::ostringstream out;
  out << "# x: input tuples; y: seconds\n";
  out << "tuples\tregular\tfuzzy\n";
  for (const auto& p : report.points) {
    if (p.censored) continue;
    out << p.input_tuples << '\t'
        << (p.regular_seconds ? seconds_text(p.regular_seconds) : "nan") << '\t'
        << (p.fuzzy_seconds ? seconds_text(p.fuzzy_seconds) : "nan") << '\n';
  }
  return out.str();
}

nlohmann::ordered_json bench_json(const BenchReport& report,
                                  const BenchOptions& options) {
  nlohmann::ordered_json doc;
  doc["generator"] = {{"seed", options.generator.seed},
                      {"overlap", options.generator.overlap},
                      {"corruption_rate", options.generator.corruption_rate}};
  doc["theta"] = options.theta;
  doc["repeats"] = options.repeats;
  doc["timeout_ms"] = options.timeout.count();
  doc["points"] = nlohmann::ordered_json::array();
  for (const auto& p : report.points) {
    nlohmann::ordered_json j;
    j["input_tuples"] = p.input_tuples;
    j["regular_seconds"] = or_null(p.regular_seconds);
    j["fuzzy_seconds"] = or_null(p.fuzzy_seconds);
    j["matcher_seconds"] = or_null(p.matcher_seconds);
    j["regular_output"] = or_null(p.regular_output);
    j["fuzzy_output"] = or_null(p.fuzzy_output);
    if (p.regular_seconds && p.fuzzy_seconds && *p.regular_seconds > 0.0) {
      j["overhead_ratio"] = *p.fuzzy_seconds / *p.regular_seconds;
    } else {
      j["overhead_ratio"] = nullptr;
    }
    j["parity"] = or_null(p.parity);
    j["censored"] = p.censored;
    if (!p.note.empty()) j["note"] = p.note;
    doc["points"].push_back(std::move(j));
  }
  return doc;
}

}  // namespace fuzzyfd
