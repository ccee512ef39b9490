#include "fuzzyfd/cli.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fuzzyfd/errors.h"
#include "fuzzyfd/evaluation.h"
#include "fuzzyfd/pipeline.h"

namespace fuzzyfd {
namespace {

struct InputFlags {
  std::vector<std::string> tables;
  std::string align;
  std::vector<std::string> null_markers;
  std::string delimiter = ",";
};

struct MatchFlags {
  double theta = kDefaultTheta;
  std::string provider = "ngram";
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;
};

void add_input_flags(CLI::App* app, InputFlags& f, bool align_required) {
  app->add_option("--tables", f.tables,
                  "Input tables in order; the first is table 1")
      ->check(CLI::ExistingFile);
  auto* align = app->add_option("--align", f.align,
                                "Alignment spec (JSON: attribute -> columns)");
  if (align_required) align->required();
  app->add_option("--null-marker", f.null_markers,
                  "Cell text read as NULL (repeatable; default: empty, NULL, "
                  "nan)");
  app->add_option("--delimiter", f.delimiter,
                  "Field delimiter, one character or 'tab'")
      ->capture_default_str();
}

void add_match_flags(CLI::App* app, MatchFlags& f) {
  app->add_option("--theta", f.theta,
                  "Cosine distance threshold; pairs must be strictly below it")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  app->add_option("--provider", f.provider,
                  "ngram | dictionary:<groups.json> | remote:<url>")
      ->capture_default_str();
  app->add_option("--jobs", f.jobs,
                  "Attributes matched in parallel (default: hardware threads)");
  app->add_option("--seed", f.seed, "Hash seed of the n-gram embedder");
}

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t") return '\t';
  if (text.size() != 1 || text == "\"" || text == "\n" || text == "\r") {
    throw InputError("--delimiter must be a single character, got '" + text +
                     "'");
  }
  return text[0];
}

LoadOptions load_options(const InputFlags& f) {
  LoadOptions o;
  o.delimiter = parse_delimiter(f.delimiter);
  if (!f.null_markers.empty()) o.null_markers = f.null_markers;
  return o;
}

AlignedRelationSet load_inputs(const InputFlags& f) {
  std::vector<std::filesystem::path> paths(f.tables.begin(), f.tables.end());
  return load_relation_set(paths, f.align, load_options(f));
}

std::shared_ptr<EmbeddingProvider> make_provider(const MatchFlags& f) {
  NgramOptions ngram;
  if (f.seed) ngram.seed = *f.seed;
  const std::string& p = f.provider;
  if (p == "ngram") return std::make_shared<NgramEmbedder>(ngram);
  if (p.rfind("dictionary:", 0) == 0) {
    return std::make_shared<DictionaryEmbedder>(
        load_synonym_groups(p.substr(11)), ngram);
  }
  if (p == "remote" || p.rfind("remote:", 0) == 0) {
    RemoteOptions options;
    if (p.size() > 7) options.url = p.substr(7);
    if (const char* env = std::getenv(kEmbedUrlEnv); env && *env) {
      options.url = env;
    }
    if (options.url.empty()) {
      throw ConfigError(std::string("remote provider needs a URL (remote:<url> "
                                    "or ") +
                        kEmbedUrlEnv + ")");
    }
    return std::make_shared<RemoteEmbedder>(options);
  }
  throw ConfigError("unknown provider '" + p +
                    "' (expected ngram, dictionary:<path> or remote:<url>)");
}

std::size_t job_count(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

MatcherConfig matcher_config(const MatchFlags& f) {
  return MatcherConfig{f.theta, make_provider(f)};
}

void write_output(const std::string& path, const std::string& text,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << text;
  if (!file) throw std::runtime_error("write failed: " + path);
}

std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v == 0) {
      throw InputError("--sizes: '" + item + "' is not a positive integer");
    }
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.empty()) throw InputError("--sizes is empty");
  return sizes;
}

class Elapsed {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Fuzzy full disjunction: value matching and table integration",
               "fuzzyfd"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Timings and counts on stderr");

  // match
  InputFlags match_in;
  MatchFlags match_flags;
  std::string match_out = "-";
  auto* match = app.add_subcommand("match", "Match values of aligned columns");
  add_input_flags(match, match_in, true);
  add_match_flags(match, match_flags);
  match->add_option("--out", match_out, "Match report (JSON); '-' for stdout");

  // integrate
  InputFlags int_in;
  MatchFlags int_flags;
  std::string int_out = "-", int_report;
  bool regular = false, provenance = false;
  std::size_t perm_cap = FdOptions{}.permutation_cap;
  auto* integrate_cmd =
      app.add_subcommand("integrate", "Integrate tables with full disjunction");
  add_input_flags(integrate_cmd, int_in, true);
  add_match_flags(integrate_cmd, int_flags);
  integrate_cmd->add_option("--out", int_out, "Output CSV; '-' for stdout");
  integrate_cmd->add_flag("--regular", regular,
                          "Skip value matching (equi-join full disjunction)");
  integrate_cmd->add_flag("--provenance", provenance,
                          "Add a column listing the merged input rows");
  integrate_cmd->add_option("--perm-cap", perm_cap,
                            "Refuse more input tables than this")
      ->capture_default_str();
  integrate_cmd->add_option("--report", int_report,
                            "Also write the match report here");

  // eval
  InputFlags eval_in;
  MatchFlags eval_flags;
  std::string eval_report, eval_gold, eval_out, eval_format = "text";
  auto* eval = app.add_subcommand(
      "eval", "Score a match report (or a fresh match) against gold pairs");
  add_input_flags(eval, eval_in, false);
  add_match_flags(eval, eval_flags);
  eval->add_option("--report", eval_report, "Match report from 'match'");
  eval->add_option("--gold", eval_gold, "Gold pairs (JSON)")->required();
  eval->add_option("--out", eval_out, "Also write the scores as JSON here");
  eval->add_option("--format", eval_format, "stdout format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // bench
  BenchOptions bench_options;
  std::string sizes_text = "5000,10000,15000,20000,25000,30000";
  std::string modes = "regular,fuzzy";
  double timeout_s = 600;
  std::string bench_csv_path, bench_json_path, bench_series_path;
  auto* bench = app.add_subcommand(
      "bench", "Time regular against fuzzy full disjunction on synthetic data");
  bench->add_option("--sizes", sizes_text, "Comma-separated input tuple counts")
      ->capture_default_str();
  bench->add_option("--modes", modes, "regular, fuzzy or both")
      ->check(CLI::IsMember({"regular", "fuzzy", "regular,fuzzy",
                             "fuzzy,regular"}))
      ->capture_default_str();
  bench->add_option("--repeats", bench_options.repeats, "Runs per size")
      ->capture_default_str();
  bench->add_option("--seed", bench_options.generator.seed, "Generator seed")
      ->capture_default_str();
  bench->add_option("--overlap", bench_options.generator.overlap,
                    "Fraction of universe rows kept")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  bench->add_option("--corruption", bench_options.generator.corruption_rate,
                    "Key misspelling rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  bench->add_option("--theta", bench_options.theta, "Matching threshold")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  bench->add_option("--timeout", timeout_s, "Seconds per run before censoring")
      ->capture_default_str();
  bench->add_option("--max-tuples", bench_options.max_tuples,
                    "Sizes above this are censored without running")
      ->capture_default_str();
  bench->add_option("--jobs", bench_options.jobs, "Matching threads")
      ->capture_default_str();
  bench->add_option("--out-csv", bench_csv_path, "Per-size results (CSV)");
  bench->add_option("--out-json", bench_json_path, "Summary (JSON)");
  bench->add_option("--out-series", bench_series_path,
                    "Plot series: tuples vs seconds per mode");

  // generate
  GeneratorParams gen;
  std::string gen_dir;
  auto* generate = app.add_subcommand(
      "generate", "Write a synthetic six-table integration set");
  generate->add_option("--size", gen.total_tuples, "Total input tuples")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Generator seed")
      ->capture_default_str();
  generate->add_option("--overlap", gen.overlap, "Fraction of universe rows kept")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  generate->add_option("--corruption", gen.corruption_rate, "Key misspelling rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  generate->add_option("--out-dir", gen_dir, "Directory for the files")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (match->parsed()) {
      const Elapsed clock;
      const AlignedRelationSet set = load_inputs(match_in);
      const MatcherConfig config = matcher_config(match_flags);
      const MatchPartition partition =
          match_all(set, config, job_count(match_flags.jobs));
      write_output(match_out,
                   dump(match_report_json(partition, config.theta,
                                          config.provider.get())),
                   out);
      if (verbose) {
        err << "matched " << partition.attributes.size() << " attributes in "
            << clock.seconds() << " s\n";
      }
    } else if (integrate_cmd->parsed()) {
      const AlignedRelationSet set = load_inputs(int_in);
      IntegrationOptions options;
      options.mode = regular ? IntegrationMode::kRegular : IntegrationMode::kFuzzy;
      options.fd.permutation_cap = perm_cap;
      options.jobs = job_count(int_flags.jobs);
      if (!regular) options.matcher = matcher_config(int_flags);
      const IntegrationResult result = integrate(set, options);
      write_output(int_out,
                   format_integrated(result.table, provenance,
                                     parse_delimiter(int_in.delimiter)),
                   out);
      if (!int_report.empty()) {
        if (!result.partition) {
          throw InputError("--report needs value matching (drop --regular)");
        }
        write_output(int_report,
                     dump(match_report_json(*result.partition,
                                            options.matcher.theta,
                                            options.matcher.provider.get())),
                     out);
      }
      if (verbose) {
        err << result.table.size() << " tuples; matching "
            << result.match_seconds << " s, full disjunction "
            << result.fd_seconds << " s\n";
      }
    } else if (eval->parsed()) {
      const GoldPairs gold = load_gold(eval_gold);
      MatchPartition partition;
      if (!eval_report.empty()) {
        std::ifstream in(eval_report, std::ios::binary);
        if (!in) throw InputError("cannot open match report " + eval_report);
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw InputError("match report is not valid JSON: " +
                           std::string(e.what()));
        }
        partition = parse_match_report(doc);
      } else if (!eval_in.align.empty()) {
        partition = match_all(load_inputs(eval_in), matcher_config(eval_flags),
                              job_count(eval_flags.jobs));
      } else {
        throw InputError("eval needs --report, or --tables with --align");
      }
      const MatchScore score = matching_prf(partition, gold);
      if (eval_format == "json") {
        out << dump(score_json(score));
      } else {
        out << score_text(score);
      }
      if (!eval_out.empty()) write_output(eval_out, dump(score_json(score)), out);
    } else if (bench->parsed()) {
      bench_options.sizes = parse_sizes(sizes_text);
      bench_options.run_regular = modes.find("regular") != std::string::npos;
      bench_options.run_fuzzy = modes.find("fuzzy") != std::string::npos;
      if (!(timeout_s > 0)) throw InputError("--timeout must be positive");
      bench_options.timeout = std::chrono::milliseconds(
          static_cast<long long>(timeout_s * 1000.0));
      const BenchReport report =
          bench_scaling(bench_options, verbose ? &err : nullptr);
      out << bench_csv(report);
      if (!bench_csv_path.empty()) {
        write_output(bench_csv_path, bench_csv(report), out);
      }
      if (!bench_json_path.empty()) {
        write_output(bench_json_path, dump(bench_json(report, bench_options)),
                     out);
      }
      if (!bench_series_path.empty()) {
        write_output(bench_series_path, bench_series(report), out);
      }
    } else if (generate->parsed()) {
      const SyntheticSet data = generate_synthetic(gen);
      const std::filesystem::path dir(gen_dir);
      std::filesystem::create_directories(dir);
      nlohmann::ordered_json align = nlohmann::ordered_json::object();
      for (const auto& attribute : data.set.spec().attributes()) {
        auto& cols = align[attribute] = nlohmann::ordered_json::array();
        for (const auto& ref : data.set.spec().columns(attribute)) {
          cols.push_back({{"table", ref.table_id}, {"column", ref.column}});
        }
      }
      for (const auto& table : data.set.tables()) {
        write_table(table, dir / (table.name + ".csv"));
      }
      write_output((dir / "alignment.json").string(), dump(align), out);
      write_output((dir / "dictionary.json").string(),
                   dump(nlohmann::ordered_json{{"groups", data.synonym_groups}}),
                   out);
      write_output((dir / "gold.json").string(), dump(gold_json(data.gold)),
                   out);
      out << "wrote " << data.set.tables().size() << " tables to " << dir.string()
          << " (table order:";
      for (const auto& table : data.set.tables()) out << ' ' << table.name;
      out << ")\n";
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace fuzzyfd
