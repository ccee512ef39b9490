#include <fstream>
#include <sstream>

#include "fuzzyfd/errors.h"
#include "fuzzyfd/evaluation.h"

namespace fuzzyfd {
namespace {

std::string describe(const nlohmann::json& j) {
  std::string s = j.dump();
  if (s.size() > 80) s = s.substr(0, 77) + "...";
  return s;
}

double harmonic(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

ValuePair unordered_pair(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

GoldPairs parse_gold(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("gold file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("gold file must be an object of attribute -> pairs");
  }
  GoldPairs gold;
  for (const auto& [attribute, pairs] : doc.items()) {
    if (!pairs.is_array()) {
      throw InputError("gold attribute '" + attribute +
                       "' must map to an array of pairs");
    }
    auto& out = gold.pairs[attribute];
    for (const auto& pair : pairs) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
          !pair[1].is_string()) {
        throw InputError("gold attribute '" + attribute +
                         "': malformed entry " + describe(pair) +
                         " (expected [\"value\", \"value\"])");
      }
      out.insert(unordered_pair(pair[0].get<std::string>(),
                                pair[1].get<std::string>()));
    }
  }
  return gold;
}

GoldPairs load_gold(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open gold file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_gold(buffer.str());
}

nlohmann::ordered_json gold_json(const GoldPairs& gold) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [attribute, pairs] : gold.pairs) {
    auto& out = doc[attribute] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : pairs) out.push_back({a, b});
  }
  return doc;
}

Prf score_pairs(const std::set<ValuePair>& predicted,
                const std::set<ValuePair>& gold) {
  Prf s;
  s.predicted = predicted.size();
  s.gold = gold.size();
  for (const auto& p : predicted) s.correct += gold.count(p);
  if (predicted.empty()) {
    s.precision = gold.empty() ? 1.0 : 0.0;
  } else {
    s.precision = static_cast<double>(s.correct) / s.predicted;
  }
  s.recall = gold.empty() ? 1.0 : static_cast<double>(s.correct) / s.gold;
  s.f1 = harmonic(s.precision, s.recall);
  return s;
}

std::set<ValuePair> predicted_pairs(const AttributeMatch& match) {
  std::set<ValuePair> pairs;
  for (const auto& set : match.sets) {
    for (std::size_t i = 0; i < set.members.size(); ++i) {
      for (std::size_t j = i + 1; j < set.members.size(); ++j) {
        const Member& a = set.members[i];
        const Member& b = set.members[j];
        if (a.table_id == b.table_id || a.value == b.value) continue;
        pairs.insert(unordered_pair(a.value, b.value));
      }
    }
  }
  return pairs;
}

MatchScore matching_prf(const MatchPartition& predicted,
                        const GoldPairs& gold) {
  MatchScore score;
  std::set<ValuePair> all_predicted, all_gold;
  for (const auto& [attribute, raw_gold] : gold.pairs) {
    const AttributeMatch* match = predicted.find(attribute);
    if (!match) {
      score.warnings.push_back("gold attribute '" + attribute +
                               "' is not in the prediction; ignored");
      continue;
    }
    std::set<std::string> known;
    for (const auto& set : match->sets) {
      for (const auto& m : set.members) known.insert(m.value);
    }
    std::set<ValuePair> usable;
    for (const auto& pair : raw_gold) {
      if (pair.first == pair.second) {
        score.warnings.push_back(attribute + ": gold pair (" + pair.first +
                                 ", " + pair.second +
                                 ") pairs a value with itself; ignored");
        continue;
      }
      bool ok = true;
      for (const std::string* v : {&pair.first, &pair.second}) {
        if (!known.count(*v)) {
          score.warnings.push_back(attribute + ": gold value '" + *v +
                                   "' does not occur in the columns; pair (" +
                                   pair.first + ", " + pair.second +
                                   ") ignored");
          ok = false;
        }
      }
      if (ok) usable.insert(pair);
    }
    const std::set<ValuePair> pred = predicted_pairs(*match);
    score.per_attribute[attribute] = score_pairs(pred, usable);
    for (const auto& p : pred) all_predicted.insert({attribute + '\x1f' + p.first, p.second});
    for (const auto& p : usable) all_gold.insert({attribute + '\x1f' + p.first, p.second});
  }

  score.micro = score_pairs(all_predicted, all_gold);
  if (!score.per_attribute.empty()) {
    Prf& m = score.macro;
    for (const auto& [attribute, s] : score.per_attribute) {
      m.precision += s.precision;
      m.recall += s.recall;
      m.f1 += s.f1;
      m.predicted += s.predicted;
      m.gold += s.gold;
      m.correct += s.correct;
    }
    const double n = static_cast<double>(score.per_attribute.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
  } else {
    score.macro = score.micro;
  }
  return score;
}

namespace {

nlohmann::ordered_json prf_json(const Prf& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
          {"predicted_pairs", s.predicted}, {"gold_pairs", s.gold},
          {"correct_pairs", s.correct}};
}

std::string fixed(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

nlohmann::ordered_json score_json(const MatchScore& score) {
  nlohmann::ordered_json doc;
  doc["attributes"] = nlohmann::ordered_json::object();
  for (const auto& [attribute, s] : score.per_attribute) {
    doc["attributes"][attribute] = prf_json(s);
  }
  doc["macro"] = prf_json(score.macro);
  doc["micro"] = prf_json(score.micro);
  doc["warnings"] = score.warnings;
  return doc;
}

std::string score_text(const MatchScore& score) {
  std::ostringstream out;
  auto line = [&](const std::string& name, const Prf& s) {
    out << name << "  P=" << fixed(s.precision) << "  R=" << fixed(s.recall)
        << "  F1=" << fixed(s.f1) << "  (" << s.correct << "/" << s.predicted
        << " predicted, " << s.correct << "/" << s.gold << " gold)\n";
  };
  for (const auto& [attribute, s] : score.per_attribute) line(attribute, s);
  line("macro", score.macro);
  line("micro", score.micro);
  for (const auto& w : score.warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace fuzzyfd
