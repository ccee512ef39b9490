#include <algorithm>

#include "fuzzyfd/errors.h"
#include "fuzzyfd/value_matcher.h"

namespace fuzzyfd {
namespace {

double max_intra_distance(const ValueSet& set, EmbeddingProvider& provider) {
  std::vector<std::string> values;
  for (const auto& m : set.members) {
    if (std::find(values.begin(), values.end(), m.value) == values.end()) {
      values.push_back(m.value);
    }
  }
  if (values.size() < 2) return 0.0;
  const auto vectors = provider.embed_batch(values);
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      worst = std::max(worst, cosine_distance(vectors[i], vectors[j]));
    }
  }
  return worst;
}

Member parse_member(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("table") || !j.contains("value") ||
      !j["table"].is_number_integer() || !j["value"].is_string()) {
    throw InputError("match report member needs integer 'table' and string "
                     "'value'");
  }
  return Member{j["table"].get<int>(), j["value"].get<std::string>()};
}

}  // namespace

nlohmann::ordered_json match_report_json(const MatchPartition& partition,
                                         double theta,
                                         EmbeddingProvider* provider) {
  nlohmann::ordered_json doc;
  doc["theta"] = theta;
  if (provider) doc["provider"] = provider->kind();
  doc["attributes"] = nlohmann::ordered_json::array();
  for (const auto& attribute : partition.attributes) {
    nlohmann::ordered_json a;
    a["attribute"] = attribute.attribute;
    a["sets"] = nlohmann::ordered_json::array();
    for (const auto& set : attribute.sets) {
      nlohmann::ordered_json s;
      s["representative"] = set.representative;
      s["members"] = nlohmann::ordered_json::array();
      for (const auto& m : set.members) {
        s["members"].push_back({{"table", m.table_id}, {"value", m.value}});
      }
      s["edges"] = nlohmann::ordered_json::array();
      for (const auto& e : set.edges) {
        s["edges"].push_back(
            {{"from", e.combined_value},
             {"to", {{"table", e.next.table_id}, {"value", e.next.value}}},
             {"distance", e.distance}});
      }
      if (provider) s["max_intra_distance"] = max_intra_distance(set, *provider);
      a["sets"].push_back(std::move(s));
    }
    // Cells that rewriting will change.
    a["rewrites"] = nlohmann::ordered_json::array();
    for (const auto& set : attribute.sets) {
      for (const auto& m : set.members) {
        if (m.value == set.representative) continue;
        a["rewrites"].push_back({{"table", m.table_id},
                                 {"value", m.value},
                                 {"representative", set.representative}});
      }
    }
    doc["attributes"].push_back(std::move(a));
  }
  return doc;
}

MatchPartition parse_match_report(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("attributes") ||
      !doc["attributes"].is_array()) {
    throw InputError("match report needs an 'attributes' array");
  }
  MatchPartition partition;
  for (const auto& a : doc["attributes"]) {
    if (!a.contains("attribute") || !a["attribute"].is_string() ||
        !a.contains("sets") || !a["sets"].is_array()) {
      throw InputError("match report attribute entry is malformed");
    }
    AttributeMatch match{a["attribute"].get<std::string>(), {}};
    for (const auto& s : a["sets"]) {
      if (!s.contains("representative") || !s.contains("members") ||
          !s["members"].is_array()) {
        throw InputError("match report set is malformed");
      }
      ValueSet set;
      set.representative = s["representative"].get<std::string>();
      for (const auto& m : s["members"]) set.members.push_back(parse_member(m));
      if (s.contains("edges")) {
        for (const auto& e : s["edges"]) {
          set.edges.push_back(MatchEdge{e.at("from").get<std::string>(),
                                        parse_member(e.at("to")),
                                        e.at("distance").get<double>()});
        }
      }
      match.sets.push_back(std::move(set));
    }
    partition.attributes.push_back(std::move(match));
  }
  return partition;
}

}  // namespace fuzzyfd
