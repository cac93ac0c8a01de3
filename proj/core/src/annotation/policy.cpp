#include "annotation/fields.hpp"

#include <algorithm>

#include <stdexcept>

#include <json.hpp>

#include "tiltkit/annotation/task.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/util/embedded_data.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::annotation {

namespace detail {

namespace {

std::vector<std::u32string> folded(const nlohmann::json& list) {
  std::vector<std::u32string> out;
  for (const auto& k : list) out.push_back(util::fold_case(util::decode_utf8(k.get<std::string>())));
  return out;
}

}  // namespace

const FieldSpec* FieldTable::find(std::string_view key) const {
  for (const auto& f : fields) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

const FieldTable& field_table() {
  static const FieldTable table = [] {
    const auto data = util::embedded_data("annotation_fields.json");
    if (!data) throw std::logic_error("missing embedded table annotation_fields.json");
    const auto j = nlohmann::json::parse(*data);
    FieldTable t;
    for (const auto& f : j.at("fields")) {
      FieldSpec spec;
      spec.key = f.at("key").get<std::string>();
      spec.aspect = f.at("aspect").get<std::string>();
      spec.checklist = f.at("checklist").get<std::vector<std::string>>();
      spec.prompts = f.at("prompt").get<std::map<std::string, std::string>>();
      spec.keywords = folded(f.at("keywords"));
      t.fields.push_back(std::move(spec));
    }
    for (const auto& [right, words] : j.at("rightKeywords").items()) t.right_keywords[right] = folded(words);
    t.safeguard_keywords = folded(j.at("safeguardKeywords"));
    t.adequacy_keywords = folded(j.at("adequacyKeywords"));
    t.adm_negative_keywords = folded(j.at("admNegativeKeywords"));
    return t;
  }();
  return table;
}

std::vector<std::size_t> keyword_hits(std::u32string_view folded_text,
                                      const std::vector<std::u32string>& keywords) {
  std::vector<std::size_t> hits;
  for (const auto& keyword : keywords) {
    if (keyword.empty()) continue;
    for (auto pos = folded_text.find(keyword); pos != std::u32string_view::npos;
         pos = folded_text.find(keyword, pos + 1)) {
      if (pos == 0 || !util::is_word_char(folded_text[pos - 1])) hits.push_back(pos);
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

bool mentions_any(std::u32string_view folded_text, const std::vector<std::u32string>& keywords) {
  return !keyword_hits(folded_text, keywords).empty();
}

}  // namespace detail

PolicyText make_policy(std::string id, std::string body, std::optional<std::string> source_url) {
  if (body.empty()) throw EmptyPolicyError("policy body is empty", "body");
  PolicyText policy;
  policy.length = util::decode_utf8(body).size();
  policy.id = std::move(id);
  policy.body = std::move(body);
  policy.source_url = std::move(source_url);
  return policy;
}

nlohmann::json to_json(const PolicyText& policy) {
  nlohmann::json j = {{"id", policy.id}, {"body", policy.body}, {"length", policy.length}};
  if (policy.source_url) j["sourceUrl"] = *policy.source_url;
  return j;
}

PolicyText policy_from_json(const nlohmann::json& value) {
  if (!value.is_object()) throw ValidationError("policy: expected an object");
  if (!value.contains("body") || !value["body"].is_string()) {
    throw ValidationError("body: required string field missing", "body");
  }
  std::string id = value.contains("id") && value["id"].is_string() ? value["id"].get<std::string>() : "";
  std::optional<std::string> url;
  if (value.contains("sourceUrl") && value["sourceUrl"].is_string()) url = value["sourceUrl"].get<std::string>();
  return make_policy(std::move(id), value["body"].get<std::string>(), std::move(url));
}

}  // namespace tiltkit::annotation
