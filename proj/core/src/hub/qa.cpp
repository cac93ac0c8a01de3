#include "tiltkit/hub/qa.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "tiltkit/error.hpp"
#include "tiltkit/util/embedded_data.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::hub {

namespace {

constexpr std::array<std::pair<IntentKind, std::string_view>, 6> kIntentNames = {{
    {IntentKind::kControllerIdentity, "CONTROLLER_IDENTITY"},
    {IntentKind::kThirdCountryTransfers, "THIRD_COUNTRY_TRANSFERS"},
    {IntentKind::kPurposesForCategory, "PURPOSES_FOR_CATEGORY"},
    {IntentKind::kRetentionForCategory, "RETENTION_FOR_CATEGORY"},
    {IntentKind::kAdmInUse, "ADM_IN_USE"},
    {IntentKind::kRightsSummary, "RIGHTS_SUMMARY"},
}};

bool needs_category(IntentKind kind) {
  return kind == IntentKind::kPurposesForCategory || kind == IntentKind::kRetentionForCategory;
}

const nlohmann::json& templates() {
  static const nlohmann::json table = [] {
    const auto data = util::embedded_data("qa_templates.json");
    if (!data) throw IoError("Q&A template table is missing");
    return nlohmann::json::parse(*data);
  }();
  return table;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out;
}

class AnswerBuilder {
 public:
  AnswerBuilder(const tilt::TiltDocument& doc, IntentKind kind) : language_(answer_language(doc)) {
    answer_.intent = kind;
    answer_.language = language_;
    value("service", doc.meta.name, "meta/name");
  }

  void value(std::string slot, std::string text, std::string path) {
    add(std::move(slot), std::move(text), "value", {std::move(path)});
  }

  void count(std::string slot, std::size_t n, std::vector<std::string> paths) {
    add(std::move(slot), std::to_string(n), "count", std::move(paths));
  }

  void list(std::string slot, std::vector<std::string> texts, std::vector<std::string> paths) {
    add(std::move(slot), join(texts), "list", std::move(paths));
  }

  void labels(std::string slot, const std::vector<std::string>& keys) {
    std::vector<std::string> texts;
    std::vector<std::string> paths;
    for (const auto& key : keys) {
      texts.push_back(qa_label(language_, key));
      paths.push_back("rights/" + key + "/available");
    }
    add(std::move(slot), join(texts), "labels", std::move(paths));
  }

  // A field that decided which template variant applies without being
  // interpolated.
  void consulted(std::string path) { decisions_.insert(std::move(path)); }

  Answer finish(std::string key) {
    const auto& text = qa_template(language_, key);
    std::string out;
    for (std::size_t i = 0; i < text.size();) {
      if (text[i] == '{') {
        const auto close = text.find('}', i);
        const auto slot = text.substr(i + 1, close - i - 1);
        auto it = std::find_if(answer_.interpolations.begin(), answer_.interpolations.end(),
                               [&](const auto& in) { return in.slot == slot; });
        if (it == answer_.interpolations.end()) throw IoError("Q&A template " + key + " uses unknown slot " + slot);
        out += it->value;
        used_.insert(slot);
        i = close + 1;
      } else {
        out.push_back(text[i++]);
      }
    }
    // Only slots the template actually printed count as interpolations.
    std::erase_if(answer_.interpolations, [&](const auto& in) { return !used_.contains(in.slot); });
    std::set<std::string> evidence = decisions_;
    for (const auto& in : answer_.interpolations) evidence.insert(in.paths.begin(), in.paths.end());
    answer_.template_key = std::move(key);
    answer_.answer_text = std::move(out);
    answer_.evidence_paths.assign(evidence.begin(), evidence.end());
    return std::move(answer_);
  }

 private:
  void add(std::string slot, std::string text, std::string source, std::vector<std::string> paths) {
    answer_.interpolations.push_back(Interpolation{std::move(slot), std::move(text), std::move(source), std::move(paths)});
  }

  std::string language_;
  Answer answer_;
  std::set<std::string> decisions_;
  std::set<std::string> used_;
};

std::size_t find_category(const tilt::TiltDocument& doc, const std::string& category) {
  const auto wanted = util::fold_case(util::decode_utf8(util::trim(category)));
  for (std::size_t i = 0; i < doc.data_disclosed.size(); ++i) {
    if (util::fold_case(util::decode_utf8(doc.data_disclosed[i].category)) == wanted) return i;
  }
  throw UnknownCategoryError("document '" + doc.meta.id + "' discloses no category '" + category + "'",
                             "params/category");
}

Answer controller_identity(const tilt::TiltDocument& doc) {
  AnswerBuilder b(doc, IntentKind::kControllerIdentity);
  b.value("name", doc.controller.name, "controller/name");
  b.value("country", doc.controller.country, "controller/country");
  b.consulted("controller/address");
  if (doc.controller.address.empty()) return b.finish("CONTROLLER_IDENTITY.noAddress");
  b.value("address", doc.controller.address, "controller/address");
  return b.finish("CONTROLLER_IDENTITY");
}

Answer third_country_transfers(const tilt::TiltDocument& doc) {
  AnswerBuilder b(doc, IntentKind::kThirdCountryTransfers);
  const auto& transfers = doc.third_country_transfers;
  b.count("count", transfers.size(), {"thirdCountryTransfers"});
  std::vector<std::string> countries;
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    countries.push_back(transfers[i].country);
    paths.push_back("thirdCountryTransfers/" + std::to_string(i) + "/country");
  }
  b.list("countries", countries, paths);
  b.consulted("thirdCountryTransfers");
  if (transfers.empty()) return b.finish("THIRD_COUNTRY_TRANSFERS.none");
  if (transfers.size() == 1) return b.finish("THIRD_COUNTRY_TRANSFERS.one");
  return b.finish("THIRD_COUNTRY_TRANSFERS");
}

Answer purposes_for_category(const tilt::TiltDocument& doc, const std::string& category) {
  const auto index = find_category(doc, category);
  const auto base = "dataDisclosed/" + std::to_string(index);
  const auto& entry = doc.data_disclosed[index];
  AnswerBuilder b(doc, IntentKind::kPurposesForCategory);
  b.value("category", entry.category, base + "/category");
  std::vector<std::string> texts;
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < entry.purposes.size(); ++i) {
    texts.push_back(entry.purposes[i].description);
    paths.push_back(base + "/purposes/" + std::to_string(i) + "/description");
  }
  b.list("purposes", texts, paths);
  b.consulted(base + "/purposes");
  return b.finish(entry.purposes.empty() ? "PURPOSES_FOR_CATEGORY.none" : "PURPOSES_FOR_CATEGORY");
}

Answer retention_for_category(const tilt::TiltDocument& doc, const std::string& category) {
  const auto index = find_category(doc, category);
  const auto base = "dataDisclosed/" + std::to_string(index);
  const auto& entry = doc.data_disclosed[index];
  AnswerBuilder b(doc, IntentKind::kRetentionForCategory);
  b.value("category", entry.category, base + "/category");
  if (!entry.storage) {
    b.consulted(base + "/storage");
    return b.finish("RETENTION_FOR_CATEGORY.none");
  }
  b.consulted(base + "/storage/kind");
  if (entry.storage->kind == tilt::StorageKind::kDuration) {
    b.value("duration", entry.storage->value, base + "/storage/value");
    return b.finish("RETENTION_FOR_CATEGORY.duration");
  }
  b.value("criterion", entry.storage->value, base + "/storage/value");
  return b.finish("RETENTION_FOR_CATEGORY.criterion");
}

Answer adm_in_use(const tilt::TiltDocument& doc) {
  AnswerBuilder b(doc, IntentKind::kAdmInUse);
  const auto& adm = doc.automated_decision_making;
  if (!adm) {
    b.consulted("automatedDecisionMaking");
    return b.finish("ADM_IN_USE.unknown");
  }
  b.consulted("automatedDecisionMaking/inUse");
  if (!adm->in_use) return b.finish("ADM_IN_USE.no");
  b.consulted("automatedDecisionMaking/logicDescription");
  if (!adm->logic_description || adm->logic_description->empty()) return b.finish("ADM_IN_USE.yesNoLogic");
  b.value("logic", *adm->logic_description, "automatedDecisionMaking/logicDescription");
  return b.finish("ADM_IN_USE.yes");
}

Answer rights_summary(const tilt::TiltDocument& doc) {
  AnswerBuilder b(doc, IntentKind::kRightsSummary);
  std::vector<std::string> keys;
  std::vector<std::string_view> all(tilt::kCoreRights.begin(), tilt::kCoreRights.end());
  all.push_back("withdrawConsent");
  for (auto key : all) {
    const auto* entry = tilt::find_right(doc.rights, key);
    if (entry && *entry && (*entry)->available) keys.emplace_back(key);
  }
  b.consulted("rights");
  std::vector<std::string> paths;
  for (const auto& key : keys) paths.push_back("rights/" + key + "/available");
  b.count("count", keys.size(), paths);
  b.labels("rights", keys);
  if (keys.empty()) return b.finish("RIGHTS_SUMMARY.none");
  if (keys.size() == 1) return b.finish("RIGHTS_SUMMARY.one");
  return b.finish("RIGHTS_SUMMARY");
}

}  // namespace

std::string_view intent_name(IntentKind kind) {
  for (const auto& [k, name] : kIntentNames) {
    if (k == kind) return name;
  }
  return "UNKNOWN";
}

Intent intent_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw BadIntentError("intent must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw BadIntentError("intent needs a string 'kind'", "kind");
  const auto name = j["kind"].get<std::string>();
  auto it = std::find_if(kIntentNames.begin(), kIntentNames.end(), [&](const auto& e) { return e.second == name; });
  if (it == kIntentNames.end()) throw BadIntentError("unknown intent kind '" + name + "'", "kind");
  Intent intent{it->first, {}};
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw BadIntentError("'params' must be an object", "params");
    for (const auto& [key, value] : j["params"].items()) {
      if (!value.is_string()) throw BadIntentError("intent parameters must be strings", "params/" + key);
      intent.params[key] = value.get<std::string>();
    }
  }
  for (const auto& key : j.items()) {
    if (key.key() != "kind" && key.key() != "params") throw BadIntentError("unknown intent field", key.key());
  }
  if (needs_category(intent.kind)) {
    auto p = intent.params.find("category");
    if (p == intent.params.end() || util::trim(p->second).empty()) {
      throw BadIntentError(name + " needs a 'category' parameter", "params/category");
    }
  }
  return intent;
}

nlohmann::json to_json(const Intent& intent) {
  nlohmann::json j{{"kind", intent_name(intent.kind)}};
  if (!intent.params.empty()) j["params"] = intent.params;
  return j;
}

nlohmann::json to_json(const Answer& answer) {
  nlohmann::json interpolations = nlohmann::json::array();
  for (const auto& in : answer.interpolations) {
    interpolations.push_back({{"slot", in.slot}, {"value", in.value}, {"source", in.source}, {"paths", in.paths}});
  }
  return {{"intent", intent_name(answer.intent)},
          {"language", answer.language},
          {"template", answer.template_key},
          {"answerText", answer.answer_text},
          {"evidencePaths", answer.evidence_paths},
          {"interpolations", interpolations}};
}

std::string answer_language(const tilt::TiltDocument& doc) {
  return templates().contains(doc.meta.language) ? doc.meta.language : "en";
}

const std::string& qa_template(std::string_view language, std::string_view key) {
  const auto& table = templates().at(std::string(language)).at("templates");
  auto it = table.find(std::string(key));
  if (it == table.end()) throw IoError("Q&A template " + std::string(key) + " is missing");
  return it->get_ref<const std::string&>();
}

const std::string& qa_label(std::string_view language, std::string_view right_key) {
  return templates().at(std::string(language)).at("labels").at(std::string(right_key)).get_ref<const std::string&>();
}

Answer answer_question(const tilt::TiltDocument& doc, const Intent& intent) {
  if (needs_category(intent.kind) && !intent.params.contains("category")) {
    throw BadIntentError(std::string(intent_name(intent.kind)) + " needs a 'category' parameter", "params/category");
  }
  switch (intent.kind) {
    case IntentKind::kControllerIdentity:
      return controller_identity(doc);
    case IntentKind::kThirdCountryTransfers:
      return third_country_transfers(doc);
    case IntentKind::kPurposesForCategory:
      return purposes_for_category(doc, intent.params.at("category"));
    case IntentKind::kRetentionForCategory:
      return retention_for_category(doc, intent.params.at("category"));
    case IntentKind::kAdmInUse:
      return adm_in_use(doc);
    case IntentKind::kRightsSummary:
      return rights_summary(doc);
  }
  throw BadIntentError("unknown intent kind");
}

}  // namespace tiltkit::hub
