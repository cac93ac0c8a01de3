#include "tiltkit/tilt/completeness.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "tiltkit/util/countries.hpp"

namespace tiltkit::tilt {

namespace {

using Status = ItemStatus;

bool has_text(const std::optional<std::string>& s) { return s && !s->empty(); }

std::string category_path(std::size_t i) { return "dataDisclosed/" + std::to_string(i); }

CompletenessItem present(std::string path) { return {"", Status::kPresent, std::move(path)}; }
CompletenessItem missing(std::string path) { return {"", Status::kMissing, std::move(path)}; }
CompletenessItem not_applicable() { return {"", Status::kNotApplicable, std::nullopt}; }

// Shared shape of C04/C07/C09/C13: every category must satisfy `ok`.
CompletenessItem per_category(const TiltDocument& doc, const std::string& suffix,
                              const std::function<bool(const DataDisclosed&)>& ok) {
  if (doc.data_disclosed.empty()) return missing("dataDisclosed");
  for (std::size_t i = 0; i < doc.data_disclosed.size(); ++i) {
    if (!ok(doc.data_disclosed[i])) return missing(category_path(i) + "/" + suffix);
  }
  return present("dataDisclosed");
}

CompletenessItem c01(const TiltDocument& doc) {
  if (doc.controller.name.empty()) return missing("controller/name");
  if (doc.controller.address.empty()) return missing("controller/address");
  return present("controller");
}

CompletenessItem c02(const TiltDocument& doc) {
  if (util::is_eu_eea(doc.controller.country)) return not_applicable();
  return doc.controller.representative ? present("controller/representative")
                                       : missing("controller/representative");
}

CompletenessItem c03(const TiltDocument& doc) { return doc.dpo ? present("dpo") : missing("dpo"); }

CompletenessItem c04(const TiltDocument& doc) {
  return per_category(doc, "purposes", [](const DataDisclosed& d) { return !d.purposes.empty(); });
}

CompletenessItem c05(const TiltDocument& doc) {
  if (doc.data_disclosed.empty()) return missing("dataDisclosed");
  bool any_purpose = false;
  for (std::size_t i = 0; i < doc.data_disclosed.size(); ++i) {
    const auto& purposes = doc.data_disclosed[i].purposes;
    for (std::size_t j = 0; j < purposes.size(); ++j) {
      any_purpose = true;
      if (!has_text(purposes[j].legal_basis)) {
        return missing(category_path(i) + "/purposes/" + std::to_string(j) + "/legalBasis");
      }
    }
  }
  return any_purpose ? present("dataDisclosed") : missing("dataDisclosed");
}

CompletenessItem c06(const TiltDocument& doc) {
  bool triggered = false;
  for (std::size_t i = 0; i < doc.data_disclosed.size(); ++i) {
    const auto& purposes = doc.data_disclosed[i].purposes;
    for (std::size_t j = 0; j < purposes.size(); ++j) {
      if (purposes[j].legal_basis != "GDPR-6-1-f") continue;
      triggered = true;
      if (!has_text(purposes[j].legitimate_interest)) {
        return missing(category_path(i) + "/purposes/" + std::to_string(j) + "/legitimateInterest");
      }
    }
  }
  return triggered ? present("dataDisclosed") : not_applicable();
}

CompletenessItem c07(const TiltDocument& doc) {
  return per_category(doc, "recipients", [](const DataDisclosed& d) { return !d.recipients.empty(); });
}

CompletenessItem c08(const TiltDocument& doc) {
  if (doc.third_country_transfers.empty()) return not_applicable();
  for (std::size_t i = 0; i < doc.third_country_transfers.size(); ++i) {
    const auto& t = doc.third_country_transfers[i];
    if (!t.adequacy_decision && !has_text(t.safeguards)) {
      return missing("thirdCountryTransfers/" + std::to_string(i) + "/safeguards");
    }
  }
  return present("thirdCountryTransfers");
}

CompletenessItem c09(const TiltDocument& doc) {
  return per_category(doc, "storage", [](const DataDisclosed& d) { return d.storage.has_value(); });
}

CompletenessItem c10(const TiltDocument& doc) {
  for (std::string_view key : kCoreRights) {
    const auto& entry = *find_right(doc.rights, key);
    if (!entry) return missing("rights/" + std::string(key));
  }
  return present("rights");
}

CompletenessItem c11(const TiltDocument& doc) {
  if (!cites_legal_basis(doc, "GDPR-6-1-a")) return not_applicable();
  const auto& entry = doc.rights.withdraw_consent;
  return entry ? present("rights/withdrawConsent") : missing("rights/withdrawConsent");
}

CompletenessItem c12(const TiltDocument& doc) {
  return doc.rights.complaint_authority ? present("rights/complaintAuthority")
                                        : missing("rights/complaintAuthority");
}

CompletenessItem c13(const TiltDocument& doc) {
  if (doc.data_disclosed.empty()) return not_applicable();
  return per_category(doc, "requirementNote",
                      [](const DataDisclosed& d) { return has_text(d.requirement_note); });
}

CompletenessItem c14(const TiltDocument& doc) {
  const auto& adm = doc.automated_decision_making;
  if (!adm) return missing("automatedDecisionMaking");
  if (adm->in_use && !has_text(adm->logic_description)) {
    return missing("automatedDecisionMaking/logicDescription");
  }
  return present("automatedDecisionMaking");
}

struct Rule {
  std::string_view key;
  std::string_view description;
  CompletenessItem (*evaluate)(const TiltDocument&);
};

constexpr std::array<Rule, 14> kRules = {{
    {"C01", "controller identity and contact details", c01},
    {"C02", "representative of a controller outside the EU/EEA", c02},
    {"C03", "data protection officer contact", c03},
    {"C04", "at least one purpose per disclosed data category", c04},
    {"C05", "legal basis for every purpose", c05},
    {"C06", "legitimate interests pursued (legal basis GDPR-6-1-f)", c06},
    {"C07", "at least one recipient per disclosed data category", c07},
    {"C08", "adequacy decision or safeguards for every third-country transfer", c08},
    {"C09", "storage period or criterion per data category", c09},
    {"C10", "access, rectification, erasure, restriction, portability and objection rights", c10},
    {"C11", "right to withdraw consent (legal basis GDPR-6-1-a)", c11},
    {"C12", "right to lodge a complaint with a supervisory authority", c12},
    {"C13", "statutory or contractual requirement to provide the data", c13},
    {"C14", "automated decision-making disclosure and logic involved", c14},
}};

}  // namespace

std::string_view to_string(ItemStatus status) {
  switch (status) {
    case ItemStatus::kPresent: return "present";
    case ItemStatus::kMissing: return "missing";
    case ItemStatus::kNotApplicable: return "not-applicable";
  }
  return "missing";
}

std::size_t CompletenessReport::missing_count() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& item) {
    return item.status == ItemStatus::kMissing;
  }));
}

std::vector<std::string> CompletenessReport::keys_with(ItemStatus status) const {
  std::vector<std::string> keys;
  for (const auto& item : items) {
    if (item.status == status) keys.push_back(item.key);
  }
  return keys;
}

CompletenessReport check_completeness(const TiltDocument& doc) {
  CompletenessReport report;
  report.items.reserve(kRules.size());
  for (const auto& rule : kRules) {
    auto item = rule.evaluate(doc);
    item.key = std::string(rule.key);
    report.items.push_back(std::move(item));
  }
  return report;
}

std::string_view describe_checklist_item(std::string_view key) {
  for (const auto& rule : kRules) {
    if (rule.key == key) return rule.description;
  }
  return {};
}

nlohmann::json to_json(const CompletenessReport& report) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : report.items) {
    nlohmann::json j = {{"key", item.key}, {"status", std::string(to_string(item.status))}};
    if (item.evidence_path) j["evidencePath"] = *item.evidence_path;
    items.push_back(std::move(j));
  }
  return {{"items", std::move(items)}};
}

}  // namespace tiltkit::tilt
