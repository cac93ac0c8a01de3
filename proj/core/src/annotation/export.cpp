#include "tiltkit/annotation/export.hpp"

#include <algorithm>
#include <regex>

#include "annotation/fields.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/util/countries.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::annotation {

namespace {

using tilt::TiltDocument;

std::vector<std::string> excerpts(const AnnotationTask& task, std::string_view field) {
  std::vector<std::string> out;
  const auto answer = task.answers.find(std::string(field));
  if (answer == task.answers.end() || !answer->second.present) return out;
  for (const auto& a : task.annotations) {
    if (a.field != field) continue;
    auto text = util::collapse_whitespace(a.excerpt);
    if (!text.empty()) out.push_back(std::move(text));
  }
  return out;
}

std::string joined(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::u32string folded(std::string_view text) { return util::fold_case(util::decode_utf8(text)); }

std::optional<std::string> find_email(std::string_view text) {
  static const std::regex kEmail(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, kEmail)) return m.str();
  return std::nullopt;
}

std::optional<std::string> find_phone(std::string_view text) {
  static const std::regex kPhone(R"(\+?\d[\d /().-]{5,}\d)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, kPhone)) return m.str();
  return std::nullopt;
}

// First line is the name, remaining lines the address. Single-line excerpts
// split at the first comma; text up to a colon ("Verantwortlicher: ...") is
// dropped.
std::pair<std::string, std::string> split_name_address(const std::vector<std::string>& raw_excerpts) {
  std::vector<std::string> lines;
  for (const auto& excerpt : raw_excerpts) {
    std::size_t start = 0;
    while (start <= excerpt.size()) {
      const auto nl = excerpt.find('\n', start);
      auto line = util::collapse_whitespace(excerpt.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
      if (!line.empty()) lines.push_back(std::move(line));
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }
  if (lines.empty()) return {};
  std::string name = lines.front();
  if (auto colon = name.find(':'); colon != std::string::npos && colon + 1 < name.size()) {
    name = util::trim(name.substr(colon + 1));
  }
  std::string address;
  if (lines.size() > 1) {
    address = joined(std::vector<std::string>(lines.begin() + 1, lines.end()), ", ");
  } else if (auto comma = name.find(','); comma != std::string::npos) {
    address = util::trim(name.substr(comma + 1));
    name = util::trim(name.substr(0, comma));
  }
  return {name, address};
}

std::vector<std::string> raw_excerpts(const AnnotationTask& task, std::string_view field) {
  std::vector<std::string> out;
  const auto answer = task.answers.find(std::string(field));
  if (answer == task.answers.end() || !answer->second.present) return out;
  for (const auto& a : task.annotations) {
    if (a.field == field) out.push_back(a.excerpt);
  }
  return out;
}

std::optional<tilt::ContactPoint> contact_from(const std::vector<std::string>& parts) {
  if (parts.empty()) return std::nullopt;
  const std::string text = joined(parts, " ");
  tilt::ContactPoint c;
  c.email = find_email(text);
  c.phone = find_phone(text);
  if (!c.email && !c.phone) return std::nullopt;
  c.name = split_name_address(parts).first;
  return c;
}

}  // namespace

std::optional<std::string> extract_legal_basis(std::string_view text) {
  static const std::regex kBasis(
      R"((?:art\.?|artikel|article)\s*(\d{1,2})\s*(?:abs\.?|absatz|para(?:graph)?\.?)?\s*\(?\s*(\d)\s*\)?\s*(?:(?:s\.|satz)\s*\d\s*)?(?:lit\.?|buchst(?:abe)?\.?|point|letter)?\s*\(?\s*([a-f])\s*\)?(?![a-z]))",
      std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, kBasis)) return std::nullopt;
  std::string letter = util::to_lower_ascii(m[3].str());
  return "GDPR-" + m[1].str() + "-" + m[2].str() + "-" + letter;
}

tilt::TiltDocument export_tilt(const AnnotationTask& task, const PolicyText& policy, const MetaSeed& seed) {
  if (task.status != TaskStatus::kDone) {
    throw TaskNotDoneError("task " + task.id + " is not done (" + std::to_string(task.cursor) + "/" +
                           std::to_string(task.question_queue.size()) + " answered)");
  }
  const auto& table = detail::field_table();
  TiltDocument doc;

  // meta
  doc.meta.id = seed.id.empty() ? (policy.id.empty() ? task.id : policy.id) : seed.id;
  doc.meta.name = seed.name;
  doc.meta.version = 1;
  static const std::regex kLanguage("^[a-z]{2}$");
  doc.meta.language = std::regex_match(seed.language, kLanguage) ? seed.language : "en";
  Timestamp ts{};
  for (const auto& a : task.annotations) ts = std::max(ts, a.at);
  if (seed.timestamp) ts = *seed.timestamp;
  doc.meta.created = ts;
  doc.meta.modified = ts;
  if (policy.source_url) doc.sources.push_back(*policy.source_url);

  const std::string fallback_country =
      seed.country && util::is_alpha2_country(*seed.country) ? *seed.country : task.country;
  const auto country_in = [&](const std::string& text) {
    const auto found = util::find_countries(text);
    return found.empty() ? fallback_country : found.front();
  };

  // controller block
  const auto controller_raw = raw_excerpts(task, "controller");
  auto [name, address] = split_name_address(controller_raw);
  doc.controller.name = !name.empty() ? name : (!seed.name.empty() ? seed.name : doc.meta.id);
  doc.controller.address = address;
  doc.controller.country = controller_raw.empty() ? fallback_country : country_in(joined(controller_raw, " "));
  doc.controller.representative = contact_from(raw_excerpts(task, "representative"));
  doc.dpo = contact_from(raw_excerpts(task, "dpo"));

  // per-category block: every category shares the annotated purposes,
  // recipients, storage and requirement note.
  const auto basis_texts = excerpts(task, "legalBases");
  std::optional<std::string> shared_basis;
  for (const auto& text : basis_texts) {
    if ((shared_basis = extract_legal_basis(text))) break;
  }
  if (!shared_basis && !basis_texts.empty()) shared_basis = basis_texts.front();
  const auto interests = excerpts(task, "legitimateInterests");

  std::vector<tilt::Purpose> purposes;
  for (const auto& text : excerpts(task, "purposes")) {
    tilt::Purpose p;
    p.description = text;
    p.legal_basis = extract_legal_basis(text);
    if (!p.legal_basis) p.legal_basis = shared_basis;
    if (p.legal_basis == "GDPR-6-1-f" && !interests.empty()) p.legitimate_interest = joined(interests, " ");
    purposes.push_back(std::move(p));
  }
  std::vector<tilt::Recipient> recipients;
  for (const auto& text : excerpts(task, "recipients")) {
    recipients.push_back(tilt::Recipient{text, "", country_in(text)});
  }
  std::optional<tilt::Storage> storage;
  if (const auto texts = excerpts(task, "storage"); !texts.empty()) {
    const std::string text = joined(texts, " ");
    std::optional<std::string> iso;
    static const std::regex kToken(R"(\bP(?:\d+[YMWD])+(?:T(?:\d+[HMS])+)?\b|\bPT(?:\d+[HMS])+\b)");
    std::smatch m;
    if (std::regex_search(text, m, kToken) && util::is_iso8601_duration(m.str())) iso = m.str();
    storage = iso ? tilt::Storage{tilt::StorageKind::kDuration, *iso} : tilt::Storage{tilt::StorageKind::kCriterion, text};
  }
  std::optional<std::string> requirement;
  if (const auto texts = excerpts(task, "requirementNote"); !texts.empty()) requirement = joined(texts, " ");

  for (const auto& category : excerpts(task, "dataCategories")) {
    const bool seen = std::any_of(doc.data_disclosed.begin(), doc.data_disclosed.end(),
                                  [&](const auto& d) { return d.category == category; });
    if (seen) continue;
    doc.data_disclosed.push_back(tilt::DataDisclosed{category, purposes, recipients, storage, requirement});
  }

  // transfers: one entry per non-EU/EEA country mentioned.
  for (const auto& text : excerpts(task, "thirdCountryTransfers")) {
    const auto f = folded(text);
    for (const auto& country : util::find_countries(text)) {
      if (util::is_eu_eea(country)) continue;
      const bool seen = std::any_of(doc.third_country_transfers.begin(), doc.third_country_transfers.end(),
                                    [&](const auto& t) { return t.country == country; });
      if (seen) continue;
      tilt::ThirdCountryTransfer t;
      t.country = country;
      t.adequacy_decision = detail::mentions_any(f, table.adequacy_keywords);
      if (detail::mentions_any(f, table.safeguard_keywords)) t.safeguards = text;
      doc.third_country_transfers.push_back(std::move(t));
    }
  }

  // rights
  for (const auto& text : excerpts(task, "rights")) {
    const auto f = folded(text);
    for (const auto& [right, words] : table.right_keywords) {
      auto* slot = tilt::find_right(doc.rights, right);
      if (slot && !*slot && detail::mentions_any(f, words)) *slot = tilt::RightEntry{true, text};
    }
  }
  if (const auto texts = excerpts(task, "withdrawConsent"); !texts.empty()) {
    doc.rights.withdraw_consent = tilt::RightEntry{true, joined(texts, " ")};
  }
  // Without an email or phone in the excerpt the authority cannot form a
  // valid contact point and is left out.
  doc.rights.complaint_authority = contact_from(raw_excerpts(task, "complaintAuthority"));

  // ADM
  if (const auto texts = excerpts(task, "automatedDecisionMaking"); !texts.empty()) {
    const std::string text = joined(texts, " ");
    tilt::AdmInfo adm;
    adm.in_use = !detail::mentions_any(folded(text), table.adm_negative_keywords);
    if (adm.in_use) adm.logic_description = text;
    doc.automated_decision_making = adm;
  }

  doc = tilt::seal(std::move(doc));
  tilt::validate(doc);
  return doc;
}

}  // namespace tiltkit::annotation
