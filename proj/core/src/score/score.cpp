#include "tiltkit/score/score.hpp"

#include <algorithm>
#include <cmath>

#include "tiltkit/error.hpp"
#include "tiltkit/tilt/completeness.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::score {

namespace {

bool unprotected(const tilt::ThirdCountryTransfer& t) {
  return !t.adequacy_decision && (!t.safeguards || t.safeguards->empty());
}

std::int64_t tosdr_points(char grade) {
  switch (grade) {
    case 'A':
      return 5;
    case 'B':
      return 0;
    case 'C':
      return -3;
    case 'D':
      return -6;
    default:
      return -10;
  }
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kGreen:
      return "GREEN";
    case Label::kYellow:
      return "YELLOW";
    case Label::kRed:
      return "RED";
  }
  return "RED";
}

Label label_for(int score) {
  if (score >= 70) return Label::kGreen;
  if (score >= 40) return Label::kYellow;
  return Label::kRed;
}

ScoreReport compute_score(const tilt::TiltDocument& doc, const ExternalSignals& signals) {
  ScoreReport report;
  auto add = [&](std::string code, std::int64_t points) {
    if (points != 0) report.breakdown.push_back(BreakdownEntry{std::move(code), points});
  };

  add("TRACKERS", signals.tracker_count >= 10 ? -40 : -4 * signals.tracker_count);
  add("PHISH", signals.phishing_flagged ? -50 : 0);

  const auto bad_transfers = std::count_if(doc.third_country_transfers.begin(), doc.third_country_transfers.end(),
                                           unprotected);
  const bool transfer_fires = bad_transfers > 0;
  add("TRANSFER", -std::min<std::int64_t>(20, 10 * bad_transfers));

  const auto& adm = doc.automated_decision_making;
  const bool opaque = adm && adm->in_use && (!adm->logic_description || adm->logic_description->empty());
  add("ADM_OPAQUE", opaque ? -10 : 0);

  std::int64_t missing = 0;
  for (const auto& item : tilt::check_completeness(doc).items) {
    if (item.status != tilt::ItemStatus::kMissing) continue;
    if (item.key == "C08" && transfer_fires) continue;
    if (item.key == "C14" && opaque) continue;
    ++missing;
  }
  add("MISSING", -std::min<std::int64_t>(20, 2 * missing));

  if (signals.tosdr_grade) add("TOSDR", tosdr_points(*signals.tosdr_grade));
  if (signals.privacy_spy_score) add("PSPY", -std::lround(10.0 - *signals.privacy_spy_score));

  report.raw_score = 100;
  for (const auto& entry : report.breakdown) report.raw_score += entry.points;
  report.score = static_cast<int>(std::clamp<std::int64_t>(report.raw_score, 0, 100));
  report.label = label_for(report.score);
  return report;
}

SummaryCard summarize(const tilt::TiltDocument& doc, const ExternalSignals& signals) {
  SummaryCard card;
  card.controller_name = doc.controller.name;
  card.transfer_count = static_cast<std::int64_t>(doc.third_country_transfers.size());
  card.adm_in_use = doc.automated_decision_making && doc.automated_decision_making->in_use;
  card.tracker_count = signals.tracker_count;
  card.missing_disclosures = static_cast<std::int64_t>(tilt::check_completeness(doc).missing_count());
  return card;
}

ExternalSignals signals_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SignalsError("signals must be a JSON object");
  ExternalSignals s;
  for (const auto& [key, value] : j.items()) {
    if (key == "trackerCount") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        throw SignalsError("trackerCount must be a non-negative integer", key);
      }
      s.tracker_count = value.get<std::int64_t>();
    } else if (key == "phishingFlagged") {
      if (!value.is_boolean()) throw SignalsError("phishingFlagged must be a boolean", key);
      s.phishing_flagged = value.get<bool>();
    } else if (key == "tosdrGrade") {
      if (value.is_null()) continue;
      const auto grade = value.is_string() ? value.get<std::string>() : std::string();
      if (grade.size() != 1 || grade[0] < 'A' || grade[0] > 'E') {
        throw SignalsError("tosdrGrade must be one of A, B, C, D, E", key);
      }
      s.tosdr_grade = grade[0];
    } else if (key == "privacySpyScore") {
      if (value.is_null()) continue;
      if (!value.is_number() || !(value.get<double>() >= 0.0 && value.get<double>() <= 10.0)) {
        throw SignalsError("privacySpyScore must be a number in [0, 10]", key);
      }
      s.privacy_spy_score = value.get<double>();
    } else {
      throw SignalsError("unknown signals field", key);
    }
  }
  return s;
}

nlohmann::json to_json(const ExternalSignals& s) {
  nlohmann::json j{{"trackerCount", s.tracker_count}, {"phishingFlagged", s.phishing_flagged}};
  if (s.tosdr_grade) j["tosdrGrade"] = std::string(1, *s.tosdr_grade);
  if (s.privacy_spy_score) j["privacySpyScore"] = *s.privacy_spy_score;
  return j;
}

nlohmann::json to_json(const ScoreReport& report) {
  nlohmann::json breakdown = nlohmann::json::array();
  for (const auto& e : report.breakdown) breakdown.push_back({{"code", e.code}, {"points", e.points}});
  return {{"score", report.score},
          {"label", to_string(report.label)},
          {"breakdown", breakdown},
          {"rawScore", report.raw_score}};
}

nlohmann::json to_json(const SummaryCard& card) {
  return {{"controllerName", card.controller_name},
          {"transferCount", card.transfer_count},
          {"admInUse", card.adm_in_use},
          {"trackerCount", card.tracker_count},
          {"missingDisclosures", card.missing_disclosures}};
}

SignalsTable SignalsTable::parse(std::string_view text) {
  const auto j = util::parse_json(text);
  if (!j.is_object()) throw SignalsError("signals file must map domains to signal records");
  SignalsTable table;
  for (const auto& [domain, value] : j.items()) {
    try {
      table.entries_.emplace(util::to_lower_ascii(domain), signals_from_json(value));
    } catch (const SignalsError& e) {
      throw SignalsError(e.what(), domain + (e.path().empty() ? "" : "/" + e.path()));
    }
  }
  return table;
}

SignalsTable SignalsTable::load(const std::string& path) { return parse(util::read_file(path)); }

std::optional<ExternalSignals> SignalsTable::lookup(std::string_view domain) const {
  const auto wanted = util::to_lower_ascii(domain);
  if (wanted.empty()) return std::nullopt;
  if (auto it = entries_.find(wanted); it != entries_.end()) return it->second;
  const ExternalSignals* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& [key, value] : entries_) {
    if (key.size() < wanted.size() && wanted.ends_with(key) && wanted[wanted.size() - key.size() - 1] == '.' &&
        key.size() > best_len) {
      best = &value;
      best_len = key.size();
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::string host_of_url(std::string_view url) {
  auto rest = url;
  if (auto scheme = rest.find("://"); scheme != std::string_view::npos) rest.remove_prefix(scheme + 3);
  rest = rest.substr(0, rest.find_first_of("/?#"));
  if (auto at = rest.rfind('@'); at != std::string_view::npos) rest.remove_prefix(at + 1);
  if (auto colon = rest.rfind(':'); colon != std::string_view::npos && rest.find(']') == std::string_view::npos) {
    rest = rest.substr(0, colon);
  }
  return util::to_lower_ascii(rest);
}

std::string domain_of(const tilt::TiltDocument& doc) {
  if (doc.sources.empty()) return {};
  return host_of_url(doc.sources.front());
}

}  // namespace tiltkit::score
