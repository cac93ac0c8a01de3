#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/tilt/document.hpp"

namespace tiltkit::score {

struct ExternalSignals {
  std::int64_t tracker_count = 0;
  bool phishing_flagged = false;
  std::optional<char> tosdr_grade;         // 'A'..'E'
  std::optional<double> privacy_spy_score;  // [0, 10]

  bool operator==(const ExternalSignals&) const = default;
};

enum class Label { kGreen, kYellow, kRed };

std::string_view to_string(Label label);

struct BreakdownEntry {
  std::string code;
  std::int64_t points = 0;

  bool operator==(const BreakdownEntry&) const = default;
};

struct ScoreReport {
  int score = 100;
  Label label = Label::kGreen;
  std::vector<BreakdownEntry> breakdown;
  std::int64_t raw_score = 100;

  bool operator==(const ScoreReport&) const = default;
};

struct SummaryCard {
  std::string controller_name;
  std::int64_t transfer_count = 0;
  bool adm_in_use = false;
  std::int64_t tracker_count = 0;
  std::int64_t missing_disclosures = 0;

  bool operator==(const SummaryCard&) const = default;
};

// Penalty and bonus table:
//   TRACKERS  -min(40, 4 * trackerCount)
//   PHISH     -50 when flagged
//   TRANSFER  -10 per transfer with neither adequacy decision nor safeguards, at most -20
//   ADM_OPAQUE -10 when ADM is in use without a logic description
//   MISSING   -2 per missing checklist item, at most -20
//   TOSDR     A +5, B 0, C -3, D -6, E -10
//   PSPY      -round(10 - privacySpyScore)
// MISSING leaves out C08 while TRANSFER fires and C14 while ADM_OPAQUE fires,
// so one gap is not charged twice. Rules worth zero points are omitted.
ScoreReport compute_score(const tilt::TiltDocument& doc, const ExternalSignals& signals);

Label label_for(int score);

SummaryCard summarize(const tilt::TiltDocument& doc, const ExternalSignals& signals);

// Throws SignalsError for out-of-range or unknown fields.
ExternalSignals signals_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExternalSignals& signals);
nlohmann::json to_json(const ScoreReport& report);
nlohmann::json to_json(const SummaryCard& card);

// A signals file maps domains to ExternalSignals records.
class SignalsTable {
 public:
  SignalsTable() = default;
  // Throws SignalsError (with the offending domain as path) or SyntaxError.
  static SignalsTable parse(std::string_view text);
  static SignalsTable load(const std::string& path);

  // Exact domain first, then the longest entry that `domain` ends with at a
  // label boundary ("www.example.com" finds "example.com").
  std::optional<ExternalSignals> lookup(std::string_view domain) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, ExternalSignals, std::less<>> entries_;
};

// Host of the first source URL, lowercased; empty when there is none.
std::string domain_of(const tilt::TiltDocument& doc);
std::string host_of_url(std::string_view url);

}  // namespace tiltkit::score
