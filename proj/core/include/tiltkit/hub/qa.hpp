#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltkit/tilt/document.hpp"

namespace tiltkit::hub {

enum class IntentKind {
  kControllerIdentity,
  kThirdCountryTransfers,
  kPurposesForCategory,
  kRetentionForCategory,
  kAdmInUse,
  kRightsSummary,
};

struct Intent {
  IntentKind kind = IntentKind::kControllerIdentity;
  std::map<std::string, std::string> params;

  bool operator==(const Intent&) const = default;
};

// How an interpolated value was derived from the document:
//   value   the string at paths[0]
//   count   the length of the array at paths[0] when it is an array,
//           otherwise the number of listed paths (each holding true)
//   list    the strings at `paths`, joined with ", "
//   labels  the localized label of each rights key named by `paths`
//           ("rights/<key>/available"), joined with ", "
struct Interpolation {
  std::string slot;
  std::string value;
  std::string source;
  std::vector<std::string> paths;

  bool operator==(const Interpolation&) const = default;
};

struct Answer {
  IntentKind intent = IntentKind::kControllerIdentity;
  std::string language;
  std::string template_key;
  std::string answer_text;
  std::vector<std::string> evidence_paths;  // sorted, unique
  std::vector<Interpolation> interpolations;

  bool operator==(const Answer&) const = default;
};

std::string_view intent_name(IntentKind kind);

// Throws BadIntentError for unknown kinds or missing parameters.
Intent intent_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Intent& intent);
nlohmann::json to_json(const Answer& answer);

// Deterministic template answer in the document's language (en fallback).
// Throws BadIntentError or UnknownCategoryError.
Answer answer_question(const tilt::TiltDocument& doc, const Intent& intent);

// Raw template text, for checking answers independently.
const std::string& qa_template(std::string_view language, std::string_view key);
const std::string& qa_label(std::string_view language, std::string_view right_key);
std::string answer_language(const tilt::TiltDocument& doc);

}  // namespace tiltkit::hub
