#include "tiltkit/tilt/document.hpp"

#include <regex>

namespace tiltkit::tilt {

namespace {

template <typename Rights>
auto* right_slot(Rights& rights, std::string_view key) {
  if (key == "access") return &rights.access;
  if (key == "rectification") return &rights.rectification;
  if (key == "erasure") return &rights.erasure;
  if (key == "restriction") return &rights.restriction;
  if (key == "portability") return &rights.portability;
  if (key == "objection") return &rights.objection;
  if (key == "withdrawConsent") return &rights.withdraw_consent;
  return static_cast<decltype(&rights.access)>(nullptr);
}

}  // namespace

const std::optional<RightEntry>* find_right(const RightsInfo& rights, std::string_view key) {
  return right_slot(rights, key);
}

std::optional<RightEntry>* find_right(RightsInfo& rights, std::string_view key) {
  return right_slot(rights, key);
}

LegalBasis classify_legal_basis(std::string_view text) {
  static const std::regex kPattern(R"(^GDPR-([1-9]\d{0,2})-([1-9]\d?)-([a-z])$)");
  std::smatch m;
  const std::string s(text);
  if (!std::regex_match(s, m, kPattern)) return {};
  return LegalBasis{true, std::stoi(m[1]), std::stoi(m[2]), m[3].str()[0]};
}

bool cites_legal_basis(const TiltDocument& doc, std::string_view normative_basis) {
  for (const auto& category : doc.data_disclosed) {
    for (const auto& purpose : category.purposes) {
      if (purpose.legal_basis && *purpose.legal_basis == normative_basis) return true;
    }
  }
  return false;
}

}  // namespace tiltkit::tilt
