#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tiltkit/util/time.hpp"

namespace tiltkit::tilt {

using util::Timestamp;

struct ContactPoint {
  std::string name;
  std::optional<std::string> email;
  std::optional<std::string> phone;

  bool operator==(const ContactPoint&) const = default;
};

struct Meta {
  std::string id;
  std::string name;  // service name
  std::int64_t version = 1;
  Timestamp created{};
  Timestamp modified{};
  std::string language;  // ISO 639-1
  std::string hash;      // SHA-256 of the canonical form, or empty

  bool operator==(const Meta&) const = default;
};

struct Controller {
  std::string name;
  std::string address;
  std::string country;  // ISO 3166-1 alpha-2
  std::optional<ContactPoint> representative;

  bool operator==(const Controller&) const = default;
};

struct Purpose {
  std::string description;
  // "GDPR-<art>-<para>-<lit>" when normative; other text is kept but flagged.
  std::optional<std::string> legal_basis;
  // Required by the checklist when legal_basis is GDPR-6-1-f.
  std::optional<std::string> legitimate_interest;

  bool operator==(const Purpose&) const = default;
};

struct Recipient {
  std::string name;
  std::string category;
  std::string country;

  bool operator==(const Recipient&) const = default;
};

enum class StorageKind { kDuration, kCriterion };

struct Storage {
  StorageKind kind = StorageKind::kCriterion;
  std::string value;  // ISO 8601 duration when kind == kDuration

  bool operator==(const Storage&) const = default;
};

struct DataDisclosed {
  std::string category;
  std::vector<Purpose> purposes;
  std::vector<Recipient> recipients;
  std::optional<Storage> storage;
  // Whether provision of the data is a statutory or contractual requirement.
  std::optional<std::string> requirement_note;

  bool operator==(const DataDisclosed&) const = default;
};

struct ThirdCountryTransfer {
  std::string country;
  bool adequacy_decision = false;
  std::optional<std::string> safeguards;

  bool operator==(const ThirdCountryTransfer&) const = default;
};

struct RightEntry {
  bool available = true;
  std::optional<std::string> description;

  bool operator==(const RightEntry&) const = default;
};

struct RightsInfo {
  std::optional<RightEntry> access;
  std::optional<RightEntry> rectification;
  std::optional<RightEntry> erasure;
  std::optional<RightEntry> restriction;
  std::optional<RightEntry> portability;
  std::optional<RightEntry> objection;
  std::optional<RightEntry> withdraw_consent;
  std::optional<ContactPoint> complaint_authority;

  bool operator==(const RightsInfo&) const = default;
};

// The six data-subject rights (without consent withdrawal), in document order.
inline constexpr std::array<std::string_view, 6> kCoreRights = {
    "access", "rectification", "erasure", "restriction", "portability", "objection"};

// Lookup by JSON key ("access", ..., "withdrawConsent"); nullptr for others.
const std::optional<RightEntry>* find_right(const RightsInfo& rights, std::string_view key);
std::optional<RightEntry>* find_right(RightsInfo& rights, std::string_view key);

struct AdmInfo {
  bool in_use = false;
  std::optional<std::string> logic_description;
  std::optional<std::string> consequences;

  bool operator==(const AdmInfo&) const = default;
};

// Transparency information for one service.
struct TiltDocument {
  Meta meta;
  Controller controller;
  std::optional<ContactPoint> dpo;
  std::vector<DataDisclosed> data_disclosed;
  std::vector<ThirdCountryTransfer> third_country_transfers;
  RightsInfo rights;
  std::optional<AdmInfo> automated_decision_making;
  std::vector<std::string> sources;

  bool operator==(const TiltDocument&) const = default;
};

struct LegalBasis {
  bool normative = false;
  int article = 0;
  int paragraph = 0;
  char letter = 0;
};

LegalBasis classify_legal_basis(std::string_view text);

// True when any purpose cites exactly this normative basis (e.g. "GDPR-6-1-f").
bool cites_legal_basis(const TiltDocument& doc, std::string_view normative_basis);

}  // namespace tiltkit::tilt
