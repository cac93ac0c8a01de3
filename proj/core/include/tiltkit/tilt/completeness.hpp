#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/tilt/document.hpp"

namespace tiltkit::tilt {

enum class ItemStatus { kPresent, kMissing, kNotApplicable };

std::string_view to_string(ItemStatus status);

struct CompletenessItem {
  std::string key;  // "C01".."C14"
  ItemStatus status = ItemStatus::kMissing;
  std::optional<std::string> evidence_path;

  bool operator==(const CompletenessItem&) const = default;
};

struct CompletenessReport {
  std::vector<CompletenessItem> items;  // always 14, ordered C01..C14

  std::size_t missing_count() const;
  std::vector<std::string> keys_with(ItemStatus status) const;

  bool operator==(const CompletenessReport&) const = default;
};

// Evaluates the Art. 13/14 checklist:
//   C01 controller identity and contact   C08 safeguards/adequacy per transfer*
//   C02 EU representative*                C09 storage period per category
//   C03 DPO contact                       C10 six data-subject rights
//   C04 purpose per category              C11 consent withdrawal*
//   C05 legal basis per purpose           C12 complaint authority
//   C06 legitimate interest for 6-1-f*    C13 statutory/contractual note per category
//   C07 recipient per category            C14 ADM section (+ logic when in use)
// Starred items are not applicable unless their trigger is present. C04,
// C05, C07 and C09 are missing when no data category is disclosed; C13 is
// then not applicable.
CompletenessReport check_completeness(const TiltDocument& doc);

// One-line English description of a checklist key.
std::string_view describe_checklist_item(std::string_view key);

nlohmann::json to_json(const CompletenessReport& report);

}  // namespace tiltkit::tilt
