#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tiltkit::dsar {

inline constexpr std::string_view kFormatVersion = "dara/1";

struct ValueRef {
  enum class Kind { kEmail, kFullName, kLiteral };
  Kind kind = Kind::kEmail;
  std::string literal;  // only for kLiteral

  bool operator==(const ValueRef&) const = default;
};

enum class Condition { kSelectorPresent, kDownloadReady };

struct Navigate {
  std::string url;
  bool operator==(const Navigate&) const = default;
};

struct Click {
  std::string selector;
  bool operator==(const Click&) const = default;
};

struct Fill {
  std::string selector;
  ValueRef value;
  bool operator==(const Fill&) const = default;
};

struct WaitFor {
  Condition condition = Condition::kSelectorPresent;
  std::optional<std::string> selector;
  double timeout_seconds = 0;
  bool operator==(const WaitFor&) const = default;
};

struct Poll {
  Condition condition = Condition::kDownloadReady;
  std::optional<std::string> selector;
  double interval_seconds = 0;
  std::int64_t max_attempts = 1;
  bool operator==(const Poll&) const = default;
};

struct Download {
  std::string selector;
  bool operator==(const Download&) const = default;
};

using Step = std::variant<Navigate, Click, Fill, WaitFor, Poll, Download>;

std::string_view step_kind(const Step& step);

struct DsarDescriptor {
  std::string format_version{kFormatVersion};
  std::string service;
  std::string domain;
  std::vector<Step> steps;

  bool operator==(const DsarDescriptor&) const = default;
};

// Parses and validates a descriptor file. Throws SyntaxError for malformed
// JSON and DescriptorError for rule violations.
DsarDescriptor validate_descriptor(std::string_view text);

DsarDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DsarDescriptor& descriptor);

// Rules: formatVersion "dara/1"; service and domain non-empty; at least one
// step; the first step navigates; selectors non-empty; timeouts and poll
// intervals positive; maxAttempts >= 1; selector-present conditions name a
// selector; download-ready conditions without a selector need a later
// Download step.
void check_descriptor(const DsarDescriptor& descriptor);

// Selector a condition refers to: its own, or for download-ready the
// selector of the next Download step.
std::string condition_selector(const DsarDescriptor& descriptor, std::size_t step_index);

// SHA-256 of the serialized descriptor, used to match sessions on resume.
std::string descriptor_hash(const DsarDescriptor& descriptor);

}  // namespace tiltkit::dsar
