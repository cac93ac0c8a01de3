#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tiltkit::dsar {

struct RegistryRecord {
  std::string service;
  std::string domain;  // lowercase, no scheme
  std::string request_url;
  bool has_direct_link = false;
  std::string difficulty;  // direct-link | guided | automated
  std::string notes;

  bool operator==(const RegistryRecord&) const = default;
};

// Registry file: a JSON array of {service, domain, url, difficulty, notes,
// hasDirectLink?}. hasDirectLink defaults to difficulty == "direct-link".
// Throws RegistryError (path "<index>/<field>") or SyntaxError.
std::vector<RegistryRecord> parse_registry(std::string_view text);
std::vector<RegistryRecord> load_registry(const std::string& path);

// Exact domain first, then the longest registered domain that `domain` ends
// with at a label boundary.
std::optional<RegistryRecord> registry_lookup(const std::vector<RegistryRecord>& registry, std::string_view domain);

nlohmann::json to_json(const RegistryRecord& record);

}  // namespace tiltkit::dsar
