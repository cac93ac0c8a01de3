#include "tiltkit/dsar/registry.hpp"

#include <algorithm>

#include "tiltkit/error.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::dsar {

namespace {

bool valid_domain(const std::string& domain) {
  if (domain.empty() || domain.front() == '.' || domain.back() == '.') return false;
  return std::all_of(domain.begin(), domain.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '-';
  });
}

}  // namespace

std::vector<RegistryRecord> parse_registry(std::string_view text) {
  const auto j = util::parse_json(text);
  if (!j.is_array()) throw RegistryError("registry must be a JSON array");
  std::vector<RegistryRecord> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const auto base = std::to_string(i);
    if (!e.is_object()) throw RegistryError("registry entry must be an object", base);
    auto text_field = [&](const char* key, bool required) {
      if (!e.contains(key)) {
        if (required) throw RegistryError(std::string("missing '") + key + "'", base + "/" + key);
        return std::string();
      }
      if (!e[key].is_string()) throw RegistryError(std::string("'") + key + "' must be a string", base + "/" + key);
      return e[key].get<std::string>();
    };
    for (const auto& item : e.items()) {
      static const std::vector<std::string> kKnown = {"service", "domain", "url", "difficulty", "notes", "hasDirectLink"};
      if (std::find(kKnown.begin(), kKnown.end(), item.key()) == kKnown.end()) {
        throw RegistryError("unknown field", base + "/" + item.key());
      }
    }
    RegistryRecord r;
    r.service = text_field("service", true);
    r.domain = text_field("domain", true);
    r.request_url = text_field("url", true);
    r.difficulty = text_field("difficulty", true);
    r.notes = text_field("notes", false);
    if (r.service.empty()) throw RegistryError("service must not be empty", base + "/service");
    if (!valid_domain(r.domain)) {
      throw RegistryError("domain must be a lowercase host name without scheme", base + "/domain");
    }
    if (r.difficulty != "direct-link" && r.difficulty != "guided" && r.difficulty != "automated") {
      throw RegistryError("difficulty must be direct-link, guided or automated", base + "/difficulty");
    }
    if (e.contains("hasDirectLink")) {
      if (!e["hasDirectLink"].is_boolean()) throw RegistryError("'hasDirectLink' must be a boolean", base + "/hasDirectLink");
      r.has_direct_link = e["hasDirectLink"].get<bool>();
    } else {
      r.has_direct_link = r.difficulty == "direct-link";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RegistryRecord> load_registry(const std::string& path) { return parse_registry(util::read_file(path)); }

std::optional<RegistryRecord> registry_lookup(const std::vector<RegistryRecord>& registry, std::string_view domain) {
  const auto wanted = util::to_lower_ascii(util::trim(domain));
  if (wanted.empty()) return std::nullopt;
  const RegistryRecord* best = nullptr;
  for (const auto& r : registry) {
    if (r.domain == wanted) return r;
    const bool suffix = r.domain.size() < wanted.size() && wanted.ends_with(r.domain) &&
                        wanted[wanted.size() - r.domain.size() - 1] == '.';
    if (suffix && (!best || r.domain.size() > best->domain.size())) best = &r;
  }
  if (!best) return std::nullopt;
  return *best;
}

nlohmann::json to_json(const RegistryRecord& r) {
  return {{"service", r.service},     {"domain", r.domain},         {"url", r.request_url},
          {"difficulty", r.difficulty}, {"hasDirectLink", r.has_direct_link}, {"notes", r.notes}};
}

}  // namespace tiltkit::dsar
