#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tiltkit::util {

// ISO 3166-1 alpha-2, uppercase.
bool is_alpha2_country(std::string_view code);

// Membership in the EU/EEA according to the shipped eu_eea.json table.
bool is_eu_eea(std::string_view code);
std::string eu_eea_table_version();

// Countries mentioned in free text, by English/German name or, failing
// that, by a standalone uppercase alpha-2 token. Codes are returned in order
// of first mention without duplicates.
std::vector<std::string> find_countries(std::string_view text);

}  // namespace tiltkit::util
