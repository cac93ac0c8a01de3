#pragma once

#include <optional>
#include <string_view>

namespace tiltkit::util {

// Contents of a data table compiled in from core/data/, looked up by file
// name (e.g. "eu_eea.json").
std::optional<std::string_view> embedded_data(std::string_view name);

}  // namespace tiltkit::util
