#pragma once

#include <string>
#include <string_view>

namespace tiltkit::util {

// Lowercase hex SHA-256 digest (64 characters).
std::string sha256_hex(std::string_view data);

}  // namespace tiltkit::util
