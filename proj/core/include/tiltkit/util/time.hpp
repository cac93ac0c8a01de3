#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tiltkit::util {

// UTC instant with millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts RFC 3339 date-times ("2024-01-31T12:00:00Z", offsets such as
// "+01:00", up to three fractional digits). Returns nullopt on anything else.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ", with ".mmm" only when the milliseconds are non-zero.
std::string format_rfc3339(Timestamp ts);

// Epoch seconds, possibly fractional.
std::optional<Timestamp> from_epoch_seconds(double seconds);

// "YYYY-MM"
std::string year_month(Timestamp ts);

Timestamp now();

// ISO 8601 duration such as "P3Y", "P1Y2M10DT2H30M", "PT36H" or "P2W".
bool is_iso8601_duration(std::string_view text);

}  // namespace tiltkit::util
