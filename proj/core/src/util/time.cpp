#include "tiltkit/util/time.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

namespace tiltkit::util {

namespace {

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
  static const std::regex kPattern(
      R"(^(\d{4})-(\d{2})-(\d{2})[Tt](\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,3}))?([Zz]|[+-]\d{2}:\d{2})$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, kPattern)) return std::nullopt;
  auto group = [&](int i) { return std::string_view(&*m[i].first, m[i].length()); };

  using namespace std::chrono;
  const year_month_day ymd{year{to_int(group(1))}, month{static_cast<unsigned>(to_int(group(2)))},
                           day{static_cast<unsigned>(to_int(group(3)))}};
  if (!ymd.ok()) return std::nullopt;
  const int hh = to_int(group(4));
  const int mm = to_int(group(5));
  const int ss = to_int(group(6));
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;

  int millis = 0;
  if (m[7].matched) {
    std::string frac(group(7));
    frac.resize(3, '0');
    millis = to_int(frac);
  }
  Timestamp ts = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis};

  const std::string_view zone = group(8);
  if (zone != "Z" && zone != "z") {
    const int oh = to_int(zone.substr(1, 2));
    const int om = to_int(zone.substr(4, 2));
    if (oh > 23 || om > 59) return std::nullopt;
    const minutes offset = hours{oh} + minutes{om};
    ts = zone[0] == '+' ? ts - offset : ts + offset;
  }
  return ts;
}

std::string format_rfc3339(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> tod{ts - day_point};
  char buf[40];
  const auto ms = tod.subseconds().count();
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lld.%03lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()), static_cast<long long>(ms));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  }
  return buf;
}

std::optional<Timestamp> from_epoch_seconds(double seconds) {
  if (!std::isfinite(seconds)) return std::nullopt;
  // Reject values outside years 0001..9999.
  if (seconds < -62135596800.0 || seconds > 253402300799.0) return std::nullopt;
  return Timestamp{std::chrono::milliseconds{static_cast<long long>(std::llround(seconds * 1000.0))}};
}

std::string year_month(Timestamp ts) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(ts)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()));
  return buf;
}

Timestamp now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

bool is_iso8601_duration(std::string_view text) {
  static const std::regex kWeeks(R"(^P\d+W$)");
  static const std::regex kFull(
      R"(^P(?:\d+Y)?(?:\d+M)?(?:\d+D)?(?:T(?:\d+H)?(?:\d+M)?(?:\d+(?:[.,]\d+)?S)?)?$)");
  const std::string s(text);
  if (std::regex_match(s, kWeeks)) return true;
  if (!std::regex_match(s, kFull)) return false;
  // At least one component, and a 'T' must be followed by one.
  if (s == "P" || s.back() == 'T') return false;
  return true;
}

}  // namespace tiltkit::util
