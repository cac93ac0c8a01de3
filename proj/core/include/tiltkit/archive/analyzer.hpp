#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/util/time.hpp"

namespace tiltkit::archive {

enum class RecordKind { kMessages, kPosts, kActivity, kProfile, kOther };

inline constexpr std::array<RecordKind, 5> kAllKinds = {RecordKind::kMessages, RecordKind::kPosts,
                                                       RecordKind::kActivity, RecordKind::kProfile,
                                                       RecordKind::kOther};

std::string_view to_string(RecordKind kind);
std::optional<RecordKind> kind_from_string(std::string_view text);

struct ManifestFile {
  std::string relative_path;  // '/'-separated
  RecordKind kind = RecordKind::kOther;
  std::int64_t record_count = 0;
  std::int64_t bytes = 0;

  bool operator==(const ManifestFile&) const = default;
};

struct ArchiveManifest {
  std::string service;
  std::filesystem::path root;
  std::vector<ManifestFile> files;  // ordered by relative path
  // One line per unreadable file, naming only the path and format.
  std::vector<std::string> warnings;

  bool operator==(const ArchiveManifest&) const = default;
};

struct ArchiveProfile {
  std::string service;
  std::map<std::string, std::int64_t> counts_by_kind;  // every kind, zero included
  std::optional<util::Timestamp> earliest;
  std::optional<util::Timestamp> latest;
  std::map<std::string, std::int64_t> monthly_histogram;  // "YYYY-MM"
  std::int64_t total_bytes = 0;

  bool operator==(const ArchiveProfile&) const = default;
};

struct ScoreboardEntry {
  std::string service;
  int risk_factor = 0;

  bool operator==(const ScoreboardEntry&) const = default;
};

// Kind from the keyword table, matched against the lowercased relative path.
RecordKind classify(std::string_view relative_path);

// Walks an unpacked export directory. .json files count as their array
// length (or 1 for a single object), .jsonl/.ndjson per line, .csv per row
// after the header; other files count 0. Unparseable structured files
// become kind other with 0 records and a warning. Throws IoError or
// EmptyArchiveError. The service defaults to the directory name.
ArchiveManifest ingest(const std::filesystem::path& root, std::optional<std::string> service = {},
                       unsigned threads = 1);

// Re-reads every file and aggregates counts and record timestamps taken from
// created_utc, timestamp, taken_at or date (epoch seconds or RFC 3339).
// Throws IoError, also when a file no longer yields its manifest count.
ArchiveProfile profile(const ArchiveManifest& manifest, unsigned threads = 1);

// clamp(round(sum over kinds of weight * log2(1 + count)), 0, 100) with
// weights messages 6, posts 5, activity 4, profile 3, other 2.
int risk_factor(const std::map<std::string, std::int64_t>& counts_by_kind);
int risk_factor(const ArchiveProfile& profile);

ScoreboardEntry scoreboard_entry(const ArchiveProfile& profile);

nlohmann::json to_json(const ArchiveManifest& manifest);
nlohmann::json to_json(const ArchiveProfile& profile);
nlohmann::json to_json(const ScoreboardEntry& entry);

// Timestamp of one record, or nullopt. Exposed for tests.
std::optional<util::Timestamp> record_timestamp(const nlohmann::json& record);

// RFC 4180 rows; throws ValidationError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace tiltkit::archive
