#include "tiltkit/archive/analyzer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "tiltkit/error.hpp"
#include "tiltkit/util/embedded_data.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::archive {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct KindTable {
  std::vector<std::pair<RecordKind, std::vector<std::string>>> rules;
  std::map<RecordKind, double> weights;
  std::vector<std::string> timestamp_fields;
};

const KindTable& kind_table() {
  static const KindTable table = [] {
    const auto data = util::embedded_data("archive_kinds.json");
    if (!data) throw IoError("archive keyword table is missing");
    const auto j = json::parse(*data);
    KindTable t;
    for (const auto& rule : j.at("rules")) {
      t.rules.emplace_back(*kind_from_string(rule.at("kind").get<std::string>()),
                           rule.at("keywords").get<std::vector<std::string>>());
    }
    for (const auto& [name, weight] : j.at("weights").items()) t.weights[*kind_from_string(name)] = weight.get<double>();
    t.timestamp_fields = j.at("timestampFields").get<std::vector<std::string>>();
    return t;
  }();
  return table;
}

enum class Format { kJson, kJsonLines, kCsv, kUnstructured };

Format format_of(const fs::path& path) {
  const auto ext = util::to_lower_ascii(path.extension().string());
  if (ext == ".json") return Format::kJson;
  if (ext == ".jsonl" || ext == ".ndjson") return Format::kJsonLines;
  if (ext == ".csv") return Format::kCsv;
  return Format::kUnstructured;
}

std::string_view format_name(Format f) {
  switch (f) {
    case Format::kJson:
      return "JSON";
    case Format::kJsonLines:
      return "JSON Lines";
    case Format::kCsv:
      return "CSV";
    case Format::kUnstructured:
      break;
  }
  return "unstructured";
}

struct FileRecords {
  std::int64_t count = 0;
  std::vector<util::Timestamp> timestamps;
};

// nullopt when the file does not parse in its format.
std::optional<FileRecords> read_records(const fs::path& path, Format format, bool with_timestamps) {
  FileRecords out;
  if (format == Format::kUnstructured) return out;
  const auto text = util::read_file(path);
  auto visit = [&](const json& record) {
    ++out.count;
    if (!with_timestamps) return;
    if (auto ts = record_timestamp(record)) out.timestamps.push_back(*ts);
  };
  try {
    switch (format) {
      case Format::kJson: {
        const auto j = json::parse(text);
        if (j.is_array()) {
          for (const auto& r : j) visit(r);
        } else {
          visit(j);
        }
        break;
      }
      case Format::kJsonLines: {
        std::size_t start = 0;
        while (start <= text.size()) {
          auto end = text.find('\n', start);
          if (end == std::string::npos) end = text.size();
          const auto line = util::trim(std::string_view(text).substr(start, end - start));
          if (!line.empty()) visit(json::parse(line));
          start = end + 1;
        }
        break;
      }
      case Format::kCsv: {
        const auto rows = parse_csv(text);
        if (rows.empty()) break;
        const auto& header = rows.front();
        for (std::size_t r = 1; r < rows.size(); ++r) {
          json record = json::object();
          for (std::size_t c = 0; c < header.size() && c < rows[r].size(); ++c) record[header[c]] = rows[r][c];
          visit(record);
        }
        break;
      }
      case Format::kUnstructured:
        break;
    }
  } catch (const json::exception&) {
    return std::nullopt;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (auto i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard guard(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::optional<util::Timestamp> parse_time_text(std::string text) {
  text = util::trim(text);
  if (text.empty()) return std::nullopt;
  if (auto ts = util::parse_rfc3339(text)) return ts;
  if (text.size() == 10) {
    if (auto ts = util::parse_rfc3339(text + "T00:00:00Z")) return ts;
  }
  if (text.ends_with(" UTC") && text.size() == 23 && text[10] == ' ') {
    return util::parse_rfc3339(text.substr(0, 10) + "T" + text.substr(11, 8) + "Z");
  }
  char* end = nullptr;
  const double seconds = std::strtod(text.c_str(), &end);
  if (end != text.c_str() && *end == '\0' && std::isfinite(seconds)) return util::from_epoch_seconds(seconds);
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::kMessages:
      return "messages";
    case RecordKind::kPosts:
      return "posts";
    case RecordKind::kActivity:
      return "activity";
    case RecordKind::kProfile:
      return "profile";
    case RecordKind::kOther:
      return "other";
  }
  return "other";
}

std::optional<RecordKind> kind_from_string(std::string_view text) {
  for (auto k : kAllKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

RecordKind classify(std::string_view relative_path) {
  const auto lowered = util::to_lower_ascii(relative_path);
  for (const auto& [kind, keywords] : kind_table().rules) {
    for (const auto& keyword : keywords) {
      if (lowered.find(keyword) != std::string::npos) return kind;
    }
  }
  return RecordKind::kOther;
}

std::optional<util::Timestamp> record_timestamp(const json& record) {
  if (!record.is_object()) return std::nullopt;
  for (const auto& field : kind_table().timestamp_fields) {
    auto it = record.find(field);
    if (it == record.end()) continue;
    std::optional<util::Timestamp> ts;
    if (it->is_number()) {
      ts = util::from_epoch_seconds(it->get<double>());
    } else if (it->is_string()) {
      ts = parse_time_text(it->get<std::string>());
    }
    if (ts) return ts;
  }
  return std::nullopt;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_started = false;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    row_started = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (row_started || !row.empty()) end_row();
  return rows;
}

ArchiveManifest ingest(const fs::path& root, std::optional<std::string> service, unsigned threads) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a readable directory", root.string());

  std::vector<fs::path> paths;
  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
  if (ec) throw IoError("cannot read directory: " + ec.message(), root.string());
  for (const auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
    if (ec) throw IoError("cannot read directory: " + ec.message(), root.string());
    if (it->is_regular_file(ec) && !it->is_symlink(ec)) paths.push_back(it->path());
  }
  if (paths.empty()) throw EmptyArchiveError("archive contains no files", root.string());

  ArchiveManifest manifest;
  manifest.root = root;
  manifest.service = service && !service->empty() ? *service : fs::absolute(root).lexically_normal().filename().string();
  if (manifest.service.empty()) manifest.service = fs::absolute(root).lexically_normal().parent_path().filename().string();

  std::vector<ManifestFile> files(paths.size());
  std::vector<std::optional<std::string>> warnings(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    auto& f = files[i];
    f.relative_path = paths[i].lexically_relative(root).generic_string();
    f.bytes = static_cast<std::int64_t>(fs::file_size(paths[i]));
    const auto format = format_of(paths[i]);
    const auto records = read_records(paths[i], format, false);
    if (!records) {
      f.kind = RecordKind::kOther;
      warnings[i] = f.relative_path + ": not a valid " + std::string(format_name(format)) + " file, counted as 0 records";
      return;
    }
    f.kind = classify(f.relative_path);
    f.record_count = records->count;
  });

  std::vector<std::size_t> order(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return files[a].relative_path < files[b].relative_path; });
  for (auto i : order) {
    manifest.files.push_back(files[i]);
    if (warnings[i]) manifest.warnings.push_back(*warnings[i]);
  }
  return manifest;
}

ArchiveProfile profile(const ArchiveManifest& manifest, unsigned threads) {
  std::vector<FileRecords> per_file(manifest.files.size());
  parallel_for(manifest.files.size(), threads, [&](std::size_t i) {
    const auto& f = manifest.files[i];
    const auto path = manifest.root / fs::path(f.relative_path);
    auto records = read_records(path, format_of(path), true);
    // Files the manifest recorded as unparseable stay at zero.
    if (!records) records = FileRecords{};
    if (records->count != f.record_count) {
      throw IoError("file changed since ingest: record count differs", f.relative_path);
    }
    per_file[i] = std::move(*records);
  });

  ArchiveProfile p;
  p.service = manifest.service;
  for (auto k : kAllKinds) p.counts_by_kind[std::string(to_string(k))] = 0;
  for (std::size_t i = 0; i < manifest.files.size(); ++i) {
    const auto& f = manifest.files[i];
    p.counts_by_kind[std::string(to_string(f.kind))] += per_file[i].count;
    p.total_bytes += f.bytes;
    for (const auto ts : per_file[i].timestamps) {
      if (!p.earliest || ts < *p.earliest) p.earliest = ts;
      if (!p.latest || ts > *p.latest) p.latest = ts;
      ++p.monthly_histogram[util::year_month(ts)];
    }
  }
  return p;
}

int risk_factor(const std::map<std::string, std::int64_t>& counts_by_kind) {
  double sum = 0;
  for (auto k : kAllKinds) {
    auto it = counts_by_kind.find(std::string(to_string(k)));
    if (it == counts_by_kind.end() || it->second <= 0) continue;
    sum += kind_table().weights.at(k) * std::log2(1.0 + static_cast<double>(it->second));
  }
  return static_cast<int>(std::clamp<long>(std::lround(sum), 0, 100));
}

int risk_factor(const ArchiveProfile& profile) { return risk_factor(profile.counts_by_kind); }

ScoreboardEntry scoreboard_entry(const ArchiveProfile& profile) {
  return ScoreboardEntry{profile.service, risk_factor(profile)};
}

json to_json(const ArchiveManifest& m) {
  json files = json::array();
  for (const auto& f : m.files) {
    files.push_back({{"relativePath", f.relative_path},
                     {"kind", to_string(f.kind)},
                     {"recordCount", f.record_count},
                     {"bytes", f.bytes}});
  }
  return {{"service", m.service}, {"root", m.root.string()}, {"files", files}, {"warnings", m.warnings}};
}

json to_json(const ArchiveProfile& p) {
  json j{{"service", p.service},
         {"countsByKind", p.counts_by_kind},
         {"monthlyHistogram", p.monthly_histogram},
         {"totalBytes", p.total_bytes}};
  j["earliest"] = p.earliest ? json(util::format_rfc3339(*p.earliest)) : json(nullptr);
  j["latest"] = p.latest ? json(util::format_rfc3339(*p.latest)) : json(nullptr);
  return j;
}

json to_json(const ScoreboardEntry& e) { return {{"service", e.service}, {"riskFactor", e.risk_factor}}; }

}  // namespace tiltkit::archive
