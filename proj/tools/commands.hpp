#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tiltkit::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // validation error or failed check
inline constexpr int kIoError = 2;
inline constexpr int kExecutionError = 3;
inline constexpr int kUsage = 64;

struct Output {
  bool json = false;
};

int tilt_validate(const std::string& file, Output out);
int tilt_completeness(const std::string& file, Output out);
int tilt_diff(const std::string& old_file, const std::string& new_file, Output out);
int tilt_hash(const std::string& file, Output out);
int tilt_canonicalize(const std::string& file);

struct ServeOptions {
  std::string host;
  int port = 0;
  std::string data_dir;
  std::optional<std::string> signals;
  std::optional<std::string> ui_dir;
};

int hub_serve(const ServeOptions& options);
int hub_put(const std::string& data_dir, const std::string& file, Output out);
int hub_get(const std::string& data_dir, const std::string& id, std::optional<long long> version);
int hub_query(const std::string& data_dir, const std::string& filter, Output out);
int hub_ask(const std::string& data_dir, const std::string& id, const std::string& intent,
            std::optional<std::string> category, Output out);

int score(const std::string& file, std::optional<std::string> signals, std::optional<std::string> domain, Output out);

struct DsarRunOptions {
  std::string descriptor;
  std::string driver;
  std::string identity;
  std::string out_dir;
  std::optional<std::string> resume;
  bool detach = false;
};

int dsar_validate(const std::string& file, Output out);
int dsar_run(const DsarRunOptions& options, Output out);
int dsar_lookup(const std::string& domain, const std::string& registry, Output out);

int archive_analyze(const std::string& dir, std::optional<std::string> service, unsigned threads, Output out);
int archive_risk(const std::string& dir, std::optional<std::string> service, unsigned threads, Output out);
int archive_scoreboard(const std::string& dir, std::optional<std::string> service, unsigned threads);

// Runs a command body, reporting library errors on stderr with their name
// and mapping them to exit codes.
int guarded(const std::function<int()>& body);

}  // namespace tiltkit::cli
