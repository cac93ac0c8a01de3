#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltkit/dsar/descriptor.hpp"

namespace tiltkit::dsar {

struct DownloadedFile {
  std::string bytes;
  std::string filename;  // suggested name, may be empty
};

// What the engine needs from a browser. Implementations raise DriverError
// when an action cannot be carried out.
class SiteDriver {
 public:
  virtual ~SiteDriver() = default;

  // Called before each step touches the driver, so implementations can
  // attribute calls to steps.
  virtual void begin_step(std::size_t /*step_index*/) {}

  virtual void navigate(const std::string& url) = 0;
  virtual bool exists(const std::string& selector) = 0;
  virtual void click(const std::string& selector) = 0;
  virtual void fill(const std::string& selector, const std::string& text) = 0;
  virtual bool download_ready(const std::string& selector) { return exists(selector); }
  virtual DownloadedFile fetch_download(const std::string& selector) = 0;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_seconds() = 0;
  virtual void sleep(double seconds) = 0;
};

// Time advances only through sleep().
class VirtualClock final : public Clock {
 public:
  double now_seconds() override { return now_; }
  void sleep(double seconds) override { now_ += seconds; }

 private:
  double now_ = 0;
};

class SystemClock final : public Clock {
 public:
  double now_seconds() override;
  void sleep(double seconds) override;
};

struct Identity {
  std::string email;
  std::string full_name;
};

enum class SessionStatus { kPending, kRunning, kWaiting, kDone, kFailed };

std::string_view to_string(SessionStatus status);

struct Artifact {
  std::string name;
  std::int64_t byte_length = 0;
  std::string local_path;

  bool operator==(const Artifact&) const = default;
};

struct Failure {
  std::size_t step_index = 0;
  std::string reason;

  bool operator==(const Failure&) const = default;
};

struct DsarSession {
  DsarDescriptor descriptor;
  std::string descriptor_hash;
  std::size_t step_index = 0;
  SessionStatus status = SessionStatus::kPending;
  // Condition checks already spent on the Poll step at step_index while
  // waiting.
  std::int64_t poll_attempts = 0;
  std::vector<Artifact> artifacts;
  std::optional<Failure> failure;

  bool operator==(const DsarSession&) const = default;
};

struct ExecuteOptions {
  Clock* clock = nullptr;  // a fresh VirtualClock when null
  // Return with status waiting instead of sleeping between Poll attempts.
  bool detach_on_poll = false;
  // WaitFor re-checks its condition at this interval.
  double wait_check_interval_seconds = 1.0;
};

// Runs the descriptor from step 0, or from resume->step_index. Steps before
// the resume point never reach the driver. Driver errors and unmet
// conditions end the session with status failed; ResumeMismatchError is
// thrown when `resume` belongs to a different descriptor or is already
// finished. Downloads are written below `artifact_dir` only.
DsarSession execute(const DsarDescriptor& descriptor, SiteDriver& driver, const Identity& identity,
                    const std::filesystem::path& artifact_dir, const std::optional<DsarSession>& resume = {},
                    const ExecuteOptions& options = {});

nlohmann::json to_json(const DsarSession& session);
DsarSession session_from_json(const nlohmann::json& j);

// Throws ValidationError unless the JSON holds non-empty EMAIL and FULL_NAME.
Identity identity_from_json(const nlohmann::json& j);

}  // namespace tiltkit::dsar
