#include "tiltkit/dsar/engine.hpp"

#include <chrono>
#include <thread>

#include "tiltkit/error.hpp"
#include "tiltkit/util/fs.hpp"

namespace tiltkit::dsar {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kConditionNotMet = "condition not met";

struct StepFailed {
  std::string reason;
};

std::string safe_artifact_name(const std::string& suggested, std::size_t step_index) {
  auto name = fs::path(suggested).filename().string();
  if (name.empty() || name == "." || name == ".." || name.starts_with(".tmp-")) {
    name = "download-step-" + std::to_string(step_index) + ".bin";
  }
  return name;
}

bool check(SiteDriver& driver, Condition condition, const std::string& selector) {
  return condition == Condition::kSelectorPresent ? driver.exists(selector) : driver.download_ready(selector);
}

class Runner {
 public:
  Runner(DsarSession& session, SiteDriver& driver, const Identity& identity, const fs::path& dir, Clock& clock,
         const ExecuteOptions& options)
      : s_(session), driver_(driver), identity_(identity), dir_(dir), clock_(clock), options_(options) {}

  // Returns false when the session detached or stopped.
  bool run_step(std::size_t i) {
    const auto& step = s_.descriptor.steps[i];
    driver_.begin_step(i);
    if (const auto* nav = std::get_if<Navigate>(&step)) {
      driver_.navigate(nav->url);
    } else if (const auto* click = std::get_if<Click>(&step)) {
      driver_.click(click->selector);
    } else if (const auto* fill = std::get_if<Fill>(&step)) {
      driver_.fill(fill->selector, resolve(fill->value));
    } else if (const auto* wait = std::get_if<WaitFor>(&step)) {
      const auto selector = condition_selector(s_.descriptor, i);
      const double deadline = clock_.now_seconds() + wait->timeout_seconds;
      while (!check(driver_, wait->condition, selector)) {
        const double remaining = deadline - clock_.now_seconds();
        if (remaining <= 0) throw StepFailed{std::string(kConditionNotMet)};
        clock_.sleep(std::min(options_.wait_check_interval_seconds, remaining));
      }
    } else if (const auto* poll = std::get_if<Poll>(&step)) {
      const auto selector = condition_selector(s_.descriptor, i);
      while (true) {
        ++s_.poll_attempts;
        if (check(driver_, poll->condition, selector)) break;
        if (s_.poll_attempts >= poll->max_attempts) throw StepFailed{std::string(kConditionNotMet)};
        if (options_.detach_on_poll) {
          s_.status = SessionStatus::kWaiting;
          return false;
        }
        clock_.sleep(poll->interval_seconds);
      }
      s_.poll_attempts = 0;
    } else if (const auto* download = std::get_if<Download>(&step)) {
      auto file = driver_.fetch_download(download->selector);
      const auto name = safe_artifact_name(file.filename, i);
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create artifact directory: " + ec.message(), dir_.string());
      const auto path = dir_ / name;
      util::write_file_atomic(path, file.bytes);
      s_.artifacts.push_back(Artifact{name, static_cast<std::int64_t>(file.bytes.size()), path.string()});
    }
    return true;
  }

 private:
  std::string resolve(const ValueRef& value) const {
    switch (value.kind) {
      case ValueRef::Kind::kEmail:
        return identity_.email;
      case ValueRef::Kind::kFullName:
        return identity_.full_name;
      case ValueRef::Kind::kLiteral:
        return value.literal;
    }
    return {};
  }

  DsarSession& s_;
  SiteDriver& driver_;
  const Identity& identity_;
  const fs::path& dir_;
  Clock& clock_;
  const ExecuteOptions& options_;
};

SessionStatus status_from_string(const std::string& text) {
  for (auto s : {SessionStatus::kPending, SessionStatus::kRunning, SessionStatus::kWaiting, SessionStatus::kDone,
                 SessionStatus::kFailed}) {
    if (to_string(s) == text) return s;
  }
  throw ValidationError("unknown session status '" + text + "'", "status");
}

}  // namespace

double SystemClock::now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::kPending:
      return "pending";
    case SessionStatus::kRunning:
      return "running";
    case SessionStatus::kWaiting:
      return "waiting";
    case SessionStatus::kDone:
      return "done";
    case SessionStatus::kFailed:
      return "failed";
  }
  return "failed";
}

DsarSession execute(const DsarDescriptor& descriptor, SiteDriver& driver, const Identity& identity,
                    const fs::path& artifact_dir, const std::optional<DsarSession>& resume,
                    const ExecuteOptions& options) {
  check_descriptor(descriptor);
  DsarSession session;
  const auto hash = descriptor_hash(descriptor);
  if (resume) {
    if (resume->descriptor_hash != hash || descriptor_hash(resume->descriptor) != hash) {
      throw ResumeMismatchError("session belongs to a different descriptor", "descriptorHash");
    }
    if (resume->status == SessionStatus::kDone || resume->status == SessionStatus::kFailed) {
      throw ResumeMismatchError("session has already finished with status " + std::string(to_string(resume->status)),
                                "status");
    }
    if (resume->step_index > descriptor.steps.size()) {
      throw ResumeMismatchError("session step index is beyond the descriptor", "stepIndex");
    }
    session = *resume;
  } else {
    session.descriptor = descriptor;
    session.descriptor_hash = hash;
  }

  VirtualClock fallback_clock;
  Clock& clock = options.clock ? *options.clock : fallback_clock;
  Runner runner(session, driver, identity, artifact_dir, clock, options);
  session.status = SessionStatus::kRunning;
  while (session.step_index < descriptor.steps.size()) {
    const auto i = session.step_index;
    try {
      if (!runner.run_step(i)) return session;
    } catch (const StepFailed& f) {
      session.status = SessionStatus::kFailed;
      session.failure = Failure{i, f.reason};
      return session;
    } catch (const DriverError& e) {
      session.status = SessionStatus::kFailed;
      session.failure = Failure{i, std::string("driver error: ") + e.what()};
      return session;
    }
    ++session.step_index;
  }
  session.status = SessionStatus::kDone;
  return session;
}

nlohmann::json to_json(const DsarSession& s) {
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& a : s.artifacts) {
    artifacts.push_back({{"name", a.name}, {"byteLength", a.byte_length}, {"localPath", a.local_path}});
  }
  nlohmann::json j{{"descriptor", to_json(s.descriptor)},
                   {"descriptorHash", s.descriptor_hash},
                   {"stepIndex", s.step_index},
                   {"status", to_string(s.status)},
                   {"pollAttempts", s.poll_attempts},
                   {"artifacts", artifacts}};
  if (s.failure) j["failure"] = {{"stepIndex", s.failure->step_index}, {"reason", s.failure->reason}};
  return j;
}

DsarSession session_from_json(const nlohmann::json& j) {
  try {
    DsarSession s;
    s.descriptor = descriptor_from_json(j.at("descriptor"));
    s.descriptor_hash = j.at("descriptorHash").get<std::string>();
    s.step_index = j.at("stepIndex").get<std::size_t>();
    s.status = status_from_string(j.at("status").get<std::string>());
    s.poll_attempts = j.value("pollAttempts", std::int64_t{0});
    for (const auto& a : j.at("artifacts")) {
      s.artifacts.push_back(Artifact{a.at("name").get<std::string>(), a.at("byteLength").get<std::int64_t>(),
                                     a.at("localPath").get<std::string>()});
    }
    if (j.contains("failure")) {
      s.failure = Failure{j["failure"].at("stepIndex").get<std::size_t>(), j["failure"].at("reason").get<std::string>()};
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed session: ") + e.what(), "session");
  }
}

Identity identity_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("identity must be a JSON object", "identity");
  Identity id;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string() || value.get<std::string>().empty()) {
      throw ValidationError("identity values must be non-empty strings", key);
    }
    if (key == "EMAIL") {
      id.email = value.get<std::string>();
    } else if (key == "FULL_NAME") {
      id.full_name = value.get<std::string>();
    } else {
      throw ValidationError("unknown identity field", key);
    }
  }
  if (id.email.empty()) throw ValidationError("identity needs EMAIL", "EMAIL");
  if (id.full_name.empty()) throw ValidationError("identity needs FULL_NAME", "FULL_NAME");
  return id;
}

}  // namespace tiltkit::dsar
