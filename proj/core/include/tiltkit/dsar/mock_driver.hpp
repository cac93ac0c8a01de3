#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/dsar/engine.hpp"

namespace tiltkit::dsar {

struct DriverCall {
  std::size_t step = 0;
  std::string op;
  std::vector<std::string> args;

  bool operator==(const DriverCall&) const = default;
};

// Scripted site for tests and offline runs. The fixture is a page graph:
//
//   {"pages": {"<id>": {"url": "...", "elements": {"<selector>": {
//       "input": true,                         accepts fill()
//       "visibleWhen": "<flag>",               hidden until the flag is set
//       "onClick": {"goto": "<page id>"} | {"toggle": "<flag>"},
//       "download": {"content": "...", "filename": "...",
//                    "readyAfterChecks": N}    ready from check N+1 on
//   }}}}}
//
// Selectors are matched literally against the current page.
class MockDriver final : public SiteDriver {
 public:
  // Throws ValidationError for malformed fixtures.
  static MockDriver from_json(const nlohmann::json& fixture);

  void begin_step(std::size_t step_index) override { step_ = step_index; }
  void navigate(const std::string& url) override;
  bool exists(const std::string& selector) override;
  void click(const std::string& selector) override;
  void fill(const std::string& selector, const std::string& text) override;
  bool download_ready(const std::string& selector) override;
  DownloadedFile fetch_download(const std::string& selector) override;

  const std::vector<DriverCall>& call_log() const { return log_; }
  void clear_log() { log_.clear(); }
  nlohmann::json call_log_json() const;

  // Page, flags, filled values and readiness counters, for resuming a run
  // in a new process.
  nlohmann::json snapshot() const;
  void restore(const nlohmann::json& state);

 private:
  struct Element {
    bool input = false;
    std::optional<std::string> visible_when;
    std::optional<std::string> goto_page;
    std::optional<std::string> toggle_flag;
    std::optional<DownloadedFile> download;
    std::int64_t ready_after_checks = 0;
  };
  struct Page {
    std::string url;
    std::map<std::string, Element> elements;
  };

  const Element* visible(const std::string& selector) const;
  const Element& require(const std::string& selector, std::string_view op) const;
  void record(std::string op, std::vector<std::string> args) { log_.push_back({step_, std::move(op), std::move(args)}); }

  std::map<std::string, Page> pages_;
  std::optional<std::string> current_;
  std::set<std::string> flags_;
  std::map<std::string, std::string> filled_;
  std::map<std::string, std::int64_t> checks_;
  std::size_t step_ = 0;
  std::vector<DriverCall> log_;
};

}  // namespace tiltkit::dsar
