#include "tiltkit/dsar/mock_driver.hpp"

#include "tiltkit/error.hpp"

namespace tiltkit::dsar {

namespace {

using nlohmann::json;

std::string string_at(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_string()) throw ValidationError(std::string("'") + key + "' must be a string", path);
  return j[key].get<std::string>();
}

}  // namespace

MockDriver MockDriver::from_json(const json& fixture) {
  if (!fixture.is_object() || !fixture.contains("pages") || !fixture["pages"].is_object()) {
    throw ValidationError("mock fixture needs a 'pages' object", "pages");
  }
  MockDriver driver;
  for (const auto& [id, page_json] : fixture["pages"].items()) {
    const auto base = "pages/" + id;
    if (!page_json.is_object()) throw ValidationError("page must be an object", base);
    Page page;
    page.url = string_at(page_json, "url", base);
    if (page_json.contains("elements")) {
      for (const auto& [selector, ej] : page_json["elements"].items()) {
        const auto path = base + "/elements/" + selector;
        if (!ej.is_object()) throw ValidationError("element must be an object", path);
        Element e;
        e.input = ej.value("input", false);
        if (ej.contains("visibleWhen")) e.visible_when = string_at(ej, "visibleWhen", path);
        if (ej.contains("onClick")) {
          const auto& effect = ej["onClick"];
          if (effect.contains("goto")) e.goto_page = string_at(effect, "goto", path + "/onClick");
          if (effect.contains("toggle")) e.toggle_flag = string_at(effect, "toggle", path + "/onClick");
        }
        if (ej.contains("download")) {
          const auto& dl = ej["download"];
          e.download = DownloadedFile{string_at(dl, "content", path + "/download"), dl.value("filename", "")};
          e.ready_after_checks = dl.value("readyAfterChecks", std::int64_t{0});
        }
        page.elements.emplace(selector, std::move(e));
      }
    }
    driver.pages_.emplace(id, std::move(page));
  }
  for (const auto& [id, page] : driver.pages_) {
    for (const auto& [selector, e] : page.elements) {
      if (e.goto_page && !driver.pages_.contains(*e.goto_page)) {
        throw ValidationError("onClick goes to unknown page '" + *e.goto_page + "'",
                              "pages/" + id + "/elements/" + selector);
      }
    }
  }
  return driver;
}

const MockDriver::Element* MockDriver::visible(const std::string& selector) const {
  if (!current_) return nullptr;
  const auto& page = pages_.at(*current_);
  auto it = page.elements.find(selector);
  if (it == page.elements.end()) return nullptr;
  if (it->second.visible_when && !flags_.contains(*it->second.visible_when)) return nullptr;
  return &it->second;
}

const MockDriver::Element& MockDriver::require(const std::string& selector, std::string_view op) const {
  const auto* e = visible(selector);
  if (!e) throw DriverError("cannot " + std::string(op) + ": no element '" + selector + "' on the current page");
  return *e;
}

void MockDriver::navigate(const std::string& url) {
  record("navigate", {url});
  for (const auto& [id, page] : pages_) {
    if (page.url == url) {
      current_ = id;
      return;
    }
  }
  throw DriverError("no page for url '" + url + "'");
}

bool MockDriver::exists(const std::string& selector) {
  record("exists", {selector});
  return visible(selector) != nullptr;
}

void MockDriver::click(const std::string& selector) {
  record("click", {selector});
  const auto& e = require(selector, "click");
  if (e.toggle_flag) flags_.insert(*e.toggle_flag);
  if (e.goto_page) current_ = *e.goto_page;
}

void MockDriver::fill(const std::string& selector, const std::string& text) {
  record("fill", {selector, text});
  const auto& e = require(selector, "fill");
  if (!e.input) throw DriverError("cannot fill: element '" + selector + "' is not an input");
  filled_[*current_ + " " + selector] = text;
}

bool MockDriver::download_ready(const std::string& selector) {
  record("downloadReady", {selector});
  const auto* e = visible(selector);
  if (!e || !e->download) return false;
  return ++checks_[*current_ + " " + selector] > e->ready_after_checks;
}

DownloadedFile MockDriver::fetch_download(const std::string& selector) {
  record("fetchDownload", {selector});
  const auto& e = require(selector, "download");
  if (!e.download) throw DriverError("element '" + selector + "' offers no download");
  auto it = checks_.find(*current_ + " " + selector);
  const auto checks = it == checks_.end() ? 0 : it->second;
  if (checks <= e.ready_after_checks) throw DriverError("download '" + selector + "' is not ready");
  return *e.download;
}

json MockDriver::call_log_json() const {
  json out = json::array();
  for (const auto& c : log_) out.push_back({{"step", c.step}, {"op", c.op}, {"args", c.args}});
  return out;
}

json MockDriver::snapshot() const {
  json j{{"flags", flags_}, {"checks", checks_}};
  j["page"] = current_ ? json(*current_) : json(nullptr);
  // Filled values stay out of the snapshot.
  return j;
}

void MockDriver::restore(const json& state) {
  try {
    current_.reset();
    if (state.contains("page") && !state["page"].is_null()) {
      const auto page = state["page"].get<std::string>();
      if (!pages_.contains(page)) throw ValidationError("snapshot names unknown page '" + page + "'", "page");
      current_ = page;
    }
    flags_ = state.value("flags", std::set<std::string>{});
    checks_ = state.value("checks", std::map<std::string, std::int64_t>{});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed driver snapshot: ") + e.what(), "snapshot");
  }
}

}  // namespace tiltkit::dsar
