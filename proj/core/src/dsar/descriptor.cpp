#include "tiltkit/dsar/descriptor.hpp"

#include "tiltkit/error.hpp"
#include "tiltkit/util/sha256.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::dsar {

namespace {

using nlohmann::json;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

class StepReader {
 public:
  StepReader(const json& j, std::size_t index) : j_(j), index_(index) {
    if (!j.is_object()) fail("step must be a JSON object");
  }

  std::string text(const char* key) const {
    const auto& v = field(key);
    if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::optional<std::string> optional_text(const char* key) const {
    if (!j_.contains(key) || j_[key].is_null()) return std::nullopt;
    return text(key);
  }

  double number(const char* key) const {
    const auto& v = field(key);
    if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const char* key) const {
    const auto& v = field(key);
    if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
    return v.get<std::int64_t>();
  }

  Condition condition() const {
    const auto name = text("condition");
    if (name == "selector-present") return Condition::kSelectorPresent;
    if (name == "download-ready") return Condition::kDownloadReady;
    fail("unknown condition '" + name + "'");
  }

  ValueRef value_ref() const {
    const auto& v = field("valueRef");
    if (v.is_string()) {
      const auto name = v.get<std::string>();
      if (name == "EMAIL") return {ValueRef::Kind::kEmail, {}};
      if (name == "FULL_NAME") return {ValueRef::Kind::kFullName, {}};
      fail("valueRef must be EMAIL, FULL_NAME or {\"literal\": text}");
    }
    if (v.is_object() && v.size() == 1 && v.contains("literal") && v["literal"].is_string()) {
      return {ValueRef::Kind::kLiteral, v["literal"].get<std::string>()};
    }
    fail("valueRef must be EMAIL, FULL_NAME or {\"literal\": text}");
  }

  void only(std::initializer_list<std::string_view> keys) const {
    for (const auto& item : j_.items()) {
      bool known = item.key() == "kind";
      for (auto k : keys) known = known || item.key() == k;
      if (!known) fail("unknown field '" + item.key() + "'");
    }
  }

  [[noreturn]] void fail(const std::string& message) const { throw DescriptorError(message, index_); }

 private:
  const json& field(const char* key) const {
    if (!j_.contains(key)) fail(std::string("missing '") + key + "'");
    return j_[key];
  }

  const json& j_;
  std::size_t index_;
};

Step step_from_json(const json& j, std::size_t index) {
  StepReader r(j, index);
  const auto kind = r.text("kind");
  if (kind == "navigate") {
    r.only({"url"});
    return Navigate{r.text("url")};
  }
  if (kind == "click") {
    r.only({"selector"});
    return Click{r.text("selector")};
  }
  if (kind == "fill") {
    r.only({"selector", "valueRef"});
    return Fill{r.text("selector"), r.value_ref()};
  }
  if (kind == "waitFor") {
    r.only({"condition", "selector", "timeoutSeconds"});
    return WaitFor{r.condition(), r.optional_text("selector"), r.number("timeoutSeconds")};
  }
  if (kind == "poll") {
    r.only({"condition", "selector", "intervalSeconds", "maxAttempts"});
    return Poll{r.condition(), r.optional_text("selector"), r.number("intervalSeconds"), r.integer("maxAttempts")};
  }
  if (kind == "download") {
    r.only({"selector"});
    return Download{r.text("selector")};
  }
  r.fail("unknown step kind '" + kind + "'");
}

std::string_view condition_name(Condition c) {
  return c == Condition::kSelectorPresent ? "selector-present" : "download-ready";
}

json value_ref_json(const ValueRef& v) {
  switch (v.kind) {
    case ValueRef::Kind::kEmail:
      return "EMAIL";
    case ValueRef::Kind::kFullName:
      return "FULL_NAME";
    case ValueRef::Kind::kLiteral:
      return json{{"literal", v.literal}};
  }
  return nullptr;
}

json step_json(const Step& step) {
  return std::visit(
      Overloaded{
          [](const Navigate& s) { return json{{"kind", "navigate"}, {"url", s.url}}; },
          [](const Click& s) { return json{{"kind", "click"}, {"selector", s.selector}}; },
          [](const Fill& s) { return json{{"kind", "fill"}, {"selector", s.selector}, {"valueRef", value_ref_json(s.value)}}; },
          [](const WaitFor& s) {
            json j{{"kind", "waitFor"}, {"condition", condition_name(s.condition)}, {"timeoutSeconds", s.timeout_seconds}};
            if (s.selector) j["selector"] = *s.selector;
            return j;
          },
          [](const Poll& s) {
            json j{{"kind", "poll"},
                   {"condition", condition_name(s.condition)},
                   {"intervalSeconds", s.interval_seconds},
                   {"maxAttempts", s.max_attempts}};
            if (s.selector) j["selector"] = *s.selector;
            return j;
          },
          [](const Download& s) { return json{{"kind", "download"}, {"selector", s.selector}}; },
      },
      step);
}

void check_condition(const DsarDescriptor& d, std::size_t i, Condition condition,
                     const std::optional<std::string>& selector) {
  if (selector && selector->empty()) throw DescriptorError("selector must not be empty", i);
  if (condition == Condition::kSelectorPresent && !selector) {
    throw DescriptorError("selector-present condition needs a selector", i);
  }
  if (condition == Condition::kDownloadReady && !selector) {
    for (std::size_t k = i + 1; k < d.steps.size(); ++k) {
      if (std::holds_alternative<Download>(d.steps[k])) return;
    }
    throw DescriptorError("download-ready condition without selector needs a later download step", i);
  }
}

}  // namespace

std::string_view step_kind(const Step& step) {
  static constexpr std::string_view kNames[] = {"navigate", "click", "fill", "waitFor", "poll", "download"};
  return kNames[step.index()];
}

void check_descriptor(const DsarDescriptor& d) {
  if (d.format_version != kFormatVersion) {
    throw DescriptorError("formatVersion must be \"" + std::string(kFormatVersion) + "\"", std::nullopt);
  }
  if (util::trim(d.service).empty()) throw DescriptorError("service must not be empty", std::nullopt);
  if (util::trim(d.domain).empty()) throw DescriptorError("domain must not be empty", std::nullopt);
  if (d.steps.empty()) throw DescriptorError("descriptor needs at least one step", std::nullopt);
  if (!std::holds_alternative<Navigate>(d.steps.front())) throw DescriptorError("first step must be Navigate", 0);

  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    std::visit(Overloaded{
                   [&](const Navigate& s) {
                     if (s.url.empty()) throw DescriptorError("url must not be empty", i);
                   },
                   [&](const Click& s) {
                     if (s.selector.empty()) throw DescriptorError("selector must not be empty", i);
                   },
                   [&](const Fill& s) {
                     if (s.selector.empty()) throw DescriptorError("selector must not be empty", i);
                   },
                   [&](const WaitFor& s) {
                     if (!(s.timeout_seconds > 0)) throw DescriptorError("timeoutSeconds must be positive", i);
                     check_condition(d, i, s.condition, s.selector);
                   },
                   [&](const Poll& s) {
                     if (!(s.interval_seconds > 0)) throw DescriptorError("intervalSeconds must be positive", i);
                     if (s.max_attempts < 1) throw DescriptorError("maxAttempts must be at least 1", i);
                     check_condition(d, i, s.condition, s.selector);
                   },
                   [&](const Download& s) {
                     if (s.selector.empty()) throw DescriptorError("selector must not be empty", i);
                   },
               },
               d.steps[i]);
  }
}

DsarDescriptor descriptor_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DescriptorError("descriptor must be a JSON object", std::nullopt);
  auto text = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw DescriptorError(std::string("'") + key + "' must be a string", std::nullopt);
    }
    return j[key].get<std::string>();
  };
  for (const auto& item : j.items()) {
    const auto& k = item.key();
    if (k != "formatVersion" && k != "service" && k != "domain" && k != "steps") {
      throw DescriptorError("unknown field '" + k + "'", std::nullopt);
    }
  }
  DsarDescriptor d;
  d.format_version = text("formatVersion");
  d.service = text("service");
  d.domain = text("domain");
  if (!j.contains("steps") || !j["steps"].is_array()) throw DescriptorError("'steps' must be an array", std::nullopt);
  for (std::size_t i = 0; i < j["steps"].size(); ++i) d.steps.push_back(step_from_json(j["steps"][i], i));
  return d;
}

DsarDescriptor validate_descriptor(std::string_view text) {
  auto d = descriptor_from_json(util::parse_json(text));
  check_descriptor(d);
  return d;
}

nlohmann::json to_json(const DsarDescriptor& d) {
  json steps = json::array();
  for (const auto& s : d.steps) steps.push_back(step_json(s));
  return {{"formatVersion", d.format_version}, {"service", d.service}, {"domain", d.domain}, {"steps", steps}};
}

std::string condition_selector(const DsarDescriptor& d, std::size_t step_index) {
  const auto& step = d.steps.at(step_index);
  std::optional<std::string> own;
  if (const auto* w = std::get_if<WaitFor>(&step)) own = w->selector;
  if (const auto* p = std::get_if<Poll>(&step)) own = p->selector;
  if (own) return *own;
  for (std::size_t k = step_index + 1; k < d.steps.size(); ++k) {
    if (const auto* dl = std::get_if<Download>(&d.steps[k])) return dl->selector;
  }
  throw DescriptorError("condition has no selector", step_index);
}

std::string descriptor_hash(const DsarDescriptor& d) { return util::sha256_hex(to_json(d).dump()); }

}  // namespace tiltkit::dsar
