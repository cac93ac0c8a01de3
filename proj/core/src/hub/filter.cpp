#include "tiltkit/hub/filter.hpp"

#include <algorithm>
#include <cctype>

#include "tiltkit/error.hpp"

namespace tiltkit::hub {

using nlohmann::json;

namespace {

std::optional<FilterOp> op_from_string(std::string_view s) {
  if (s == "eq") return FilterOp::kEq;
  if (s == "neq") return FilterOp::kNeq;
  if (s == "exists") return FilterOp::kExists;
  if (s == "contains") return FilterOp::kContains;
  if (s == "gte") return FilterOp::kGte;
  if (s == "lte") return FilterOp::kLte;
  return std::nullopt;
}

std::vector<std::string> segments_of(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto slash = path.find('/', start);
    out.push_back(path.substr(start, slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return out;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.size() <= 9 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
         (s.size() == 1 || s[0] != '0');
}

void expand(const json& node, const std::vector<std::string>& segments, std::size_t depth,
            const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out) {
  if (depth == segments.size()) {
    out.emplace_back(prefix, &node);
    return;
  }
  const auto& seg = segments[depth];
  const auto next = [&](const std::string& key) { return prefix.empty() ? key : prefix + "/" + key; };
  if (node.is_object()) {
    if (seg == "*") {
      for (auto it = node.begin(); it != node.end(); ++it) expand(*it, segments, depth + 1, next(it.key()), out);
    } else if (auto it = node.find(seg); it != node.end()) {
      expand(*it, segments, depth + 1, next(seg), out);
    }
  } else if (node.is_array()) {
    if (seg == "*") {
      for (std::size_t i = 0; i < node.size(); ++i) expand(node[i], segments, depth + 1, next(std::to_string(i)), out);
    } else if (is_index(seg)) {
      const auto i = std::stoul(seg);
      if (i < node.size()) expand(node[i], segments, depth + 1, next(seg), out);
    }
  }
}

bool satisfies(const json& v, FilterOp op, const json& value) {
  switch (op) {
    case FilterOp::kEq: return v == value;
    case FilterOp::kNeq: return v != value;
    case FilterOp::kContains:
      if (v.is_string() && value.is_string()) {
        return v.get_ref<const std::string&>().find(value.get_ref<const std::string&>()) != std::string::npos;
      }
      if (v.is_array()) return std::find(v.begin(), v.end(), value) != v.end();
      return false;
    case FilterOp::kGte:
      return v.is_number() && v.get<double>() >= value.get<double>();
    case FilterOp::kLte:
      return v.is_number() && v.get<double>() <= value.get<double>();
    case FilterOp::kExists: return true;
  }
  return false;
}

[[noreturn]] void bad(const std::string& message, std::string_view text = {}) {
  throw BadFilterError(text.empty() ? message : message + " in '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(FilterOp op) {
  switch (op) {
    case FilterOp::kEq: return "eq";
    case FilterOp::kNeq: return "neq";
    case FilterOp::kExists: return "exists";
    case FilterOp::kContains: return "contains";
    case FilterOp::kGte: return "gte";
    case FilterOp::kLte: return "lte";
  }
  return "eq";
}

void validate_filter(const FilterExpr& filter) {
  for (std::size_t i = 0; i < filter.conjuncts.size(); ++i) {
    const auto& c = filter.conjuncts[i];
    const std::string where = "conjunct " + std::to_string(i) + ": ";
    if (c.path.empty()) bad(where + "empty path");
    for (const auto& seg : segments_of(c.path)) {
      if (seg.empty()) bad(where + "empty segment in path '" + c.path + "'");
      if (seg != "*" && !std::all_of(seg.begin(), seg.end(), [](unsigned char ch) {
            return std::isalnum(ch) || ch == '_' || ch == '-';
          })) {
        bad(where + "invalid path segment '" + seg + "'");
      }
    }
    if (c.value.is_structured()) bad(where + "value must be a scalar");
    switch (c.op) {
      case FilterOp::kGte:
      case FilterOp::kLte:
        if (!c.value.is_number()) bad(where + std::string(to_string(c.op)) + " requires a numeric value");
        break;
      case FilterOp::kExists:
        if (!c.value.is_boolean()) bad(where + "exists requires true or false");
        break;
      default: break;
    }
  }
}

FilterExpr parse_filter(std::string_view text) {
  FilterExpr filter;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  const auto word = [&] {
    const auto start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text.substr(i, 2) != "&&") ++i;
    return std::string(text.substr(start, i - start));
  };

  skip_ws();
  if (i == text.size()) return filter;
  while (true) {
    skip_ws();
    Conjunct c;
    c.path = word();
    if (c.path.empty()) bad("expected a path", text);
    skip_ws();
    const auto op_text = word();
    const auto op = op_from_string(op_text);
    if (!op) bad("unknown operator '" + op_text + "'", text);
    c.op = *op;
    skip_ws();
    if (i < text.size() && text.substr(i, 2) != "&&") {
      if (text[i] == '"') {
        const auto start = i++;
        while (i < text.size() && text[i] != '"') i += text[i] == '\\' ? 2 : 1;
        if (i >= text.size()) bad("unterminated string", text);
        ++i;
        try {
          c.value = json::parse(text.substr(start, i - start));
        } catch (const json::parse_error&) {
          bad("invalid string literal", text);
        }
      } else {
        const auto literal = word();
        try {
          c.value = json::parse(literal);
        } catch (const json::parse_error&) {
          bad("invalid value '" + literal + "' (strings must be double-quoted)", text);
        }
        if (c.value.is_structured()) bad("value must be a scalar", text);
      }
    } else if (c.op == FilterOp::kExists) {
      c.value = true;
    } else {
      bad("missing value for '" + c.path + "'", text);
    }
    filter.conjuncts.push_back(std::move(c));
    skip_ws();
    if (i == text.size()) break;
    if (text.substr(i, 2) != "&&") bad("expected '&&'", text);
    i += 2;
  }
  validate_filter(filter);
  return filter;
}

std::string format_filter(const FilterExpr& filter) {
  std::string out;
  for (const auto& c : filter.conjuncts) {
    if (!out.empty()) out += " && ";
    out += c.path + " " + std::string(to_string(c.op)) + " " + c.value.dump();
  }
  return out;
}

std::optional<std::vector<std::string>> evaluate_filter(const FilterExpr& filter, const json& document) {
  std::vector<std::string> matched;
  for (const auto& c : filter.conjuncts) {
    std::vector<std::pair<std::string, const json*>> resolved;
    expand(document, segments_of(c.path), 0, "", resolved);
    if (c.op == FilterOp::kExists) {
      if (resolved.empty() == c.value.get<bool>()) return std::nullopt;
      for (const auto& [path, node] : resolved) matched.push_back(path);
      continue;
    }
    bool any = false;
    for (const auto& [path, node] : resolved) {
      if (satisfies(*node, c.op, c.value)) {
        matched.push_back(path);
        any = true;
      }
    }
    if (!any) return std::nullopt;
  }
  std::sort(matched.begin(), matched.end());
  matched.erase(std::unique(matched.begin(), matched.end()), matched.end());
  return matched;
}

}  // namespace tiltkit::hub
