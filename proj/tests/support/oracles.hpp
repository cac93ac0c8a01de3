#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "support/generators.hpp"
#include "tiltkit/hub/filter.hpp"
#include "tiltkit/hub/qa.hpp"
#include "tiltkit/tilt/codec.hpp"

namespace tiltkit::testing {

using nlohmann::json;

inline std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Every node of `value` with its concrete path, root excluded.
inline void flatten(const json& value, std::vector<std::string>& prefix,
                    std::vector<std::pair<std::vector<std::string>, const json*>>& out) {
  if (!prefix.empty()) out.emplace_back(prefix, &value);
  if (value.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it) {
      prefix.push_back(it.key());
      flatten(*it, prefix, out);
      prefix.pop_back();
    }
  } else if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      prefix.push_back(std::to_string(i));
      flatten(value[i], prefix, out);
      prefix.pop_back();
    }
  }
}

inline std::optional<const json*> resolve(const json& root, const std::string& path) {
  const json* node = &root;
  for (const auto& seg : split_path(path)) {
    if (node->is_object()) {
      auto it = node->find(seg);
      if (it == node->end()) return std::nullopt;
      node = &*it;
    } else if (node->is_array()) {
      if (seg.empty() || seg.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
      const auto i = std::stoul(seg);
      if (i >= node->size()) return std::nullopt;
      node = &(*node)[i];
    } else {
      return std::nullopt;
    }
  }
  return node;
}

inline bool scalar_equal(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
  if (a.is_string() && b.is_string()) return a.get<std::string>() == b.get<std::string>();
  if (a.is_boolean() && b.is_boolean()) return a.get<bool>() == b.get<bool>();
  return a.is_null() && b.is_null();
}

// Brute force: flatten the whole document, then test every node whose path
// matches the pattern segment by segment.
inline std::optional<std::vector<std::string>> oracle_evaluate(const hub::FilterExpr& filter, const json& doc) {
  std::vector<std::pair<std::vector<std::string>, const json*>> nodes;
  std::vector<std::string> prefix;
  flatten(doc, prefix, nodes);
  std::vector<std::string> matched;
  for (const auto& c : filter.conjuncts) {
    const auto pattern = split_path(c.path);
    std::vector<std::pair<std::string, const json*>> hits;
    for (const auto& [segs, node] : nodes) {
      if (segs.size() != pattern.size()) continue;
      bool ok = true;
      for (std::size_t i = 0; i < segs.size() && ok; ++i) ok = pattern[i] == "*" || pattern[i] == segs[i];
      if (ok) hits.emplace_back(join(segs, "/"), node);
    }
    if (c.op == hub::FilterOp::kExists) {
      if (!hits.empty() != c.value.get<bool>()) return std::nullopt;
      for (const auto& h : hits) matched.push_back(h.first);
      continue;
    }
    bool any = false;
    for (const auto& [path, node] : hits) {
      bool holds = false;
      switch (c.op) {
        case hub::FilterOp::kEq: holds = scalar_equal(*node, c.value); break;
        case hub::FilterOp::kNeq: holds = !scalar_equal(*node, c.value); break;
        case hub::FilterOp::kContains:
          if (node->is_string() && c.value.is_string()) {
            holds = node->get<std::string>().find(c.value.get<std::string>()) != std::string::npos;
          } else if (node->is_array()) {
            holds = std::any_of(node->begin(), node->end(), [&](const json& e) { return scalar_equal(e, c.value); });
          }
          break;
        case hub::FilterOp::kGte: holds = node->is_number() && node->get<double>() >= c.value.get<double>(); break;
        case hub::FilterOp::kLte: holds = node->is_number() && node->get<double>() <= c.value.get<double>(); break;
        case hub::FilterOp::kExists: break;
      }
      if (holds) {
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

// Document JSON as the store exposes it: canonical structure with the hash.
inline json stored_view(const tilt::TiltDocument& doc) {
  json j = tilt::to_json(doc);
  j["meta"]["hash"] = tilt::compute_hash(doc);
  return j;
}

// Random filters whose paths and values are drawn from `docs`, so that a
// useful share of them match.
inline hub::FilterExpr random_filter(Gen& g, const std::vector<json>& docs) {
  hub::FilterExpr f;
  const auto n = g.coin(0.6) ? 1 : g.uniform(2, 3);
  for (std::int64_t i = 0; i < n; ++i) {
    const json& doc = g.pick(docs);
    std::vector<std::pair<std::vector<std::string>, const json*>> nodes;
    std::vector<std::string> prefix;
    flatten(doc, prefix, nodes);
    const auto& [segs, node] = nodes[static_cast<std::size_t>(g.uniform(0, static_cast<std::int64_t>(nodes.size()) - 1))];
    auto pattern = segs;
    for (auto& s : pattern) {
      if (g.coin(0.25)) s = "*";
    }
    if (g.coin(0.05)) pattern.back() = "noSuchField";
    hub::Conjunct c;
    c.path = join(pattern, "/");
    const json sample = node->is_structured() ? json(g.text(1, 1)) : *node;
    switch (g.uniform(0, 5)) {
      case 0:
        c.op = hub::FilterOp::kEq;
        c.value = g.coin(0.8) ? sample : json(g.coin());
        break;
      case 1:
        c.op = hub::FilterOp::kNeq;
        c.value = sample;
        break;
      case 2:
        c.op = hub::FilterOp::kExists;
        c.value = g.coin(0.7);
        break;
      case 3:
        c.op = hub::FilterOp::kContains;
        if (sample.is_string() && !sample.get<std::string>().empty() && g.coin(0.7)) {
          const auto& s = sample.get_ref<const std::string&>();
          const auto start = static_cast<std::size_t>(g.uniform(0, static_cast<std::int64_t>(s.size()) - 1));
          c.value = s.substr(start, static_cast<std::size_t>(g.uniform(1, 4)));
          // Keep the literal valid UTF-8 so it survives the filter syntax.
          try {
            (void)c.value.dump();
          } catch (const json::type_error&) {
            c.value = s;
          }
        } else {
          c.value = sample;
        }
        break;
      case 4:
        c.op = hub::FilterOp::kGte;
        c.value = sample.is_number() ? sample : json(g.uniform(0, 10));
        break;
      default:
        c.op = hub::FilterOp::kLte;
        c.value = sample.is_number() ? json(sample.get<double>() + static_cast<double>(g.uniform(-1, 1)))
                                     : json(g.uniform(0, 10));
        break;
    }
    f.conjuncts.push_back(std::move(c));
  }
  return f;
}

// Empty when every interpolation is reproducible from `doc_json` and the
// answer text is the template with exactly these values; otherwise a
// description of the first discrepancy.
inline std::string check_answer_evidence(const json& doc_json, const hub::Answer& answer) {
  std::string text = hub::qa_template(answer.language, answer.template_key);
  for (const auto& in : answer.interpolations) {
    for (const auto& p : in.paths) {
      if (!std::binary_search(answer.evidence_paths.begin(), answer.evidence_paths.end(), p)) {
        return "slot " + in.slot + ": path " + p + " is not listed as evidence";
      }
      if (!resolve(doc_json, p)) return "slot " + in.slot + ": path " + p + " does not resolve";
    }
    std::string expected;
    if (in.source == "value") {
      if (in.paths.size() != 1) return "slot " + in.slot + ": value needs one path";
      const json* node = *resolve(doc_json, in.paths[0]);
      if (!node->is_string()) return "slot " + in.slot + ": not a string";
      expected = node->get<std::string>();
    } else if (in.source == "count") {
      if (in.paths.size() == 1 && (*resolve(doc_json, in.paths[0]))->is_array()) {
        expected = std::to_string((*resolve(doc_json, in.paths[0]))->size());
      } else {
        for (const auto& p : in.paths) {
          if (**resolve(doc_json, p) != json(true)) return "slot " + in.slot + ": " + p + " is not true";
        }
        expected = std::to_string(in.paths.size());
      }
    } else if (in.source == "list") {
      std::vector<std::string> parts;
      for (const auto& p : in.paths) {
        const json* node = *resolve(doc_json, p);
        if (!node->is_string()) return "slot " + in.slot + ": " + p + " is not a string";
        parts.push_back(node->get<std::string>());
      }
      expected = join(parts, ", ");
    } else if (in.source == "labels") {
      std::vector<std::string> parts;
      for (const auto& p : in.paths) {
        const auto segs = split_path(p);
        if (segs.size() != 3 || segs[0] != "rights" || segs[2] != "available") {
          return "slot " + in.slot + ": unexpected label path " + p;
        }
        if (**resolve(doc_json, p) != json(true)) return "slot " + in.slot + ": " + p + " is not true";
        parts.push_back(hub::qa_label(answer.language, segs[1]));
      }
      expected = join(parts, ", ");
    } else {
      return "slot " + in.slot + ": unknown source " + in.source;
    }
    if (expected != in.value) return "slot " + in.slot + ": expected '" + expected + "', got '" + in.value + "'";
    const std::string marker = "{" + in.slot + "}";
    if (text.find(marker) == std::string::npos) return "slot " + in.slot + " is not in the template";
    for (std::size_t pos; (pos = text.find(marker)) != std::string::npos;) text.replace(pos, marker.size(), in.value);
  }
  if (text != answer.answer_text) return "answer text '" + answer.answer_text + "' differs from '" + text + "'";
  return {};
}

}  // namespace tiltkit::testing
