#include "tiltkit/tilt/diff.hpp"

#include <algorithm>

#include "tiltkit/error.hpp"
#include "tiltkit/tilt/codec.hpp"

namespace tiltkit::tilt {

using nlohmann::json;

namespace {

json comparable(const TiltDocument& doc) {
  json j = to_json(doc);
  j["meta"].erase("hash");
  j["meta"].erase("modified");
  return j;
}

std::string child(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "/" + key;
}

void diff_values(const json& a, const json& b, const std::string& path, std::vector<DiffEntry>& out) {
  if (a.is_object() && b.is_object()) {
    auto ia = a.begin();
    auto ib = b.begin();
    // Both iterate in sorted key order; merge.
    while (ia != a.end() || ib != b.end()) {
      if (ib == b.end() || (ia != a.end() && ia.key() < ib.key())) {
        out.push_back({child(path, ia.key()), DiffOp::kRemoved, *ia, std::nullopt});
        ++ia;
      } else if (ia == a.end() || ib.key() < ia.key()) {
        out.push_back({child(path, ib.key()), DiffOp::kAdded, std::nullopt, *ib});
        ++ib;
      } else {
        diff_values(*ia, *ib, child(path, ia.key()), out);
        ++ia;
        ++ib;
      }
    }
    return;
  }
  if (a.is_array() && b.is_array()) {
    const std::size_t common = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < common; ++i) diff_values(a[i], b[i], child(path, std::to_string(i)), out);
    for (std::size_t i = common; i < a.size(); ++i) {
      out.push_back({child(path, std::to_string(i)), DiffOp::kRemoved, a[i], std::nullopt});
    }
    for (std::size_t i = common; i < b.size(); ++i) {
      out.push_back({child(path, std::to_string(i)), DiffOp::kAdded, std::nullopt, b[i]});
    }
    return;
  }
  if (a != b) out.push_back({path, DiffOp::kChanged, a, b});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (true) {
    const auto slash = path.find('/', start);
    segments.push_back(path.substr(start, slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return segments;
}

std::optional<std::size_t> as_index(const std::string& segment) {
  if (segment.empty() || segment.size() > 9 ||
      !std::all_of(segment.begin(), segment.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      (segment.size() > 1 && segment[0] == '0')) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(std::stoul(segment));
}

// Resolves every segment but the last; returns the container and last segment.
std::pair<json*, std::string> resolve_parent(json& root, const std::string& path) {
  const auto segments = split_path(path);
  json* node = &root;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (node->is_object()) {
      auto it = node->find(seg);
      if (it == node->end()) throw PathError(path + ": no such path", path);
      node = &*it;
    } else if (node->is_array()) {
      const auto idx = as_index(seg);
      if (!idx || *idx >= node->size()) throw PathError(path + ": no such path", path);
      node = &(*node)[*idx];
    } else {
      throw PathError(path + ": no such path", path);
    }
  }
  return {node, segments.back()};
}

json* resolve_existing(json& parent, const std::string& last) {
  if (parent.is_object()) {
    auto it = parent.find(last);
    return it == parent.end() ? nullptr : &*it;
  }
  if (parent.is_array()) {
    const auto idx = as_index(last);
    return idx && *idx < parent.size() ? &parent[*idx] : nullptr;
  }
  return nullptr;
}

// Segment-wise order with numeric comparison of array indices, so that
// "x/2" sorts before "x/10".
bool natural_less(const std::string& a, const std::string& b) {
  const auto sa = split_path(a);
  const auto sb = split_path(b);
  for (std::size_t i = 0; i < std::min(sa.size(), sb.size()); ++i) {
    if (sa[i] == sb[i]) continue;
    const auto ia = as_index(sa[i]);
    const auto ib = as_index(sb[i]);
    if (ia && ib) return *ia < *ib;
    return sa[i] < sb[i];
  }
  return sa.size() < sb.size();
}

void check_path(const std::string& path) {
  if (path.empty()) throw PathError("empty diff path", path);
  if (path == "meta/hash" || path == "meta/modified") {
    throw PathError(path + ": field is excluded from diffs", path);
  }
}

}  // namespace

std::string_view to_string(DiffOp op) {
  switch (op) {
    case DiffOp::kAdded: return "added";
    case DiffOp::kRemoved: return "removed";
    case DiffOp::kChanged: return "changed";
  }
  return "changed";
}

DocumentDiff diff(const TiltDocument& old_doc, const TiltDocument& new_doc) {
  DocumentDiff out;
  diff_values(comparable(old_doc), comparable(new_doc), "", out.entries);
  std::sort(out.entries.begin(), out.entries.end(),
            [](const DiffEntry& a, const DiffEntry& b) { return a.path < b.path; });
  return out;
}

TiltDocument apply_diff(const TiltDocument& old_doc, const DocumentDiff& delta) {
  json root = to_json(old_doc);

  std::vector<const DiffEntry*> changed;
  std::vector<const DiffEntry*> removed;
  std::vector<const DiffEntry*> added;
  for (const auto& entry : delta.entries) {
    check_path(entry.path);
    switch (entry.op) {
      case DiffOp::kChanged: changed.push_back(&entry); break;
      case DiffOp::kRemoved: removed.push_back(&entry); break;
      case DiffOp::kAdded: added.push_back(&entry); break;
    }
  }
  const auto by_path = [](const DiffEntry* a, const DiffEntry* b) { return natural_less(a->path, b->path); };
  // Removals run from the highest index down and additions from the lowest
  // up, so array positions stay meaningful while applying.
  std::sort(removed.begin(), removed.end(), [&](auto* a, auto* b) { return by_path(b, a); });
  std::sort(added.begin(), added.end(), by_path);

  for (const auto* entry : changed) {
    auto [parent, last] = resolve_parent(root, entry->path);
    json* target = resolve_existing(*parent, last);
    if (!target) throw PathError(entry->path + ": no such path", entry->path);
    if (entry->before && *target != *entry->before) {
      throw ConflictError(entry->path + ": current value does not match 'before'", entry->path);
    }
    if (!entry->after) throw PathError(entry->path + ": changed entry without 'after'", entry->path);
    *target = *entry->after;
  }
  for (const auto* entry : removed) {
    auto [parent, last] = resolve_parent(root, entry->path);
    json* target = resolve_existing(*parent, last);
    if (!target) throw PathError(entry->path + ": no such path", entry->path);
    if (entry->before && *target != *entry->before) {
      throw ConflictError(entry->path + ": current value does not match 'before'", entry->path);
    }
    if (parent->is_object()) {
      parent->erase(last);
    } else {
      parent->erase(*as_index(last));
    }
  }
  for (const auto* entry : added) {
    if (!entry->after) throw PathError(entry->path + ": added entry without 'after'", entry->path);
    auto [parent, last] = resolve_parent(root, entry->path);
    if (parent->is_object()) {
      if (parent->contains(last)) throw ConflictError(entry->path + ": already present", entry->path);
      (*parent)[last] = *entry->after;
    } else if (parent->is_array()) {
      const auto idx = as_index(last);
      if (!idx || *idx > parent->size()) throw PathError(entry->path + ": index out of range", entry->path);
      parent->insert(parent->begin() + static_cast<std::ptrdiff_t>(*idx), *entry->after);
    } else {
      throw PathError(entry->path + ": parent is not a container", entry->path);
    }
  }

  // The result keeps the old modification time; it may not precede created.
  Timestamp modified = old_doc.meta.modified;
  root["meta"]["modified"] = util::format_rfc3339(modified);
  if (root["meta"].contains("created") && root["meta"]["created"].is_string()) {
    if (auto created = util::parse_rfc3339(root["meta"]["created"].get<std::string>());
        created && *created > modified) {
      root["meta"]["modified"] = util::format_rfc3339(*created);
    }
  }
  root["meta"]["hash"] = "";
  return from_json(root);
}

bool same_content(const TiltDocument& a, const TiltDocument& b) { return comparable(a) == comparable(b); }

json to_json(const DocumentDiff& delta) {
  json entries = json::array();
  for (const auto& e : delta.entries) {
    json j = {{"path", e.path}, {"op", std::string(to_string(e.op))}};
    if (e.before) j["before"] = *e.before;
    if (e.after) j["after"] = *e.after;
    entries.push_back(std::move(j));
  }
  return {{"entries", std::move(entries)}};
}

DocumentDiff diff_from_json(const json& value) {
  if (!value.is_object() || !value.contains("entries") || !value["entries"].is_array()) {
    throw ValidationError("diff: expected an object with an 'entries' array", "entries");
  }
  DocumentDiff out;
  for (std::size_t i = 0; i < value["entries"].size(); ++i) {
    const auto& e = value["entries"][i];
    const std::string where = "entries/" + std::to_string(i);
    if (!e.is_object() || !e.contains("path") || !e["path"].is_string() || !e.contains("op") ||
        !e["op"].is_string()) {
      throw ValidationError(where + ": expected {path, op, before?, after?}", where);
    }
    DiffEntry entry;
    entry.path = e["path"].get<std::string>();
    const auto op = e["op"].get<std::string>();
    if (op == "added") {
      entry.op = DiffOp::kAdded;
    } else if (op == "removed") {
      entry.op = DiffOp::kRemoved;
    } else if (op == "changed") {
      entry.op = DiffOp::kChanged;
    } else {
      throw ValidationError(where + "/op: unknown op '" + op + "'", where + "/op");
    }
    if (e.contains("before")) entry.before = e["before"];
    if (e.contains("after")) entry.after = e["after"];
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace tiltkit::tilt
