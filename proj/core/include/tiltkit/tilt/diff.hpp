#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/tilt/document.hpp"

namespace tiltkit::tilt {

enum class DiffOp { kAdded, kRemoved, kChanged };

std::string_view to_string(DiffOp op);

struct DiffEntry {
  std::string path;  // e.g. "dataDisclosed/0/category"
  DiffOp op = DiffOp::kChanged;
  std::optional<nlohmann::json> before;
  std::optional<nlohmann::json> after;

  bool operator==(const DiffEntry&) const = default;
};

// Entries sorted bytewise by path, paths unique.
struct DocumentDiff {
  std::vector<DiffEntry> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const DocumentDiff&) const = default;
};

// Field-level diff over the canonical JSON structure. Arrays are compared by
// index. meta/hash and meta/modified are not compared.
DocumentDiff diff(const TiltDocument& old_doc, const TiltDocument& new_doc);

// Applies `delta` to `old_doc`. Throws ConflictError when a before-value does
// not match, PathError when a path cannot be resolved, ValidationError when
// the result is not a valid document. The result keeps old_doc's modified
// timestamp (raised to `created` if needed) and a fresh hash.
TiltDocument apply_diff(const TiltDocument& old_doc, const DocumentDiff& delta);

// Equality ignoring meta/hash and meta/modified, the fields diff() skips.
bool same_content(const TiltDocument& a, const TiltDocument& b);

nlohmann::json to_json(const DocumentDiff& delta);
DocumentDiff diff_from_json(const nlohmann::json& value);

}  // namespace tiltkit::tilt
