#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tiltkit::hub {

enum class FilterOp { kEq, kNeq, kExists, kContains, kGte, kLte };

std::string_view to_string(FilterOp op);

// One `path op value` condition. Paths are slash-separated; a `*` segment
// matches every array element or object member, and a conjunct holds when
// any expansion of its path satisfies it.
struct Conjunct {
  std::string path;
  FilterOp op = FilterOp::kEq;
  nlohmann::json value;  // scalar

  bool operator==(const Conjunct&) const = default;
};

struct FilterExpr {
  std::vector<Conjunct> conjuncts;

  bool operator==(const FilterExpr&) const = default;
};

// Grammar: conjuncts joined by "&&", each `path op value`; values are bare
// numbers, true/false/null, or double-quoted JSON strings. `exists` may omit
// its value (true). An empty string is the empty conjunction. Throws
// BadFilterError.
FilterExpr parse_filter(std::string_view text);

// Inverse of parse_filter.
std::string format_filter(const FilterExpr& filter);

// Throws BadFilterError for malformed paths or op/value combinations.
void validate_filter(const FilterExpr& filter);

// Concrete paths that satisfied the conjuncts, or nullopt when the document
// does not match. An empty conjunction matches with no paths.
std::optional<std::vector<std::string>> evaluate_filter(const FilterExpr& filter, const nlohmann::json& document);

}  // namespace tiltkit::hub
