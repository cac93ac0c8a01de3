#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tiltkit::annotation::detail {

struct FieldSpec {
  std::string key;
  std::string aspect;
  std::vector<std::string> checklist;
  std::map<std::string, std::string> prompts;  // language -> text
  std::vector<std::u32string> keywords;        // case-folded
};

struct FieldTable {
  std::vector<FieldSpec> fields;
  std::map<std::string, std::vector<std::u32string>> right_keywords;
  std::vector<std::u32string> safeguard_keywords;
  std::vector<std::u32string> adequacy_keywords;
  std::vector<std::u32string> adm_negative_keywords;

  const FieldSpec* find(std::string_view key) const;
};

const FieldTable& field_table();

// Start offsets of keyword occurrences in `folded_text` that begin at a word
// boundary. Several keywords hitting the same offset count once.
std::vector<std::size_t> keyword_hits(std::u32string_view folded_text,
                                      const std::vector<std::u32string>& keywords);

bool mentions_any(std::u32string_view folded_text, const std::vector<std::u32string>& keywords);

}  // namespace tiltkit::annotation::detail
