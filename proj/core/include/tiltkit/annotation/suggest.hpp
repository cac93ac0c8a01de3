#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/annotation/task.hpp"

namespace tiltkit::annotation {

struct Suggestion {
  std::string field;
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  double confidence = 0.0;  // matched keywords / words in sentence, clamped to [0, 1]
  std::string method = "keyword";

  bool operator==(const Suggestion&) const = default;
};

// Sentence spans of `body`, in code points, trimmed of surrounding
// whitespace. A sentence ends at '.', '!', '?' or a newline that is followed
// by whitespace, an uppercase letter or the end of the text.
std::vector<Span> split_sentences(std::u32string_view body);

// Sentences containing any keyword of `field`. Throws UnknownFieldError when
// the field is not in the task's queue.
std::vector<Suggestion> suggest(const AnnotationTask& task, const PolicyText& policy, std::string_view field);

nlohmann::json to_json(const Suggestion& suggestion);

}  // namespace tiltkit::annotation
