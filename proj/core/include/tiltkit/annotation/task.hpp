#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/util/time.hpp"

namespace tiltkit::annotation {

using util::Timestamp;

// A privacy policy as plain UTF-8 text. Offsets everywhere in this module
// count Unicode code points, not bytes.
struct PolicyText {
  std::string id;
  std::optional<std::string> source_url;
  std::string body;
  std::size_t length = 0;

  bool operator==(const PolicyText&) const = default;
};

// Validates UTF-8 and fills in `length`. Throws EmptyPolicyError for an empty
// body.
PolicyText make_policy(std::string id, std::string body, std::optional<std::string> source_url = {});

// [start, end) in code points.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct Annotation {
  std::string field;
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string excerpt;  // body[span_start, span_end)
  std::string annotator;
  Timestamp at{};

  bool operator==(const Annotation&) const = default;
};

struct Answer {
  bool present = false;

  bool operator==(const Answer&) const = default;
};

enum class TaskStatus { kOpen, kDone };

struct AnnotationTask {
  std::string id;
  std::string policy_id;
  std::vector<std::string> question_queue;
  std::size_t cursor = 0;
  std::map<std::string, Answer> answers;
  std::vector<Annotation> annotations;
  TaskStatus status = TaskStatus::kOpen;
  // Fallback controller/recipient country for export.
  std::string country = "DE";

  double progress() const;
  bool operator==(const AnnotationTask&) const = default;
};

struct Question {
  std::string field;
  std::string prompt;
  std::string aspect;  // controller | category | transfers | rights | adm
  std::vector<std::string> checklist;

  bool operator==(const Question&) const = default;
};

struct Submission {
  std::string field;
  bool present = false;
  // Ignored when present is false.
  std::vector<Span> spans;
  std::string annotator;
  Timestamp at{};
};

// Field keys in queue order, grouped by aspect.
const std::vector<std::string>& field_keys();
bool is_field_key(std::string_view key);

// Throws EmptyPolicyError. `country` must be an alpha-2 code (ValidationError).
AnnotationTask create_task(const PolicyText& policy, std::string task_id, std::string country = "DE");

// The question at the cursor, or nullopt once every question is answered.
// `language` selects the prompt text ("de" or "en", default "en").
std::optional<Question> next_question(const AnnotationTask& task, std::string_view language = "en");

// Records the answer for queue[cursor] and advances the cursor. Throws
// OutOfOrderError, MissingSpanError or SpanBoundsError; `task` is returned
// unchanged on error.
AnnotationTask submit(AnnotationTask task, const PolicyText& policy, const Submission& submission);

nlohmann::json to_json(const PolicyText& policy);
PolicyText policy_from_json(const nlohmann::json& value);
nlohmann::json to_json(const AnnotationTask& task);
AnnotationTask task_from_json(const nlohmann::json& value);
nlohmann::json to_json(const Question& question);

}  // namespace tiltkit::annotation
