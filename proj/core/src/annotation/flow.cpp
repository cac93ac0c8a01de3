#include <algorithm>

#include "annotation/fields.hpp"
#include "tiltkit/annotation/task.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/util/countries.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::annotation {

const std::vector<std::string>& field_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : detail::field_table().fields) out.push_back(f.key);
    return out;
  }();
  return keys;
}

bool is_field_key(std::string_view key) { return detail::field_table().find(key) != nullptr; }

double AnnotationTask::progress() const {
  if (question_queue.empty()) return 1.0;
  return static_cast<double>(cursor) / static_cast<double>(question_queue.size());
}

AnnotationTask create_task(const PolicyText& policy, std::string task_id, std::string country) {
  if (policy.body.empty()) throw EmptyPolicyError("policy body is empty", "body");
  if (!util::is_alpha2_country(country)) {
    throw ValidationError("country: '" + country + "' is not an ISO 3166-1 alpha-2 code", "country");
  }
  AnnotationTask task;
  task.id = std::move(task_id);
  task.policy_id = policy.id;
  task.question_queue = field_keys();
  task.country = std::move(country);
  return task;
}

std::optional<Question> next_question(const AnnotationTask& task, std::string_view language) {
  if (task.cursor >= task.question_queue.size()) return std::nullopt;
  const auto& key = task.question_queue[task.cursor];
  const auto* spec = detail::field_table().find(key);
  if (!spec) return Question{key, key, "", {}};
  auto prompt = spec->prompts.find(std::string(language));
  if (prompt == spec->prompts.end()) prompt = spec->prompts.find("en");
  return Question{key, prompt == spec->prompts.end() ? key : prompt->second, spec->aspect, spec->checklist};
}

AnnotationTask submit(AnnotationTask task, const PolicyText& policy, const Submission& submission) {
  if (task.policy_id != policy.id) {
    throw ValidationError("task " + task.id + " belongs to policy " + task.policy_id, "policyId");
  }
  if (task.status == TaskStatus::kDone || task.cursor >= task.question_queue.size()) {
    throw OutOfOrderError("task is already done; no question is open", submission.field);
  }
  const auto& expected = task.question_queue[task.cursor];
  if (submission.field != expected) {
    throw OutOfOrderError("expected an answer for '" + expected + "', got '" + submission.field + "'",
                          submission.field);
  }
  if (submission.present && submission.spans.empty()) {
    throw MissingSpanError("'" + submission.field + "' marked present without any span", submission.field);
  }

  std::vector<Annotation> added;
  if (submission.present) {
    const std::u32string body = util::decode_utf8(policy.body);
    for (std::size_t i = 0; i < submission.spans.size(); ++i) {
      const auto& span = submission.spans[i];
      if (!(span.start < span.end && span.end <= body.size())) {
        throw SpanBoundsError("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                                  ") is not within [0, " + std::to_string(body.size()) + ")",
                              "spans/" + std::to_string(i));
      }
      added.push_back(Annotation{submission.field, span.start, span.end,
                                 util::encode_utf8(std::u32string_view(body).substr(span.start, span.end - span.start)),
                                 submission.annotator, submission.at});
    }
  }

  // Last writer wins per field.
  std::erase_if(task.annotations, [&](const Annotation& a) { return a.field == submission.field; });
  task.annotations.insert(task.annotations.end(), added.begin(), added.end());
  task.answers[submission.field] = Answer{submission.present};
  ++task.cursor;
  if (task.cursor == task.question_queue.size()) task.status = TaskStatus::kDone;
  return task;
}

nlohmann::json to_json(const AnnotationTask& task) {
  nlohmann::json answers = nlohmann::json::object();
  for (const auto& [key, answer] : task.answers) answers[key] = {{"present", answer.present}};
  nlohmann::json annotations = nlohmann::json::array();
  for (const auto& a : task.annotations) {
    annotations.push_back({{"field", a.field},
                           {"spanStart", a.span_start},
                           {"spanEnd", a.span_end},
                           {"excerpt", a.excerpt},
                           {"annotator", a.annotator},
                           {"at", util::format_rfc3339(a.at)}});
  }
  return {{"id", task.id},
          {"policyId", task.policy_id},
          {"questionQueue", task.question_queue},
          {"cursor", task.cursor},
          {"answers", std::move(answers)},
          {"annotations", std::move(annotations)},
          {"status", task.status == TaskStatus::kDone ? "done" : "open"},
          {"country", task.country},
          {"progress", task.progress()}};
}

AnnotationTask task_from_json(const nlohmann::json& value) {
  try {
    AnnotationTask task;
    task.id = value.at("id").get<std::string>();
    task.policy_id = value.at("policyId").get<std::string>();
    task.question_queue = value.at("questionQueue").get<std::vector<std::string>>();
    task.cursor = value.at("cursor").get<std::size_t>();
    for (const auto& [key, answer] : value.at("answers").items()) {
      task.answers[key] = Answer{answer.at("present").get<bool>()};
    }
    for (const auto& a : value.at("annotations")) {
      const auto at = util::parse_rfc3339(a.at("at").get<std::string>());
      if (!at) throw ValidationError("annotations: bad timestamp", "annotations");
      task.annotations.push_back(Annotation{a.at("field").get<std::string>(), a.at("spanStart").get<std::size_t>(),
                                            a.at("spanEnd").get<std::size_t>(), a.at("excerpt").get<std::string>(),
                                            a.at("annotator").get<std::string>(), *at});
    }
    task.status = value.at("status").get<std::string>() == "done" ? TaskStatus::kDone : TaskStatus::kOpen;
    task.country = value.value("country", std::string("DE"));
    if (task.cursor > task.question_queue.size() ||
        (task.status == TaskStatus::kDone) != (task.cursor == task.question_queue.size())) {
      throw ValidationError("task: cursor and status are inconsistent", "cursor");
    }
    return task;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("task: ") + e.what());
  }
}

nlohmann::json to_json(const Question& question) {
  return {{"field", question.field},
          {"prompt", question.prompt},
          {"aspect", question.aspect},
          {"checklist", question.checklist}};
}

}  // namespace tiltkit::annotation
