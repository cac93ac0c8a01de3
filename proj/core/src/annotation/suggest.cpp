#include "tiltkit/annotation/suggest.hpp"

#include <algorithm>

#include "annotation/fields.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::annotation {

std::vector<Span> split_sentences(std::u32string_view body) {
  std::vector<Span> out;
  const auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && util::is_space(body[begin])) ++begin;
    while (end > begin && util::is_space(body[end - 1])) --end;
    if (begin < end) out.push_back({begin, end});
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char32_t c = body[i];
    if (c != U'.' && c != U'!' && c != U'?' && c != U'\n') continue;
    const bool boundary = i + 1 == body.size() || util::is_space(body[i + 1]) || util::is_upper(body[i + 1]);
    if (!boundary) continue;
    emit(start, c == U'\n' ? i : i + 1);
    start = i + 1;
  }
  emit(start, body.size());
  return out;
}

std::vector<Suggestion> suggest(const AnnotationTask& task, const PolicyText& policy, std::string_view field) {
  if (std::find(task.question_queue.begin(), task.question_queue.end(), field) == task.question_queue.end()) {
    throw UnknownFieldError("unknown field '" + std::string(field) + "'", std::string(field));
  }
  const auto* spec = detail::field_table().find(field);
  if (!spec) return {};

  const std::u32string body = util::decode_utf8(policy.body);
  const std::u32string folded = util::fold_case(body);
  std::vector<Suggestion> out;
  for (const auto& sentence : split_sentences(body)) {
    const std::u32string_view text(folded.data() + sentence.start, sentence.end - sentence.start);
    const auto hits = detail::keyword_hits(text, spec->keywords);
    if (hits.empty()) continue;
    std::size_t words = 0;
    bool in_word = false;
    for (char32_t c : text) {
      const bool space = util::is_space(c);
      if (!space && !in_word) ++words;
      in_word = !space;
    }
    const double confidence = std::clamp(static_cast<double>(hits.size()) / static_cast<double>(words), 0.0, 1.0);
    out.push_back(Suggestion{std::string(field), sentence.start, sentence.end, confidence, "keyword"});
  }
  return out;
}

nlohmann::json to_json(const Suggestion& suggestion) {
  return {{"field", suggestion.field},
          {"spanStart", suggestion.span_start},
          {"spanEnd", suggestion.span_end},
          {"confidence", suggestion.confidence},
          {"method", suggestion.method}};
}

}  // namespace tiltkit::annotation
