#pragma once

#include <optional>
#include <string>

#include "tiltkit/annotation/task.hpp"
#include "tiltkit/tilt/document.hpp"

namespace tiltkit::annotation {

struct MetaSeed {
  std::string id;
  std::string name;
  std::string language;
  // Controller country when none can be read from the excerpts; defaults to
  // the task's country.
  std::optional<std::string> country;
  // created/modified of the exported document; defaults to the latest
  // annotation time.
  std::optional<Timestamp> timestamp;
};

// Maps the annotated excerpts of a finished task into a document. Every
// fallback is chosen so that the result always validates. Throws
// TaskNotDoneError while the task is open.
tilt::TiltDocument export_tilt(const AnnotationTask& task, const PolicyText& policy, const MetaSeed& seed);

// "Art. 6 Abs. 1 lit. f DSGVO", "Article 6(1)(a) GDPR", ... -> "GDPR-6-1-f".
std::optional<std::string> extract_legal_basis(std::string_view text);

}  // namespace tiltkit::annotation
