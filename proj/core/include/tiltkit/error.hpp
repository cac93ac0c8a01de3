#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace tiltkit {

// Coarse grouping used for CLI exit codes and HTTP status mapping.
enum class ErrorCategory {
  kInput,      // malformed or invalid input (exit 1, HTTP 400/422)
  kNotFound,   // unknown id/version (exit 1, HTTP 404)
  kConflict,   // version/state conflicts (exit 1, HTTP 409)
  kIo,         // filesystem trouble (exit 2, HTTP 500)
  kExecution,  // DSAR run failures (exit 3)
};

// Base of every error the toolkit raises. name() is the stable error name
// printed by the CLI and returned in HTTP error bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string name, ErrorCategory category, const std::string& message,
        std::string path = {});

  const std::string& name() const noexcept { return name_; }
  ErrorCategory category() const noexcept { return category_; }
  // Field path, filesystem path or step reference the error refers to; may
  // be empty.
  const std::string& path() const noexcept { return path_; }

 private:
  std::string name_;
  ErrorCategory category_;
  std::string path_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

#define TILTKIT_DECLARE_ERROR(Name, Category)                            \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message, std::string path = {})     \
        : Error(#Name, ErrorCategory::Category, message, std::move(path)) {} \
  }

// tilt-core
TILTKIT_DECLARE_ERROR(ValidationError, kInput);
TILTKIT_DECLARE_ERROR(ConflictError, kConflict);
TILTKIT_DECLARE_ERROR(PathError, kInput);
// tilt-hub
TILTKIT_DECLARE_ERROR(VersionConflictError, kConflict);
TILTKIT_DECLARE_ERROR(NotFoundError, kNotFound);
TILTKIT_DECLARE_ERROR(BadFilterError, kInput);
TILTKIT_DECLARE_ERROR(BadIntentError, kInput);
TILTKIT_DECLARE_ERROR(UnknownCategoryError, kInput);
// annotation-flow
TILTKIT_DECLARE_ERROR(EmptyPolicyError, kInput);
TILTKIT_DECLARE_ERROR(OutOfOrderError, kConflict);
TILTKIT_DECLARE_ERROR(SpanBoundsError, kInput);
TILTKIT_DECLARE_ERROR(MissingSpanError, kInput);
TILTKIT_DECLARE_ERROR(UnknownFieldError, kInput);
TILTKIT_DECLARE_ERROR(TaskNotDoneError, kConflict);
// score-engine
TILTKIT_DECLARE_ERROR(SignalsError, kInput);
// dsar-engine
TILTKIT_DECLARE_ERROR(DriverError, kExecution);
TILTKIT_DECLARE_ERROR(ResumeMismatchError, kInput);
TILTKIT_DECLARE_ERROR(RegistryError, kInput);
// archive-analyzer and shared filesystem access
TILTKIT_DECLARE_ERROR(IoError, kIo);
TILTKIT_DECLARE_ERROR(EmptyArchiveError, kInput);

#undef TILTKIT_DECLARE_ERROR

// Descriptor rule violation. step_index() is empty for document-level rules.
class DescriptorError : public Error {
 public:
  DescriptorError(const std::string& message, std::optional<std::size_t> step_index);
  std::optional<std::size_t> step_index() const noexcept { return step_index_; }

 private:
  std::optional<std::size_t> step_index_;
};

}  // namespace tiltkit
