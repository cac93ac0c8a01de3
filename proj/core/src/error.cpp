#include "tiltkit/error.hpp"

namespace tiltkit {

Error::Error(std::string name, ErrorCategory category, const std::string& message,
             std::string path)
    : std::runtime_error(message),
      name_(std::move(name)),
      category_(category),
      path_(std::move(path)) {}

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : Error("SyntaxError", ErrorCategory::kInput,
            message + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

DescriptorError::DescriptorError(const std::string& message,
                                 std::optional<std::size_t> step_index)
    : Error("DescriptorError", ErrorCategory::kInput,
            step_index ? "step " + std::to_string(*step_index) + ": " + message : message,
            step_index ? "steps/" + std::to_string(*step_index) : std::string{}),
      step_index_(step_index) {}

}  // namespace tiltkit
