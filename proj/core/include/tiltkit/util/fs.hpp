#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tiltkit::util {

// Throws IoError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

// Writes to a temporary sibling, fsyncs it, renames it over `path` and
// fsyncs the directory. Readers observe either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void fsync_directory(const std::filesystem::path& dir);

}  // namespace tiltkit::util
