#pragma once

#include <filesystem>
#include <string>

namespace popup {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never see a partial file. Throws Io on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Whole-file read. Throws Io naming the path.
std::string read_file(const std::filesystem::path& path);

/// Creates the directory (and parents). Throws Io on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace popup
