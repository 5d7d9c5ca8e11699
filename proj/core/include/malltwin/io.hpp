#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace malltwin {

// Throws ConfigError naming the path when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal that round-trips ("25", "25.5", "0.1").
std::string format_number(double value);

}  // namespace malltwin
