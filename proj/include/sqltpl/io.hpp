#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace sqltpl {

/// Whole-file read/write; both throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace sqltpl
