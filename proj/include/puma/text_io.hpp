#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace puma {

/// Whole file as bytes; IoError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Replaces the file contents; IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view text);

/// Lines without their terminator; a trailing '\r' is dropped.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view s, char delim);
std::vector<std::string_view> split_ws(std::string_view s);
std::string_view trim(std::string_view s);

/// Strict numeric parsing; ParseError names `what` on failure.
long long parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

/// Shortest decimal text that reads back as the same double.
std::string format_double(double v);

/// CSV field, double-quoted when it holds a comma, quote or line break.
std::string csv_field(std::string_view s);

}  // namespace puma
