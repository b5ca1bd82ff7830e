#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phishpond::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_digits(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Non-blank lines with "#" comments removed; each paired with its 1-based line number.
std::vector<std::pair<std::size_t, std::string>> content_lines(std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace phishpond::text
