// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gzsl {

std::string trim(std::string_view s);

// Splits one delimited line; fields are whitespace-trimmed. No quoting.
std::vector<std::string> split_fields(std::string_view line, char delim = ',');

// Shortest round-trip decimal formatting for doubles (via std::to_chars), so
// text exports are byte-stable and parse back to the exact same value.
std::string format_double(double value);

double parse_double(const std::string& s);  // throws InvalidRecord

std::string read_text_file(const std::filesystem::path& path);   // MissingFile/IOFailure
void write_text_file(const std::filesystem::path& path, std::string_view text);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gzsl
