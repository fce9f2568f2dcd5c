#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mutforge::util {

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);
// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
// split("") -> {}, unlike split which yields one empty field.
std::vector<std::string> split_nonempty(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

// Shell-style glob (*, ?, [..]) matched against a whole path or basename.
bool glob_match(std::string_view pattern, std::string_view text);

// Minimal tokenizer for command strings: whitespace-separated words with
// single/double quote grouping. No variable expansion, no escapes beyond
// quote removal.
std::vector<std::string> split_command(std::string_view command);

std::string escape_control(std::string_view text);   // \n, \t, \\ -> two-char escapes
std::string unescape_control(std::string_view text);

// "12.5" style fixed formatting without locale surprises.
std::string format_fixed(double value, int decimals);

}  // namespace mutforge::util
