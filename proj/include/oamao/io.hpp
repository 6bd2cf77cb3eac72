#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace oamao::io {

/// Writes to a sibling temp file and renames over `path`, so readers see either
/// the old content or the complete new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Raw 32-byte SHA-256 digest.
std::string sha256_bytes(std::string_view bytes);
/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// One `key = value` line. Blank lines and lines starting with '#' are skipped.
struct KeyValue {
    std::string key;
    std::string value;
    std::size_t offset = 0;  ///< byte offset of the line start
};

/// Throws ParseError for a line without '=' or with an empty key.
std::vector<KeyValue> parse_key_values(std::string_view text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);
/// Whole-string parses; throw ParseError at `offset` on failure.
double parse_double(std::string_view text, std::size_t offset);
long long parse_int(std::string_view text, std::size_t offset);
std::uint64_t parse_u64(std::string_view text, std::size_t offset);

}  // namespace oamao::io
