#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finsent::util {

// FNV-1a 64-bit; used for content hashes (staleness detection, not crypto).
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Streaming FNV-1a over a file's raw bytes. Throws validation_error if the
// file cannot be read.
std::uint64_t file_fnv1a(const std::string& path);

std::string hex64(std::uint64_t v);

// Locale-independent double parsing; std::nullopt when the full field does
// not parse.
std::optional<double> parse_double(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);

// printf-style double formatting with a fixed precision so emitted files are
// byte-stable across runs.
std::string format_double(double v, int precision = 6);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace finsent::util
