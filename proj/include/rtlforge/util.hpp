#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtlforge::util {

// 64-bit FNV-1a. Used for shingle fingerprints and content ids, so it must be
// identical across runs, processes, and platforms. Never replace with std::hash.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x00000100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

// 128-bit content id as 32 hex chars: two independent FNV lanes. Callers that
// need byte-exact semantics (dedup) must still compare full texts on id match.
std::string content_id(std::string_view text);

std::string to_hex(std::uint64_t v);

std::string trim(std::string_view s);
std::string lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string read_file(const std::filesystem::path& path);
std::optional<std::string> try_read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
void append_file(const std::filesystem::path& path, std::string_view content);

// Creates a fresh unique directory under the system temp dir.
std::filesystem::path make_temp_dir(std::string_view tag);

// Splits a command template into argv, honoring single/double quotes, then
// substitutes {name} placeholders from the map in a single pass.
std::vector<std::string> render_command(
    std::string_view command_template,
    const std::function<std::optional<std::string>(std::string_view)>& lookup);

}  // namespace rtlforge::util
