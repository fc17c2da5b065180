#include "rtlforge/util.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace rtlforge::util {

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string content_id(std::string_view text) {
    // Second lane uses a shifted offset basis so the two halves are independent.
    std::uint64_t lo = fnv1a64(text);
    std::uint64_t hi = fnv1a64(text, kFnvOffset ^ 0x9e3779b97f4a7c15ull);
    return to_hex(hi) + to_hex(lo);
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<std::string> try_read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write: " + path.string());
}

void append_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::filesystem::path make_temp_dir(std::string_view tag) {
    static std::atomic<std::uint64_t> counter{0};
    auto base = std::filesystem::temp_directory_path();
    std::uint64_t n = counter.fetch_add(1);
    auto dir = base / (std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(n));
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<std::string> render_command(
    std::string_view command_template,
    const std::function<std::optional<std::string>(std::string_view)>& lookup) {
    std::vector<std::string> argv;
    std::string cur;
    bool in_word = false;
    char quote = 0;
    auto flush = [&] {
        if (in_word) {
            argv.push_back(cur);
            cur.clear();
            in_word = false;
        }
    };
    for (std::size_t i = 0; i < command_template.size(); ++i) {
        char c = command_template[i];
        if (quote) {
            if (c == quote) {
                quote = 0;
            } else {
                cur.push_back(c);
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            in_word = true;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (c == '{') {
            auto close = command_template.find('}', i);
            if (close != std::string_view::npos) {
                auto name = command_template.substr(i + 1, close - i - 1);
                if (auto v = lookup(name)) {
                    cur += *v;
                    in_word = true;
                    i = close;
                    continue;
                }
            }
        }
        cur.push_back(c);
        in_word = true;
    }
    flush();
    return argv;
}

}  // namespace rtlforge::util
