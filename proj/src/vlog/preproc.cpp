#include "rtlforge/vlog/preproc.hpp"

#include <cctype>
#include <map>

#include "rtlforge/util.hpp"

namespace rtlforge::vlog {

namespace {

struct Pp {
    std::map<std::string, std::string> defines;
    std::vector<std::filesystem::path> include_dirs;
    std::vector<Diagnostic> diags;
    int depth = 0;

    void error(const std::string& file, std::uint32_t line, std::string msg) {
        diags.push_back(Diagnostic{file, line, std::move(msg)});
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
    }

    std::string run(std::string_view src, const std::string& file) {
        if (depth > 16) {
            error(file, 0, "include depth exceeded");
            return {};
        }
        std::string out;
        out.reserve(src.size());
        std::uint32_t line = 1;
        // conditional stack: live = emitting, taken = some branch already taken
        struct Cond {
            bool live;
            bool taken;
        };
        std::vector<Cond> conds;
        auto emitting = [&] {
            for (const auto& c : conds)
                if (!c.live) return false;
            return true;
        };

        std::size_t i = 0;
        while (i < src.size()) {
            char c = src[i];
            if (c == '\n') {
                out += '\n';
                ++line;
                ++i;
                continue;
            }
            if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
                while (i < src.size() && src[i] != '\n') {
                    if (emitting()) out += src[i];
                    ++i;
                }
                continue;
            }
            if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
                if (emitting()) out += "/*";
                i += 2;
                while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
                    if (src[i] == '\n') {
                        out += '\n';
                        ++line;
                    } else if (emitting()) {
                        out += src[i];
                    }
                    ++i;
                }
                if (i + 1 < src.size()) {
                    if (emitting()) out += "*/";
                    i += 2;
                }
                continue;
            }
            if (c == '"') {
                std::size_t start = i;
                ++i;
                while (i < src.size() && src[i] != '"' && src[i] != '\n') {
                    if (src[i] == '\\' && i + 1 < src.size()) ++i;
                    ++i;
                }
                if (i < src.size() && src[i] == '"') ++i;
                if (emitting()) out += src.substr(start, i - start);
                continue;
            }
            if (c == '(' && i + 1 < src.size() && src[i + 1] == '*' &&
                (i + 2 >= src.size() || src[i + 2] != ')')) {
                // attribute instance (* ... *). "(*)" is a sensitivity list, not an attribute.
                std::size_t j = i + 2;
                std::uint32_t skipped_lines = 0;
                while (j + 1 < src.size() && !(src[j] == '*' && src[j + 1] == ')')) {
                    if (src[j] == '\n') ++skipped_lines;
                    ++j;
                }
                if (j + 1 < src.size()) {
                    i = j + 2;
                    for (std::uint32_t k = 0; k < skipped_lines; ++k) out += '\n';
                    line += skipped_lines;
                    continue;
                }
            }
            if (c != '`') {
                if (emitting()) out += c;
                ++i;
                continue;
            }

            // directive or macro use
            std::size_t name_start = i + 1;
            std::size_t j = name_start;
            while (j < src.size() && ident_char(src[j])) ++j;
            std::string name(src.substr(name_start, j - name_start));
            i = j;

            auto rest_of_line = [&]() {
                std::string text;
                while (i < src.size() && src[i] != '\n') {
                    if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
                        text += ' ';
                        out += '\n';
                        ++line;
                        i += 2;
                        continue;
                    }
                    // comments end a directive body
                    if (src[i] == '/' && i + 1 < src.size() && src[i + 1] == '/') break;
                    text += src[i];
                    ++i;
                }
                while (i < src.size() && src[i] != '\n') ++i;
                return util::trim(text);
            };

            if (name == "define") {
                std::string body = rest_of_line();
                if (!emitting()) continue;
                auto ws = body.find_first_of(" \t(");
                std::string macro = ws == std::string::npos ? body : body.substr(0, ws);
                std::string value = ws == std::string::npos ? "" : util::trim(body.substr(ws));
                if (macro.empty()) {
                    error(file, line, "`define with no name");
                } else if (!value.empty() && ws != std::string::npos && body[ws] == '(') {
                    error(file, line, "function-like `define is not supported: " + macro);
                } else {
                    defines[macro] = value;
                }
            } else if (name == "undef") {
                std::string macro = rest_of_line();
                if (emitting()) defines.erase(macro);
            } else if (name == "ifdef" || name == "ifndef") {
                std::string macro = rest_of_line();
                bool have = defines.count(macro) > 0;
                bool live = name == "ifdef" ? have : !have;
                conds.push_back(Cond{live, live});
            } else if (name == "elsif") {
                std::string macro = rest_of_line();
                if (conds.empty()) {
                    error(file, line, "`elsif without `ifdef");
                } else {
                    bool have = defines.count(macro) > 0;
                    conds.back().live = !conds.back().taken && have;
                    conds.back().taken = conds.back().taken || conds.back().live;
                }
            } else if (name == "else") {
                rest_of_line();
                if (conds.empty()) {
                    error(file, line, "`else without `ifdef");
                } else {
                    conds.back().live = !conds.back().taken;
                    conds.back().taken = true;
                }
            } else if (name == "endif") {
                rest_of_line();
                if (conds.empty()) {
                    error(file, line, "`endif without `ifdef");
                } else {
                    conds.pop_back();
                }
            } else if (name == "include") {
                std::string arg = rest_of_line();
                if (!emitting()) continue;
                if (arg.size() >= 2 && (arg.front() == '"' || arg.front() == '<')) {
                    arg = arg.substr(1, arg.size() - 2);
                }
                std::optional<std::string> content;
                std::filesystem::path found;
                std::vector<std::filesystem::path> dirs = include_dirs;
                dirs.insert(dirs.begin(), std::filesystem::path(file).parent_path());
                for (const auto& d : dirs) {
                    auto candidate = d / arg;
                    if ((content = util::try_read_file(candidate))) {
                        found = candidate;
                        break;
                    }
                }
                if (!content) {
                    error(file, line, "cannot resolve `include \"" + arg + "\"");
                } else {
                    ++depth;
                    out += run(*content, found.string());
                    --depth;
                }
            } else if (name == "timescale" || name == "default_nettype" || name == "resetall" ||
                       name == "celldefine" || name == "endcelldefine" || name == "line" ||
                       name == "pragma" || name == "nounconnected_drive" ||
                       name == "unconnected_drive") {
                rest_of_line();
            } else if (defines.count(name)) {
                if (emitting()) out += defines[name];
            } else {
                if (emitting()) error(file, line, "unknown macro or directive `" + name);
                // swallow the token either way
            }
        }
        if (!conds.empty()) error(file, line, "unterminated `ifdef");
        return out;
    }
};

}  // namespace

PreprocResult preprocess(std::string_view source, const std::string& filename,
                         const std::vector<std::filesystem::path>& include_dirs) {
    Pp pp;
    pp.include_dirs = include_dirs;
    PreprocResult result;
    result.text = pp.run(source, filename);
    result.diags = std::move(pp.diags);
    return result;
}

}  // namespace rtlforge::vlog
