#include "rtlforge/vlog/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace rtlforge::vlog {

namespace {

const std::unordered_set<std::string_view>& keyword_set() {
    static const std::unordered_set<std::string_view> kw = {
        "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1", "case",
        "casex", "casez", "cell", "cmos", "config", "deassign", "default", "defparam", "design",
        "disable", "edge", "else", "end", "endcase", "endconfig", "endfunction", "endgenerate",
        "endmodule", "endprimitive", "endspecify", "endtable", "endtask", "event", "for", "force",
        "forever", "fork", "function", "generate", "genvar", "highz0", "highz1", "if", "ifnone",
        "incdir", "include", "initial", "inout", "input", "instance", "integer", "join", "large",
        "liblist", "library", "localparam", "macromodule", "medium", "module", "nand", "negedge",
        "nmos", "nor", "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter",
        "pmos", "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup",
        "pulsestyle_ondetect", "pulsestyle_onevent", "rcmos", "real", "realtime", "reg", "release",
        "repeat", "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1", "scalared", "showcancelled",
        "signed", "small", "specify", "specparam", "strong0", "strong1", "supply0", "supply1",
        "table", "task", "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand",
        "trior", "trireg", "unsigned", "use", "uwire", "vectored", "wait", "wand", "weak0",
        "weak1", "while", "wire", "wor", "xnor", "xor",
    };
    return kw;
}

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool based_digit(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
}

bool base_char(char c) {
    switch (c) {
        case 'b': case 'B': case 'o': case 'O': case 'd': case 'D': case 'h': case 'H':
            return true;
        default:
            return false;
    }
}

constexpr std::array<std::string_view, 4> kOps3 = {"===", "!==", "<<<", ">>>"};
constexpr std::array<std::string_view, 16> kOps2 = {"==", "!=", "<=", ">=", "<<", ">>",
                                                    "&&", "||", "~&", "~|", "~^", "^~",
                                                    "**", "->", "+:", "-:"};
constexpr std::string_view kOps1 = "+-*/%&|^~!<>=?";

}  // namespace

bool is_keyword(std::string_view word) { return keyword_set().count(word) > 0; }

const char* tok_kind_name(TokKind kind) {
    switch (kind) {
        case TokKind::Identifier: return "identifier";
        case TokKind::Keyword: return "keyword";
        case TokKind::Number: return "number";
        case TokKind::String: return "string";
        case TokKind::Operator: return "operator";
        case TokKind::Punct: return "punctuation";
    }
    return "?";
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::uint32_t line = 1, col = 1;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](TokKind kind, std::size_t start, std::uint32_t tline, std::uint32_t tcol) {
        out.push_back(Token{kind, std::string(src.substr(start, i - start)), tline, tcol});
    };

    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
            advance(i + 1 < src.size() ? 2 : 1);
            continue;
        }

        std::size_t start = i;
        std::uint32_t tline = line, tcol = col;

        if (c == '"') {
            advance(1);
            while (i < src.size() && src[i] != '"' && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size()) advance(1);
                advance(1);
            }
            if (i < src.size() && src[i] == '"') advance(1);
            push(TokKind::String, start, tline, tcol);
            continue;
        }

        if (ident_start(c)) {
            advance(1);
            while (i < src.size() && ident_char(src[i])) advance(1);
            auto text = src.substr(start, i - start);
            push(is_keyword(text) ? TokKind::Keyword : TokKind::Identifier, start, tline, tcol);
            continue;
        }

        if (c == '\\') {  // escaped identifier: backslash to next whitespace
            advance(1);
            while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i]))) advance(1);
            push(TokKind::Identifier, start, tline, tcol);
            continue;
        }

        if (c == '$' && i + 1 < src.size() && ident_char(src[i + 1])) {
            advance(1);
            while (i < src.size() && ident_char(src[i])) advance(1);
            push(TokKind::Identifier, start, tline, tcol);
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '\'' && i + 1 < src.size() &&
             (base_char(src[i + 1]) ||
              ((src[i + 1] == 's' || src[i + 1] == 'S') && i + 2 < src.size() &&
               base_char(src[i + 2]))))) {
            if (c != '\'') {
                while (i < src.size() &&
                       (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                    advance(1);
                // fraction / exponent (real literals)
                if (i + 1 < src.size() && src[i] == '.' &&
                    std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
                    advance(1);
                    while (i < src.size() &&
                           (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                        advance(1);
                }
                if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                    std::size_t j = i + 1;
                    if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                    if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                        advance(j - i + 1);
                        while (i < src.size() &&
                               (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                            advance(1);
                    }
                }
            }
            // merge an immediately following base suffix: 8'hFF, 'b101
            if (i < src.size() && src[i] == '\'') {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == 's' || src[j] == 'S')) ++j;
                if (j < src.size() && base_char(src[j])) {
                    advance(j - i + 1);
                    while (i < src.size() && based_digit(src[i])) advance(1);
                }
            }
            push(TokKind::Number, start, tline, tcol);
            continue;
        }

        bool matched = false;
        for (auto op : kOps3) {
            if (src.substr(i, 3) == op) {
                advance(3);
                push(TokKind::Operator, start, tline, tcol);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        for (auto op : kOps2) {
            if (src.substr(i, 2) == op) {
                advance(2);
                push(TokKind::Operator, start, tline, tcol);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (kOps1.find(c) != std::string_view::npos) {
            advance(1);
            push(TokKind::Operator, start, tline, tcol);
            continue;
        }
        // everything else, including kPunct and unrecognized bytes
        advance(1);
        push(TokKind::Punct, start, tline, tcol);
    }
    return out;
}

}  // namespace rtlforge::vlog
