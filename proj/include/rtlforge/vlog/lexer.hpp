#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rtlforge::vlog {

// Lexical categories only (Verilog-2005); no parse-level validation happens
// here. Lexing is total and deterministic: comments and whitespace vanish,
// anything unrecognized becomes a single-character Punct token.
//
// Token grammar, used by tests that enumerate expected streams by hand:
//   identifier   [A-Za-z_][A-Za-z0-9_$]*  |  \<non-whitespace>+  |  $[A-Za-z0-9_$]+
//   keyword      identifier spelled as a Verilog-2005 reserved word
//   number       [0-9_]+ with optional fraction/exponent, optionally merged
//                with an immediately following base suffix ('[sS]?[bodhBODH]
//                plus digits), or a bare based literal starting at '
//   string       double-quoted, backslash escapes, token text keeps quotes
//   operator     longest match of: === !== <<< >>> == != <= >= << >> && ||
//                ~& ~| ~^ ^~ ** -> +: -: then single + - * / % & | ^ ~ ! < > = ?
//   punctuation  ( ) [ ] { } ; , . : # @ ` and any unrecognized byte
enum class TokKind : std::uint8_t {
    Identifier,
    Keyword,
    Number,
    String,
    Operator,
    Punct,
};

struct Token {
    TokKind kind;
    std::string text;
    std::uint32_t line = 1;
    std::uint32_t col = 1;
};

std::vector<Token> lex(std::string_view source);

bool is_keyword(std::string_view word);

const char* tok_kind_name(TokKind kind);

}  // namespace rtlforge::vlog
