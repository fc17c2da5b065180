#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "rtlforge/vlog/lexer.hpp"

namespace rtlforge::ngram {

// Deterministic lexical token stream of one RTL source. Comments and
// whitespace contribute nothing; lexing is total (see vlog::lex).
struct TokenStream {
    std::vector<vlog::Token> tokens;
    std::string source_id;

    std::size_t size() const { return tokens.size(); }
};

// Unique 5-gram fingerprints of a token stream. Streams shorter than 5 tokens
// produce an empty set.
struct ShingleSet {
    std::unordered_set<std::uint64_t> shingles;

    std::size_t count() const { return shingles.size(); }
    bool empty() const { return shingles.empty(); }
};

TokenStream lex_rtl(std::string_view source, std::string source_id = {});

// Stable across runs, processes, and platforms: FNV-1a over the five token
// texts joined with the reserved separator 0x1f. Token text is hashed exactly
// as lexed; identifiers are not normalized or case-folded.
std::uint64_t fingerprint5(const vlog::Token* window);

ShingleSet shingles5(const TokenStream& stream);

// |a ∩ b| / |a ∪ b|; two empty sets compare as 0, not NaN, so empty scripts
// can never flag as contaminating.
double jaccard(const ShingleSet& a, const ShingleSet& b);

}  // namespace rtlforge::ngram
