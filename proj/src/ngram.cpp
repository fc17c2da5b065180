#include "rtlforge/ngram.hpp"

#include "rtlforge/util.hpp"

namespace rtlforge::ngram {

TokenStream lex_rtl(std::string_view source, std::string source_id) {
    TokenStream stream;
    stream.tokens = vlog::lex(source);
    stream.source_id = std::move(source_id);
    return stream;
}

std::uint64_t fingerprint5(const vlog::Token* window) {
    std::uint64_t h = util::kFnvOffset;
    for (int k = 0; k < 5; ++k) {
        if (k) h = util::fnv1a64(std::string_view("\x1f", 1), h);
        h = util::fnv1a64(window[k].text, h);
    }
    return h;
}

ShingleSet shingles5(const TokenStream& stream) {
    ShingleSet set;
    if (stream.tokens.size() < 5) return set;
    set.shingles.reserve(stream.tokens.size());
    for (std::size_t i = 0; i + 5 <= stream.tokens.size(); ++i) {
        set.shingles.insert(fingerprint5(&stream.tokens[i]));
    }
    return set;
}

double jaccard(const ShingleSet& a, const ShingleSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    const auto& small = a.count() <= b.count() ? a.shingles : b.shingles;
    const auto& large = a.count() <= b.count() ? b.shingles : a.shingles;
    std::size_t inter = 0;
    for (std::uint64_t h : small) {
        if (large.count(h)) ++inter;
    }
    std::size_t uni = a.count() + b.count() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace rtlforge::ngram
