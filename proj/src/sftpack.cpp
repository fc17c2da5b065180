#include "rtlforge/sftpack.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rtlforge/util.hpp"

namespace rtlforge::sftpack {

using nlohmann::ordered_json;

namespace {

class ByteTokenizer : public Tokenizer {
public:
    explicit ByteTokenizer(bool with_specials) : with_specials_(with_specials) {}

    std::vector<std::uint32_t> encode(std::string_view text) const override {
        std::vector<std::uint32_t> out;
        out.reserve(text.size());
        for (unsigned char c : text) out.push_back(c);
        return out;
    }

    SpecialTokens specials() const override {
        SpecialTokens s;
        if (with_specials_) {
            s.think_open = 256;
            s.think_close = 257;
            s.eos = 258;
        }
        return s;
    }

    std::size_t vocab_size() const override { return with_specials_ ? 259 : 256; }

private:
    bool with_specials_;
};

class BpeTokenizer : public Tokenizer {
public:
    BpeTokenizer(std::map<std::string, std::uint32_t> vocab,
                 std::vector<std::pair<std::string, std::string>> merges, SpecialTokens specials)
        : vocab_(std::move(vocab)), specials_(specials) {
        for (std::size_t rank = 0; rank < merges.size(); ++rank) {
            merge_rank_[merges[rank].first + "\x1f" + merges[rank].second] = rank;
        }
    }

    std::vector<std::uint32_t> encode(std::string_view text) const override {
        std::vector<std::string> symbols;
        symbols.reserve(text.size());
        for (char c : text) symbols.emplace_back(1, c);
        while (symbols.size() >= 2) {
            std::size_t best_rank = SIZE_MAX, best_pos = SIZE_MAX;
            for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
                auto it = merge_rank_.find(symbols[i] + "\x1f" + symbols[i + 1]);
                if (it != merge_rank_.end() && it->second < best_rank) {
                    best_rank = it->second;
                    best_pos = i;
                }
            }
            if (best_pos == SIZE_MAX) break;
            symbols[best_pos] += symbols[best_pos + 1];
            symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
        }
        std::vector<std::uint32_t> out;
        out.reserve(symbols.size());
        for (const auto& sym : symbols) {
            auto it = vocab_.find(sym);
            if (it != vocab_.end()) {
                out.push_back(it->second);
                continue;
            }
            // byte fallback
            for (unsigned char c : sym) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "<0x%02X>", c);
                auto bit = vocab_.find(buf);
                if (bit == vocab_.end())
                    throw TokenizerFailure(std::string("no vocab entry or byte fallback for '") +
                                           sym + "'");
                out.push_back(bit->second);
            }
        }
        return out;
    }

    SpecialTokens specials() const override { return specials_; }
    std::size_t vocab_size() const override { return vocab_.size(); }

private:
    std::map<std::string, std::uint32_t> vocab_;
    std::map<std::string, std::size_t> merge_rank_;
    SpecialTokens specials_;
};

}  // namespace

std::unique_ptr<Tokenizer> make_byte_tokenizer(bool with_specials) {
    return std::make_unique<ByteTokenizer>(with_specials);
}

std::unique_ptr<Tokenizer> load_tokenizer(const std::filesystem::path& dir) {
    auto vocab_text = util::try_read_file(dir / "vocab.json");
    if (!vocab_text) throw TokenizerFailure("missing vocab.json in " + dir.string());
    ordered_json j;
    try {
        j = ordered_json::parse(*vocab_text);
    } catch (const std::exception& e) {
        throw TokenizerFailure(std::string("vocab.json is not valid JSON: ") + e.what());
    }
    if (!j.contains("vocab")) throw TokenizerFailure("vocab.json missing 'vocab' object");
    std::map<std::string, std::uint32_t> vocab;
    for (auto it = j["vocab"].begin(); it != j["vocab"].end(); ++it) {
        vocab[it.key()] = it.value().get<std::uint32_t>();
    }
    SpecialTokens specials;
    if (j.contains("specials")) {
        auto lookup = [&](const char* name) -> std::optional<std::uint32_t> {
            if (!j["specials"].contains(name)) return std::nullopt;
            std::string token = j["specials"][name].get<std::string>();
            auto it = vocab.find(token);
            if (it == vocab.end())
                throw TokenizerFailure("special '" + std::string(name) +
                                       "' names a token missing from the vocab: " + token);
            return it->second;
        };
        specials.think_open = lookup("think_open");
        specials.think_close = lookup("think_close");
        specials.eos = lookup("eos");
    }
    std::vector<std::pair<std::string, std::string>> merges;
    if (auto merges_text = util::try_read_file(dir / "merges.txt")) {
        std::istringstream in(*merges_text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto space = line.find(' ');
            if (space == std::string::npos) continue;
            merges.emplace_back(line.substr(0, space), line.substr(space + 1));
        }
    }
    return std::make_unique<BpeTokenizer>(std::move(vocab), std::move(merges), specials);
}

MaskedSequence build_masked_sequence(const cotgen::CotTriple& triple,
                                     const Tokenizer& tokenizer) {
    MaskedSequence seq;
    seq.triple_id = triple.spec.source_script_id.empty()
                        ? util::content_id(triple.spec.problem_text + triple.solution)
                        : triple.spec.source_script_id;
    std::vector<std::uint32_t> x = tokenizer.encode(triple.spec.problem_text);
    std::vector<std::uint32_t> r = tokenizer.encode(triple.reasoning);
    std::vector<std::uint32_t> y = tokenizer.encode(triple.solution);
    if (r.empty()) throw EmptySegment("empty reasoning segment for " + seq.triple_id);
    if (y.empty()) throw EmptySegment("empty answer segment for " + seq.triple_id);
    SpecialTokens sp = tokenizer.specials();

    auto push = [&](std::uint32_t id, std::uint8_t mask) {
        seq.token_ids.push_back(id);
        seq.loss_mask.push_back(mask);
    };
    seq.prompt_span.start = 0;
    for (std::uint32_t id : x) push(id, 0);
    if (sp.think_open) push(*sp.think_open, 0);
    seq.prompt_span.end = static_cast<std::uint32_t>(seq.token_ids.size());

    seq.reasoning_span.start = seq.prompt_span.end;
    for (std::uint32_t id : r) push(id, 1);
    if (sp.think_close) push(*sp.think_close, 1);
    seq.reasoning_span.end = static_cast<std::uint32_t>(seq.token_ids.size());

    seq.answer_span.start = seq.reasoning_span.end;
    for (std::uint32_t id : y) push(id, 1);
    if (sp.eos) push(*sp.eos, 1);
    seq.answer_span.end = static_cast<std::uint32_t>(seq.token_ids.size());
    return seq;
}

std::vector<PackedChunk> pack_chunks(const std::vector<MaskedSequence>& sequences,
                                     std::uint32_t chunk_len, PackMode mode,
                                     std::uint32_t pad_id) {
    std::vector<PackedChunk> chunks;
    PackedChunk current;
    auto chunk_fill = [&]() { return static_cast<std::uint32_t>(current.token_ids.size()); };
    auto close_chunk = [&]() {
        current.pad_start = chunk_fill();
        while (current.token_ids.size() < chunk_len) {
            current.token_ids.push_back(pad_id);
            current.loss_mask.push_back(0);
        }
        chunks.push_back(std::move(current));
        current = PackedChunk{};
    };

    for (const auto& seq : sequences) {
        if (mode == PackMode::Whole && seq.size() > chunk_len) {
            throw SequenceTooLong("sequence " + seq.triple_id + " has " +
                                  std::to_string(seq.size()) + " tokens > chunk " +
                                  std::to_string(chunk_len));
        }
        std::size_t offset = 0;
        while (offset < seq.size()) {
            std::uint32_t room = chunk_len - chunk_fill();
            if (room == 0 || (mode == PackMode::Whole && seq.size() - offset > room)) {
                close_chunk();
                continue;
            }
            std::size_t take = std::min<std::size_t>(room, seq.size() - offset);
            DocBoundary doc;
            doc.start = chunk_fill();
            doc.triple_id = seq.triple_id;
            for (std::size_t k = 0; k < take; ++k) {
                current.token_ids.push_back(seq.token_ids[offset + k]);
                current.loss_mask.push_back(seq.loss_mask[offset + k]);
            }
            doc.end = chunk_fill();
            current.docs.push_back(std::move(doc));
            offset += take;
            if (mode == PackMode::Whole) break;  // whole doc placed in one go
        }
    }
    if (chunk_fill() > 0 || chunks.empty()) close_chunk();
    return chunks;
}

namespace {

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));  // little-endian hosts only; asserted in write_chunks
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

void write_chunks(const std::vector<PackedChunk>& chunks, std::uint32_t chunk_len,
                  const std::filesystem::path& out_dir) {
    static_assert(std::endian::native == std::endian::little,
                  "chunk format is little-endian");
    std::filesystem::create_directories(out_dir);
    std::string out;
    out.append("RFCHUNK1", 8);
    put<std::uint32_t>(out, chunk_len);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(chunks.size()));
    std::ostringstream index;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto& chunk = chunks[i];
        ordered_json idx;
        idx["chunk"] = i;
        idx["offset"] = out.size();
        idx["docs"] = chunk.docs.size();
        idx["pad_start"] = chunk.pad_start;
        index << idx.dump() << "\n";
        for (std::uint32_t id : chunk.token_ids) put<std::uint32_t>(out, id);
        std::uint32_t mask_bytes = (chunk_len + 7) / 8;
        std::string mask(mask_bytes, '\0');
        for (std::uint32_t b = 0; b < chunk.loss_mask.size(); ++b) {
            if (chunk.loss_mask[b]) mask[b / 8] |= static_cast<char>(1 << (b % 8));
        }
        out += mask;
        put<std::uint32_t>(out, static_cast<std::uint32_t>(chunk.docs.size()));
        for (const auto& doc : chunk.docs) {
            put<std::uint32_t>(out, doc.start);
            put<std::uint32_t>(out, doc.end);
            put<std::uint16_t>(out, static_cast<std::uint16_t>(doc.triple_id.size()));
            out += doc.triple_id;
        }
        put<std::uint32_t>(out, chunk.pad_start);
    }
    util::write_file(out_dir / "chunks.bin", out);
    util::write_file(out_dir / "chunks.idx.jsonl", index.str());
}

std::vector<PackedChunk> read_chunks(const std::filesystem::path& out_dir) {
    std::string in = util::read_file(out_dir / "chunks.bin");
    if (in.size() < 16 || in.substr(0, 8) != "RFCHUNK1")
        throw std::runtime_error("bad chunk file magic");
    std::size_t pos = 8;
    std::uint32_t chunk_len = get<std::uint32_t>(in, pos);
    std::uint32_t count = get<std::uint32_t>(in, pos);
    std::vector<PackedChunk> chunks;
    chunks.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        PackedChunk chunk;
        chunk.token_ids.resize(chunk_len);
        for (std::uint32_t k = 0; k < chunk_len; ++k)
            chunk.token_ids[k] = get<std::uint32_t>(in, pos);
        std::uint32_t mask_bytes = (chunk_len + 7) / 8;
        chunk.loss_mask.assign(chunk_len, 0);
        for (std::uint32_t b = 0; b < chunk_len; ++b) {
            if ((in[pos + b / 8] >> (b % 8)) & 1) chunk.loss_mask[b] = 1;
        }
        pos += mask_bytes;
        std::uint32_t n_docs = get<std::uint32_t>(in, pos);
        for (std::uint32_t d = 0; d < n_docs; ++d) {
            DocBoundary doc;
            doc.start = get<std::uint32_t>(in, pos);
            doc.end = get<std::uint32_t>(in, pos);
            std::uint16_t len = get<std::uint16_t>(in, pos);
            doc.triple_id = in.substr(pos, len);
            pos += len;
            chunk.docs.push_back(std::move(doc));
        }
        chunk.pad_start = get<std::uint32_t>(in, pos);
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

std::vector<cotgen::CotTriple> load_dataset(const std::filesystem::path& jsonl_file) {
    std::vector<cotgen::CotTriple> out;
    std::ifstream in(jsonl_file);
    if (!in) throw std::runtime_error("cannot open dataset: " + jsonl_file.string());
    std::string line;
    while (std::getline(in, line)) {
        if (util::trim(line).empty()) continue;
        auto j = ordered_json::parse(line);
        cotgen::CotTriple triple;
        triple.spec.problem_text = j["spec"].value("problem_text", "");
        triple.spec.source_script_id = j["spec"].value("source_script_id", "");
        triple.reasoning = j.value("reasoning", "");
        triple.solution = j.value("solution", "");
        out.push_back(std::move(triple));
    }
    return out;
}

}  // namespace rtlforge::sftpack
