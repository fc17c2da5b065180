#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlforge/cotgen.hpp"

namespace rtlforge::sftpack {

class TokenizerFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class EmptySegment : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SequenceTooLong : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpecialTokens {
    std::optional<std::uint32_t> think_open;
    std::optional<std::uint32_t> think_close;
    std::optional<std::uint32_t> eos;
    bool any() const { return think_open || think_close || eos; }
};

// Pluggable tokenizer: the packer never assumes one model family.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::vector<std::uint32_t> encode(std::string_view text) const = 0;
    virtual SpecialTokens specials() const = 0;
    virtual std::size_t vocab_size() const = 0;
};

// Toy deterministic tokenizer for tests: id == byte value (256 entries). With
// specials, ids 256/257/258 are think_open/think_close/eos.
std::unique_ptr<Tokenizer> make_byte_tokenizer(bool with_specials);

// Directory asset: vocab.json ({"vocab": {...}, "specials": {...}}) plus
// merges.txt with one "left right" BPE merge per line, best rank first.
// Unknown bytes fall back to "<0xNN>" entries. Throws TokenizerFailure.
std::unique_ptr<Tokenizer> load_tokenizer(const std::filesystem::path& dir);

struct Span {
    std::uint32_t start = 0;
    std::uint32_t end = 0;  // exclusive
    std::uint32_t size() const { return end - start; }
};

// Token layout is x [think_open] r [think_close] y [eos]; the mask is 0 over
// the prompt span (x and think_open) and 1 over reasoning (r, think_close)
// and answer (y, eos): the model must learn to emit the closers itself. The
// three spans tile the sequence exactly.
struct MaskedSequence {
    std::string triple_id;
    std::vector<std::uint32_t> token_ids;
    std::vector<std::uint8_t> loss_mask;
    Span prompt_span, reasoning_span, answer_span;

    std::size_t size() const { return token_ids.size(); }
};

// Throws EmptySegment when reasoning or solution tokenize to nothing.
MaskedSequence build_masked_sequence(const cotgen::CotTriple& triple,
                                     const Tokenizer& tokenizer);

enum class PackMode { Whole, Spill };

struct DocBoundary {
    std::uint32_t start = 0;
    std::uint32_t end = 0;
    std::string triple_id;
};

struct PackedChunk {
    std::vector<std::uint32_t> token_ids;  // exactly the chunk length
    std::vector<std::uint8_t> loss_mask;   // pad region is 0
    std::vector<DocBoundary> docs;
    std::uint32_t pad_start = 0;  // pad span is [pad_start, chunk_len)
};

// Streaming packing in input order: a sequence that does not fit the open
// chunk closes it (pad at the tail only) and starts the next one. Whole mode
// throws SequenceTooLong for sequences longer than the chunk; Spill mode
// splits them across consecutive chunks.
std::vector<PackedChunk> pack_chunks(const std::vector<MaskedSequence>& sequences,
                                     std::uint32_t chunk_len = 32768,
                                     PackMode mode = PackMode::Whole,
                                     std::uint32_t pad_id = 0);

// Binary chunk file (little-endian):
//   magic "RFCHUNK1", u32 chunk_len, u32 chunk_count, then per chunk:
//   u32 ids[chunk_len]; mask packed LSB-first into ceil(len/8) bytes;
//   u32 n_docs; per doc u32 start, u32 end, u16 id_len, id bytes;
//   u32 pad_start.
// An index file chunks.idx.jsonl carries {chunk, offset, docs, pad_start}.
void write_chunks(const std::vector<PackedChunk>& chunks, std::uint32_t chunk_len,
                  const std::filesystem::path& out_dir);
std::vector<PackedChunk> read_chunks(const std::filesystem::path& out_dir);

std::vector<cotgen::CotTriple> load_dataset(const std::filesystem::path& jsonl_file);

}  // namespace rtlforge::sftpack
