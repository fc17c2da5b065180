#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlforge/ngram.hpp"

namespace rtlforge::corpus {

// One RTL source with provenance. `id` is a pure function of the text bytes.
struct RtlScript {
    std::string id;
    std::string path;
    std::string text;
    std::uint64_t token_count = 0;
};

RtlScript make_script(std::string text, std::string path = {});

struct GoldenEntry {
    std::string benchmark_id;
    std::string problem_id;
    ngram::ShingleSet shingles;
};

struct GoldenSet {
    std::vector<GoldenEntry> entries;
    bool empty() const { return entries.empty(); }
};

struct StageStats {
    std::string stage;
    std::uint64_t input_count = 0;
    std::uint64_t rejected_count = 0;
    std::uint64_t retained_count = 0;
    std::uint64_t total_tokens_retained = 0;
};

class ValidatorUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class EmbedderUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class EmbeddingDimensionMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// External syntax validator: command template with a {file} placeholder,
// exit status 0 = valid.
struct ValidatorConfig {
    std::string command;
    int timeout_s = 30;
};

struct EmbeddingConfig {
    std::string endpoint;                               // empty: stage disabled
    double min_cosine = 0.3;
    std::vector<std::vector<std::string>> centroid_groups;  // each group -> mean embedding
    std::size_t batch = 16;
    int timeout_s = 120;
};

struct PipelineConfig {
    std::uint64_t max_tokens = 65536;
    double decontam_threshold = 0.8;
    bool decontaminate_problem_texts = false;  // default off: goldens only
    ValidatorConfig validator;
    EmbeddingConfig embedding;
    std::size_t workers = 4;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& json_file);

// ---- individual stage operations ----

// Keeps the first occurrence (input order) of every distinct text; returns
// keep flags aligned with the input. Byte-exact comparison, never hash-only.
std::vector<bool> dedup_exact(const std::vector<RtlScript>& scripts);

// Reject iff token_count > max_tokens ("exceeding" is strict).
bool filter_length_keep(const RtlScript& script, std::uint64_t max_tokens = 65536);

struct SyntaxOutcome {
    bool keep = false;
    std::string reason;
};
// Throws ValidatorUnavailable when the tool cannot be launched.
SyntaxOutcome validate_syntax(const RtlScript& script, const ValidatorConfig& validator,
                              const std::filesystem::path& scratch_dir);

struct DecontamOutcome {
    bool keep = true;
    std::string matched_benchmark;
    std::string matched_problem;
    double score = 0.0;  // max Jaccard over goldens
};
DecontamOutcome decontaminate(const RtlScript& script, const GoldenSet& goldens,
                              double threshold = 0.8);

// Embedding provider contract: POST {"texts": [...]} -> {"embeddings": [[..],..]}.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

std::unique_ptr<EmbeddingProvider> make_http_embedder(const EmbeddingConfig& config);

struct EmbedOutcome {
    bool keep = true;
    double score = 0.0;  // max cosine over centroids
    std::string reason;
};
EmbedOutcome filter_embedding(const std::vector<double>& embedding,
                              const std::vector<std::vector<double>>& centroids,
                              double min_cosine);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// ---- the pipeline ----

GoldenSet load_goldens(const std::filesystem::path& dir, bool include_problem_texts = false);

// Accepts a directory tree of RTL files or a .jsonl records file
// ({"path":..,"text":..}); order is deterministic (sorted paths / file order).
std::vector<RtlScript> load_scripts(const std::filesystem::path& input);

struct PipelineResult {
    std::vector<StageStats> stats;
    std::uint64_t retained = 0;
    std::filesystem::path corpus_file;
    std::filesystem::path manifest_file;
    std::filesystem::path stats_file;
};

// dedup -> length -> syntax -> decontamination -> embedding. Per-script stage
// outcomes are checkpointed under out_dir/checkpoints so an interrupted run
// resumes without recomputing, and every rejection is recorded in the
// manifest (JSONL {id, stage, verdict, reason, score}).
PipelineResult run_pipeline(const std::vector<RtlScript>& scripts, const GoldenSet& goldens,
                            const PipelineConfig& config, const std::filesystem::path& out_dir,
                            EmbeddingProvider* embedder_override = nullptr);

}  // namespace rtlforge::corpus
