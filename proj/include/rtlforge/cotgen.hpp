#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rtlforge/corpus.hpp"
#include "rtlforge/llmclient.hpp"

namespace rtlforge::cotgen {

struct Specification {
    std::string problem_text;      // body between <PROBLEM> and </PROBLEM>, trimmed
    std::string source_script_id;
};

struct CotTriple {
    Specification spec;
    std::string reasoning;  // body of <think>...</think>
    std::string solution;   // body of <answer>...</answer>, outer code fence stripped
    struct Meta {
        std::string model_id;
        std::uint64_t reasoning_lexical_tokens = 0;
        std::uint64_t solution_lexical_tokens = 0;
        std::uint64_t endpoint_completion_tokens = 0;
    } meta;
};

// step 1: script -> problem prompt (slot {code}); throws
// prompts::TemplateSlotMissing if a custom template lost the slot.
std::string render_problem_prompt(const std::string& script_text,
                                  const std::string& template_override = {});

struct ProblemExtract {
    bool ok = false;
    Specification spec;
    bool multiple_pairs = false;  // tolerated; first well-formed pair wins
};
ProblemExtract extract_problem(std::string_view response);

// step 2: spec + reference -> solution prompt (slots {reference_code}, {problem})
std::string render_solution_prompt(const Specification& spec, const std::string& reference_code,
                                   const std::string& template_override = {});

enum class TripleError { None, MissingThink, MissingAnswer, SyntaxRejected };
const char* triple_error_name(TripleError e);

struct TripleExtract {
    TripleError error = TripleError::None;
    std::string diagnostic;
    std::optional<CotTriple> triple;
    bool ok() const { return error == TripleError::None; }
};
// Syntax of the solution is validated with the library parser; triples whose
// answer does not parse are rejected, not emitted.
TripleExtract extract_triple(std::string_view response, const Specification& spec);

// strips one outer ``` fence pair (language tag allowed on the opening line)
std::string strip_code_fence(std::string_view text);

struct SynthesisConfig {
    std::filesystem::path out_file;          // dataset JSONL
    std::filesystem::path checkpoint_file;   // per-script outcomes, resume key
    std::string model_id = "unknown";
    std::uint32_t problem_max_tokens = 2048;
    std::uint32_t solution_max_tokens = 65536;
    double temperature = 0.6;
    int samples_per_script = 1;
    bool retry_failed_once = true;
    double decontam_threshold = 0.8;  // emission-time re-check against goldens
};

struct SynthesisStats {
    std::uint64_t attempted_scripts = 0;
    std::uint64_t emitted_triples = 0;
    std::uint64_t rejected_count = 0;
    std::uint64_t client_errors = 0;
    std::uint64_t resumed_skips = 0;
};

// Two-step generation over a curated corpus. Per-script failures are recorded
// and the run continues; interruption resumes via the id-keyed checkpoint.
SynthesisStats synthesize_dataset(const std::vector<corpus::RtlScript>& scripts,
                                  llm::Client& client, const corpus::GoldenSet& goldens,
                                  const SynthesisConfig& config);

}  // namespace rtlforge::cotgen
