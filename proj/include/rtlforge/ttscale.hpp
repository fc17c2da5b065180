#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtlforge/llmclient.hpp"

namespace rtlforge::ttscale {

struct ReasoningTrace {
    std::string transcript;       // prompt followed by everything generated
    std::size_t prompt_len = 0;   // boundary of the original problem prompt
    std::uint32_t iteration = 0;
    std::vector<std::uint32_t> token_limits_used;

    // first "</think>" at or after the prompt region
    std::optional<std::size_t> think_close_pos() const;
    std::string_view generated() const {
        return std::string_view(transcript).substr(prompt_len);
    }
};

struct CorrectivePrompt {
    std::vector<std::string> rules;

    // byte-exact: Wait, my reasoning must be incorrect. Let's check the
    // reasoning rules: {R}. Wait, I did not follow the rules. Let's try
    // again.  {R} is rendered as "1. <rule> 2. <rule> ..."
    std::string render() const;
};

// code region after the first "</think>": <answer> body, else fenced block,
// else the trimmed tail; std::nullopt when there is no delimiter or no code
// follows (Absent is a value, not an error).
std::optional<std::string> extract_solution(const ReasoningTrace& trace);

struct SpliceResult {
    ReasoningTrace trace;
    bool no_delimiter = false;  // fallback applied: corrective appended at the end
};
// Removes everything from "</think>" (inclusive) onward and appends `text`.
SpliceResult splice_at_delimiter(const ReasoningTrace& trace, std::string_view text);
// Same, with the rendered corrective prompt. Iteration is left for the
// driver to bump.
SpliceResult splice_corrective(const ReasoningTrace& trace, const CorrectivePrompt& prompt);

struct TruncateResult {
    ReasoningTrace trace;
    bool truncated = false;  // false: NotEnoughWaits, trace returned unchanged
};
// Replaces the (keep_waits+1)-th standalone sentence-initial "Wait" in the
// generated region with "</think>" and drops everything after it, producing
// the downgraded short-reasoning variants.
TruncateResult truncate_reasoning(const ReasoningTrace& trace, std::uint32_t keep_waits);

// lexical token count of the reasoning region (generated text before the
// delimiter, or all generated text when the delimiter is absent)
std::uint64_t reasoning_token_count(const ReasoningTrace& trace);

enum class AttemptVerdict { Correct, Incorrect, NoSolution, Error };

struct Attempt {
    std::uint32_t iteration = 0;
    std::optional<std::string> solution;
    AttemptVerdict verdict = AttemptVerdict::NoSolution;
    std::uint64_t reasoning_tokens = 0;
    std::string diagnostics;
    std::string transcript;  // full trace at this attempt; splices rewrite later ones
};

struct ScaleOutcome {
    ReasoningTrace final_trace;
    std::optional<std::string> final_solution;
    std::vector<Attempt> attempts;  // size == corrective iterations executed + 1
    bool solved = false;
    std::uint32_t model_calls = 0;
};

// IsCorrect oracle; throws to signal VerifierUnavailable, which aborts the
// problem.
using Verifier = std::function<bool(const std::string& solution)>;

struct ScaleConfig {
    std::uint32_t max_iterations = 2;                          // T
    std::vector<std::uint32_t> limits = {16384, 32768, 49152}; // pass i uses limits[i]
    double temperature = 0.2;
    // ablation only: splice a bare "Wait" instead of the corrective prompt.
    // Tends to reproduce the previous conclusion rather than rethink it, so
    // it stays off outside experiments.
    bool bare_wait_ablation = false;
};

// Algorithm: infer, extract, verify; while failing and t < T, cut the trace
// at "</think>", append the corrective prompt, re-infer with the next token
// limit. At most T+1 model calls.
ScaleOutcome run_scaled(const std::string& problem_prompt, llm::Client& client,
                        const Verifier& verifier, const std::vector<std::string>& rules,
                        const ScaleConfig& config);

}  // namespace rtlforge::ttscale
