#include "rtlforge/ttscale.hpp"

#include <cctype>

#include "rtlforge/cotgen.hpp"
#include "rtlforge/ngram.hpp"
#include "rtlforge/rules.hpp"
#include "rtlforge/util.hpp"

namespace rtlforge::ttscale {

namespace {

constexpr std::string_view kThinkClose = "</think>";

}  // namespace

std::optional<std::size_t> ReasoningTrace::think_close_pos() const {
    auto pos = transcript.find(kThinkClose, prompt_len);
    if (pos == std::string::npos) return std::nullopt;
    return pos;
}

std::string CorrectivePrompt::render() const {
    std::string numbered;
    std::vector<std::string> effective = rules;
    if (effective.empty()) effective.push_back(rules::fallback_rule());
    for (std::size_t i = 0; i < effective.size(); ++i) {
        if (i) numbered += " ";
        numbered += std::to_string(i + 1) + ". " + effective[i];
    }
    return "Wait, my reasoning must be incorrect. Let's check the reasoning rules: " + numbered +
           ". Wait, I did not follow the rules. Let's try again.";
}

std::optional<std::string> extract_solution(const ReasoningTrace& trace) {
    auto close = trace.think_close_pos();
    if (!close) return std::nullopt;
    std::string_view tail =
        std::string_view(trace.transcript).substr(*close + kThinkClose.size());
    auto open = tail.find("<answer>");
    if (open != std::string_view::npos) {
        auto end = tail.find("</answer>", open + 8);
        if (end != std::string_view::npos) {
            std::string body = cotgen::strip_code_fence(tail.substr(open + 8, end - open - 8));
            if (!body.empty()) return body;
            return std::nullopt;
        }
    }
    std::string stripped = cotgen::strip_code_fence(tail);
    if (stripped.empty()) return std::nullopt;
    return stripped;
}

SpliceResult splice_at_delimiter(const ReasoningTrace& trace, std::string_view text) {
    SpliceResult out;
    out.trace = trace;
    auto close = trace.think_close_pos();
    if (close) {
        out.trace.transcript.resize(*close);
    } else {
        out.no_delimiter = true;  // token limit ran out mid-reasoning
    }
    out.trace.transcript += text;
    return out;
}

SpliceResult splice_corrective(const ReasoningTrace& trace, const CorrectivePrompt& prompt) {
    return splice_at_delimiter(trace, prompt.render());
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// standalone "Wait" starting a sentence: preceded by nothing or whitespace
// whose nearest non-whitespace is ., !, ? or a line break; followed by a
// non-word character
std::vector<std::size_t> wait_positions(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while ((pos = text.find("Wait", pos)) != std::string_view::npos) {
        bool start_ok = false;
        if (pos == 0) {
            start_ok = true;
        } else if (std::isspace(static_cast<unsigned char>(text[pos - 1]))) {
            std::size_t back = pos;
            bool crossed_newline = false;
            while (back > 0 && std::isspace(static_cast<unsigned char>(text[back - 1]))) {
                if (text[back - 1] == '\n') crossed_newline = true;
                --back;
            }
            if (back == 0 || crossed_newline) {
                start_ok = true;
            } else {
                char prev = text[back - 1];
                start_ok = prev == '.' || prev == '!' || prev == '?';
            }
        }
        bool end_ok = pos + 4 >= text.size() || !is_word_char(text[pos + 4]);
        if (start_ok && end_ok) out.push_back(pos);
        pos += 4;
    }
    return out;
}

}  // namespace

TruncateResult truncate_reasoning(const ReasoningTrace& trace, std::uint32_t keep_waits) {
    TruncateResult out;
    out.trace = trace;
    auto waits = wait_positions(trace.generated());
    if (waits.size() < keep_waits + 1) {
        return out;  // NotEnoughWaits: unchanged, truncated stays false
    }
    std::size_t cut = trace.prompt_len + waits[keep_waits];
    out.trace.transcript.resize(cut);
    out.trace.transcript += kThinkClose;
    out.truncated = true;
    return out;
}

std::uint64_t reasoning_token_count(const ReasoningTrace& trace) {
    auto close = trace.think_close_pos();
    std::size_t end = close ? *close : trace.transcript.size();
    std::string_view reasoning =
        std::string_view(trace.transcript).substr(trace.prompt_len, end - trace.prompt_len);
    return ngram::lex_rtl(reasoning).size();
}

ScaleOutcome run_scaled(const std::string& problem_prompt, llm::Client& client,
                        const Verifier& verifier, const std::vector<std::string>& rules,
                        const ScaleConfig& config) {
    if (config.limits.size() < config.max_iterations + 1)
        throw std::invalid_argument("need at least T+1 token limits");

    ScaleOutcome outcome;
    ReasoningTrace trace;
    trace.transcript = problem_prompt;
    trace.prompt_len = problem_prompt.size();

    auto infer = [&](std::uint32_t limit, llm::GenMode mode) {
        llm::GenRequest req;
        req.prompt_text = trace.transcript;
        req.max_tokens = limit;
        req.temperature = config.temperature;
        req.mode = mode;
        auto resp = client.generate(req);
        trace.transcript += resp.text;
        trace.token_limits_used.push_back(limit);
        ++outcome.model_calls;
    };

    auto attempt_pass = [&](std::uint32_t iteration) {
        Attempt attempt;
        attempt.iteration = iteration;
        attempt.solution = extract_solution(trace);
        attempt.reasoning_tokens = reasoning_token_count(trace);
        attempt.transcript = trace.transcript;
        if (!attempt.solution) {
            attempt.verdict = AttemptVerdict::NoSolution;
        } else {
            try {
                attempt.verdict = verifier(*attempt.solution) ? AttemptVerdict::Correct
                                                              : AttemptVerdict::Incorrect;
            } catch (const std::exception& e) {
                attempt.verdict = AttemptVerdict::Error;
                attempt.diagnostics = e.what();
                outcome.attempts.push_back(attempt);
                throw;
            }
        }
        outcome.attempts.push_back(attempt);
        return attempt.verdict == AttemptVerdict::Correct;
    };

    infer(config.limits[0], llm::GenMode::Fresh);
    bool correct = attempt_pass(0);

    std::uint32_t t = 0;
    while (t < config.max_iterations && !correct) {
        SpliceResult spliced;
        if (config.bare_wait_ablation) {
            spliced = splice_at_delimiter(trace, "Wait");
        } else {
            CorrectivePrompt corrective;
            corrective.rules = rules;
            spliced = splice_corrective(trace, corrective);
        }
        trace = std::move(spliced.trace);
        trace.iteration = t + 1;
        infer(config.limits[t + 1], llm::GenMode::Continuation);
        correct = attempt_pass(t + 1);
        ++t;
    }

    outcome.final_trace = trace;
    outcome.final_solution = outcome.attempts.back().solution;
    outcome.solved = correct;
    return outcome;
}

}  // namespace rtlforge::ttscale
