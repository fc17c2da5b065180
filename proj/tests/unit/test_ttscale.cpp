#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rtlforge/ttscale.hpp"
#include "support/mock_llm.hpp"

using namespace rtlforge;
using testsupport::MockEndpoint;
using testsupport::MockReply;
using testsupport::MockRequest;

namespace {

ttscale::ReasoningTrace trace_of(const std::string& prompt, const std::string& generated) {
    ttscale::ReasoningTrace trace;
    trace.transcript = prompt + generated;
    trace.prompt_len = prompt.size();
    return trace;
}

const char* kCorrectiveHead = "Wait, my reasoning must be incorrect.";

}  // namespace

TEST_CASE("corrective prompt renders byte-exactly") {
    ttscale::CorrectivePrompt prompt;
    prompt.rules = {"Rule A", "Rule B"};
    CHECK(prompt.render() ==
          "Wait, my reasoning must be incorrect. Let's check the reasoning rules: "
          "1. Rule A 2. Rule B. Wait, I did not follow the rules. Let's try again.");

    ttscale::CorrectivePrompt empty;
    CHECK(empty.render().find("1. Carefully implement output signals based on their timing "
                              "requirements.") != std::string::npos);
}

TEST_CASE("extract_solution") {
    auto tagged =
        trace_of("P", "thinking</think><answer>module m; endmodule</answer>");
    auto sol = ttscale::extract_solution(tagged);
    REQUIRE(sol);
    CHECK(*sol == "module m; endmodule");

    CHECK_FALSE(ttscale::extract_solution(trace_of("P", "no delimiter at all")));

    // two delimiters: the code after the FIRST wins
    auto twice = trace_of(
        "P", "r1</think><answer>A1</answer> tail</think><answer>A2</answer>");
    auto sol2 = ttscale::extract_solution(twice);
    REQUIRE(sol2);
    CHECK(*sol2 == "A1");

    // fenced, untagged code region
    auto fenced = trace_of("P", "r</think>\n```verilog\nmodule f; endmodule\n```\n");
    auto sol3 = ttscale::extract_solution(fenced);
    REQUIRE(sol3);
    CHECK(*sol3 == "module f; endmodule");

    // delimiter but nothing after it
    CHECK_FALSE(ttscale::extract_solution(trace_of("P", "reasoning</think>   \n")));
}

TEST_CASE("extract_solution ignores a delimiter inside the prompt region") {
    auto trace = trace_of("prompt with </think> inside", "gen</think>CODE");
    auto sol = ttscale::extract_solution(trace);
    REQUIRE(sol);
    CHECK(*sol == "CODE");
}

TEST_CASE("splice_corrective replaces everything from the delimiter on") {
    ttscale::CorrectivePrompt prompt;
    prompt.rules = {"Rule A", "Rule B"};

    auto spliced = ttscale::splice_corrective(trace_of("P ", "R1</think>CODE"), prompt);
    CHECK_FALSE(spliced.no_delimiter);
    CHECK(spliced.trace.transcript == "P R1" + prompt.render());

    // delimiter at position 0 of the generated region: everything generated goes
    auto zero = ttscale::splice_corrective(trace_of("P ", "</think>CODE"), prompt);
    CHECK(zero.trace.transcript == "P " + prompt.render());

    // rendered rules list
    CHECK(spliced.trace.transcript.find("Let's check the reasoning rules: 1. Rule A 2. Rule B.") !=
          std::string::npos);

    // splice safety: no delimiter survives before new generation starts
    CHECK(spliced.trace.transcript.find("</think>", spliced.trace.prompt_len) ==
          std::string::npos);
}

TEST_CASE("splice fallback when the delimiter is missing") {
    ttscale::CorrectivePrompt prompt;
    auto fallback = ttscale::splice_corrective(trace_of("P ", "ran out of tokens"), prompt);
    CHECK(fallback.no_delimiter);
    CHECK(fallback.trace.transcript == "P ran out of tokens" + prompt.render());
}

TEST_CASE("truncate_reasoning replaces the chosen Wait with the delimiter") {
    std::string generated = "First thought. Wait, check A. Wait, check B. Wait, done. tail";
    auto t0 = ttscale::truncate_reasoning(trace_of("P ", generated), 0);
    REQUIRE(t0.truncated);
    CHECK(t0.trace.transcript == "P First thought. </think>");

    auto t1 = ttscale::truncate_reasoning(trace_of("P ", generated), 1);
    REQUIRE(t1.truncated);
    CHECK(t1.trace.transcript == "P First thought. Wait, check A. </think>");

    // strictly fewer reasoning tokens after truncation
    CHECK(ttscale::reasoning_token_count(t0.trace) <
          ttscale::reasoning_token_count(trace_of("P ", generated)));
    CHECK(ttscale::reasoning_token_count(t0.trace) <
          ttscale::reasoning_token_count(t1.trace));
}

TEST_CASE("truncate_reasoning: no standalone Wait -> unchanged with flag") {
    auto none = ttscale::truncate_reasoning(trace_of("P ", "no waits here at all"), 0);
    CHECK_FALSE(none.truncated);
    CHECK(none.trace.transcript == "P no waits here at all");

    // mid-sentence or embedded "Wait" is not a sentence-start keyword
    auto embedded = ttscale::truncate_reasoning(
        trace_of("P ", "please Wait a moment; the Waiter arrives"), 0);
    CHECK_FALSE(embedded.truncated);

    // newline counts as a sentence start
    auto newline = ttscale::truncate_reasoning(trace_of("P ", "line one\nWait, rethink"), 0);
    CHECK(newline.truncated);
    CHECK(newline.trace.transcript == "P line one\n</think>");
}

namespace {

// scripted model: fresh prompt -> reasoning with a BAD answer; once the
// corrective prompt appears once -> GOOD answer after more reasoning
MockEndpoint make_scripted_mock() {
    return MockEndpoint([](const MockRequest& req) {
        MockReply reply;
        std::size_t correctives = 0;
        for (std::size_t pos = 0; (pos = req.prompt.find(kCorrectiveHead, pos)) !=
                                  std::string::npos;
             pos += 4)
            ++correctives;
        if (correctives == 0) {
            reply.text = " step one. Wait, maybe. Wait, sure.</think><answer>BAD</answer>";
        } else {
            reply.text = " deeper thought.</think><answer>GOOD</answer>";
        }
        return reply;
    });
}

}  // namespace

TEST_CASE("run_scaled: fail then succeed, byte-exact transcript") {
    auto mock = make_scripted_mock();
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);

    ttscale::ScaleConfig scale;
    scale.max_iterations = 2;
    scale.limits = {16384, 32768, 49152};
    ttscale::Verifier verifier = [](const std::string& s) { return s == "GOOD"; };

    auto outcome = ttscale::run_scaled("PROBLEM:", client, verifier, {"Rule A"}, scale);
    CHECK(outcome.solved);
    REQUIRE(outcome.attempts.size() == 2);  // iterations executed + 1
    CHECK(outcome.attempts[0].verdict == ttscale::AttemptVerdict::Incorrect);
    CHECK(outcome.attempts[1].verdict == ttscale::AttemptVerdict::Correct);
    CHECK(outcome.model_calls == 2);
    CHECK(outcome.final_solution == "GOOD");

    // token limits per pass
    CHECK(outcome.final_trace.token_limits_used ==
          std::vector<std::uint32_t>{16384, 32768});

    // hand-computed transcript: prompt + kept reasoning + corrective + new text
    ttscale::CorrectivePrompt corrective;
    corrective.rules = {"Rule A"};
    std::string expected = std::string("PROBLEM:") + " step one. Wait, maybe. Wait, sure." +
                           corrective.render() + " deeper thought.</think><answer>GOOD</answer>";
    CHECK(outcome.final_trace.transcript == expected);

    // monotone reasoning length across corrective iterations
    CHECK(outcome.attempts[1].reasoning_tokens >= outcome.attempts[0].reasoning_tokens);
}

TEST_CASE("run_scaled: immediate success does one call and no splice") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.text = "quick</think><answer>GOOD</answer>";
        return reply;
    });
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);
    ttscale::Verifier verifier = [](const std::string& s) { return s == "GOOD"; };
    ttscale::ScaleConfig scale;

    auto outcome = ttscale::run_scaled("P", client, verifier, {}, scale);
    CHECK(outcome.solved);
    CHECK(outcome.attempts.size() == 1);
    CHECK(outcome.model_calls == 1);
    CHECK(mock.hit_count() == 1);
}

TEST_CASE("run_scaled: T=0 behaves as single-pass inference") {
    auto mock = make_scripted_mock();
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);
    ttscale::Verifier verifier = [](const std::string& s) { return s == "GOOD"; };
    ttscale::ScaleConfig scale;
    scale.max_iterations = 0;

    auto outcome = ttscale::run_scaled("P", client, verifier, {}, scale);
    CHECK_FALSE(outcome.solved);
    CHECK(outcome.attempts.size() == 1);
    CHECK(outcome.model_calls == 1);
}

TEST_CASE("run_scaled: at most T+1 model calls when nothing ever passes") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.text = "r</think><answer>NOPE</answer>";
        return reply;
    });
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);
    ttscale::Verifier verifier = [](const std::string&) { return false; };
    ttscale::ScaleConfig scale;
    scale.max_iterations = 2;

    auto outcome = ttscale::run_scaled("P", client, verifier, {}, scale);
    CHECK_FALSE(outcome.solved);
    CHECK(outcome.model_calls == 3);
    CHECK(mock.hit_count() == 3);
    CHECK(outcome.attempts.size() == 3);
}

TEST_CASE("run_scaled: length overrun without delimiter uses the fallback") {
    MockEndpoint mock([](const MockRequest& req) {
        MockReply reply;
        if (req.prompt.find(kCorrectiveHead) == std::string::npos) {
            reply.text = " unterminated reasoning";   // no </think>
            reply.finish_reason = "length";
        } else {
            reply.text = " fixed</think><answer>GOOD</answer>";
        }
        return reply;
    });
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);
    ttscale::Verifier verifier = [](const std::string& s) { return s == "GOOD"; };
    ttscale::ScaleConfig scale;
    scale.max_iterations = 1;
    scale.limits = {64, 128};

    auto outcome = ttscale::run_scaled("P", client, verifier, {}, scale);
    CHECK(outcome.solved);
    CHECK(outcome.attempts[0].verdict == ttscale::AttemptVerdict::NoSolution);
    // the corrective prompt was appended directly to the unterminated trace
    auto requests = mock.requests();
    REQUIRE(requests.size() == 2);
    CHECK(requests[1].prompt.find("P unterminated reasoning" + std::string(kCorrectiveHead).substr(0, 4)) !=
          std::string::npos);
}

TEST_CASE("bare-Wait ablation splices just the keyword") {
    MockEndpoint mock([](const MockRequest& req) {
        MockReply reply;
        // the ablated model just repeats its earlier (wrong) conclusion
        reply.text = req.prompt.ends_with("Wait")
                         ? ", as established.</think><answer>BAD</answer>"
                         : "first pass</think><answer>BAD</answer>";
        return reply;
    });
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);
    ttscale::Verifier verifier = [](const std::string& s) { return s == "GOOD"; };
    ttscale::ScaleConfig scale;
    scale.max_iterations = 1;
    scale.bare_wait_ablation = true;

    auto outcome = ttscale::run_scaled("P ", client, verifier, {"unused rule"}, scale);
    CHECK_FALSE(outcome.solved);
    auto requests = mock.requests();
    REQUIRE(requests.size() == 2);
    CHECK(requests[1].prompt == "P first passWait");
    CHECK(requests[1].prompt.find("Wait, my reasoning must be incorrect.") ==
          std::string::npos);
}

TEST_CASE("run_scaled: verifier failure aborts the problem") {
    auto mock = make_scripted_mock();
    llm::ClientConfig config;
    config.endpoint = mock.url();
    llm::Client client(config);
    ttscale::Verifier verifier = [](const std::string&) -> bool {
        throw std::runtime_error("simulator missing");
    };
    ttscale::ScaleConfig scale;
    CHECK_THROWS_WITH_AS(ttscale::run_scaled("P", client, verifier, {}, scale),
                         "simulator missing", std::runtime_error);
}
