#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rtlforge/cotgen.hpp"
#include "rtlforge/util.hpp"
#include "support/mock_llm.hpp"
#include "support/temp_dir.hpp"

using namespace rtlforge;
using testsupport::MockEndpoint;
using testsupport::MockReply;
using testsupport::MockRequest;
using testsupport::TempDir;

TEST_CASE("render_problem_prompt embeds the script once") {
    std::string script = "module m; endmodule";
    auto prompt = cotgen::render_problem_prompt(script);
    auto first = prompt.find(script);
    REQUIRE(first != std::string::npos);
    CHECK(prompt.find(script, first + 1) == std::string::npos);
    CHECK(prompt.find("Do not include the code snippet in the problem") != std::string::npos);
}

TEST_CASE("render_problem_prompt tolerates an empty script") {
    auto prompt = cotgen::render_problem_prompt("");
    CHECK(prompt.find("Code snippet for inspiration:\n\n") != std::string::npos);
}

TEST_CASE("extract_problem basics") {
    auto ok = cotgen::extract_problem("<PROBLEM>Build a counter that counts from 0 to 999, "
                                      "inclusive, with a period of 1000 cycles.</PROBLEM>");
    REQUIRE(ok.ok);
    CHECK(ok.spec.problem_text ==
          "Build a counter that counts from 0 to 999, inclusive, with a period of 1000 cycles.");

    CHECK_FALSE(cotgen::extract_problem("no tags at all").ok);
    CHECK_FALSE(cotgen::extract_problem("<PROBLEM>never closed").ok);
}

TEST_CASE("extract_problem trims and takes the first well-formed pair") {
    auto padded = cotgen::extract_problem("<PROBLEM>\n  body text  \n</PROBLEM>");
    REQUIRE(padded.ok);
    CHECK(padded.spec.problem_text == "body text");

    // nested stray open tag stays in the body
    auto nested =
        cotgen::extract_problem("<PROBLEM>outer <PROBLEM>inner</PROBLEM> ignored</PROBLEM>");
    REQUIRE(nested.ok);
    CHECK(nested.spec.problem_text == "outer <PROBLEM>inner");

    auto multi = cotgen::extract_problem(
        "<PROBLEM>first</PROBLEM> then <PROBLEM>second</PROBLEM>");
    REQUIRE(multi.ok);
    CHECK(multi.spec.problem_text == "first");
    CHECK(multi.multiple_pairs);
}

TEST_CASE("render_solution_prompt fills both slots exactly once") {
    cotgen::Specification spec;
    spec.problem_text = "Design a widget.";
    std::string reference = "module ref; endmodule";
    auto prompt = cotgen::render_solution_prompt(spec, reference);
    auto p1 = prompt.find(spec.problem_text);
    REQUIRE(p1 != std::string::npos);
    CHECK(prompt.find(spec.problem_text, p1 + 1) == std::string::npos);
    auto r1 = prompt.find(reference);
    REQUIRE(r1 != std::string::npos);
    CHECK(prompt.find(reference, r1 + 1) == std::string::npos);
    CHECK(prompt.find("use it only as a reference") != std::string::npos);
    CHECK(prompt.find("enclosed within <answer> </answer> tags") != std::string::npos);
}

TEST_CASE("no double substitution when the spec contains a slot literal") {
    cotgen::Specification spec;
    spec.problem_text = "tricky {problem} inside";
    auto prompt = cotgen::render_solution_prompt(spec, "ref");
    CHECK(prompt.find("tricky {problem} inside") != std::string::npos);
}

TEST_CASE("strip_code_fence") {
    CHECK(cotgen::strip_code_fence("```verilog\nmodule m; endmodule\n```") ==
          "module m; endmodule");
    CHECK(cotgen::strip_code_fence("```\nx\n```") == "x");
    CHECK(cotgen::strip_code_fence("no fences") == "no fences");
    // only one outer pair comes off
    CHECK(cotgen::strip_code_fence("```\n```\ninner\n```\n```") == "```\ninner\n```");
}

TEST_CASE("extract_triple happy path and failures") {
    cotgen::Specification spec;
    spec.problem_text = "p";
    auto ok = cotgen::extract_triple(
        "<think>steps</think><answer>module m; endmodule</answer>", spec);
    REQUIRE(ok.ok());
    CHECK(ok.triple->reasoning == "steps");
    CHECK(ok.triple->solution == "module m; endmodule");

    auto missing_think = cotgen::extract_triple("<answer>module m; endmodule</answer>", spec);
    CHECK(missing_think.error == cotgen::TripleError::MissingThink);

    auto truncated = cotgen::extract_triple("<think>steps", spec);
    CHECK(truncated.error == cotgen::TripleError::MissingThink);

    auto missing_answer = cotgen::extract_triple("<think>steps</think> and nothing else", spec);
    CHECK(missing_answer.error == cotgen::TripleError::MissingAnswer);

    auto broken = cotgen::extract_triple(
        "<think>steps</think><answer>module m; endmodul</answer>", spec);
    CHECK(broken.error == cotgen::TripleError::SyntaxRejected);
    CHECK_FALSE(broken.diagnostic.empty());
}

TEST_CASE("extract_triple strips fenced answers") {
    cotgen::Specification spec;
    auto fenced = cotgen::extract_triple(
        "<think>r</think><answer>\n```verilog\nmodule m; endmodule\n```\n</answer>", spec);
    REQUIRE(fenced.ok());
    CHECK(fenced.triple->solution == "module m; endmodule");
}

TEST_CASE("extraction round-trip recovers injected content byte-exactly") {
    std::mt19937 rng(42);
    auto random_reasoning = [&]() {
        static const char* words[] = {"alpha", "beta",  "Wait",   "{",      "}",
                                      "<think", "<answer", "`tick", "line\n", "  "};
        std::string out;
        int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            out += words[rng() % 10];
            out += ' ';
        }
        return out;
    };
    auto random_solution = [&]() {
        std::string name = "m" + std::to_string(rng() % 1000);
        std::string out = "module " + name + "(input a, output b";
        int extra = static_cast<int>(rng() % 3);
        for (int i = 0; i < extra; ++i) out += ", output c" + std::to_string(i);
        out += ");\nassign b = a;\n";
        for (int i = 0; i < extra; ++i)
            out += "assign c" + std::to_string(i) + " = ~a;\n";
        out += "endmodule";
        return out;
    };
    for (int round = 0; round < 100; ++round) {
        std::string reasoning = random_reasoning();
        std::string solution = random_solution();
        bool fence = round % 3 == 0;
        std::string wrapped =
            fence ? "```verilog\n" + solution + "\n```" : solution;
        std::string response = "<think>" + reasoning + "</think>\n<answer>" + wrapped +
                               "</answer>";
        cotgen::Specification spec;
        auto extract = cotgen::extract_triple(response, spec);
        REQUIRE_MESSAGE(extract.ok(), extract.diagnostic);
        CHECK(extract.triple->reasoning == reasoning);
        CHECK(extract.triple->solution == solution);
    }
}

namespace {

corpus::RtlScript fixture_script(int i) {
    return corpus::make_script("module src" + std::to_string(i) + "(input a, output b);\n"
                               "assign b = a;\nendmodule\n");
}

}  // namespace

TEST_CASE("synthesize_dataset with a scripted mock") {
    TempDir dir;
    // step 1 answers a <PROBLEM>, step 2 answers a triple; script 2's answer
    // is planted broken (twice, so the retry also fails)
    MockEndpoint mock([](const MockRequest& req) {
        MockReply reply;
        if (req.prompt.find("create a high-quality Verilog problem") != std::string::npos) {
            std::string tag = "s0";
            if (req.prompt.find("src1") != std::string::npos) tag = "s1";
            if (req.prompt.find("src2") != std::string::npos) tag = "s2";
            reply.text = "<PROBLEM>Implement gizmo " + tag + ".</PROBLEM>";
            return reply;
        }
        if (req.prompt.find("gizmo s2") != std::string::npos) {
            reply.text = "<think>hm</think><answer>module z; endmodul</answer>";
            return reply;
        }
        reply.text = "<think>plan</think><answer>module z(input a, output b); "
                     "assign b = a; endmodule</answer>";
        return reply;
    });
    llm::ClientConfig client_config;
    client_config.endpoint = mock.url();
    client_config.backoff_base_ms = 1;
    llm::Client client(client_config);

    std::vector<corpus::RtlScript> scripts = {fixture_script(0), fixture_script(1),
                                              fixture_script(2)};
    cotgen::SynthesisConfig config;
    config.out_file = dir.path / "dataset.jsonl";
    config.checkpoint_file = dir.path / "ckpt.jsonl";

    auto stats = cotgen::synthesize_dataset(scripts, client, {}, config);
    CHECK(stats.attempted_scripts == 3);
    CHECK(stats.emitted_triples == 2);
    CHECK(stats.rejected_count == 1);
    CHECK(stats.emitted_triples + stats.rejected_count == stats.attempted_scripts);

    // resume: nothing is re-attempted, no duplicate triples
    auto resumed = cotgen::synthesize_dataset(scripts, client, {}, config);
    CHECK(resumed.attempted_scripts == 0);
    CHECK(resumed.resumed_skips == 3);
    auto dataset = util::read_file(config.out_file);
    CHECK(std::count(dataset.begin(), dataset.end(), '\n') == 2);
}

TEST_CASE("pipeline under a scripted mock is byte-reproducible") {
    MockEndpoint mock([](const MockRequest& req) {
        MockReply reply;
        if (req.prompt.find("create a high-quality Verilog problem") != std::string::npos) {
            reply.text = "<PROBLEM>Deterministic problem.</PROBLEM>";
        } else {
            reply.text = "<think>same steps</think><answer>module d(input a, output b); "
                         "assign b = a; endmodule</answer>";
        }
        reply.completion_tokens = 7;
        return reply;
    });
    llm::ClientConfig client_config;
    client_config.endpoint = mock.url();
    client_config.max_in_flight = 1;

    std::vector<corpus::RtlScript> scripts = {fixture_script(0), fixture_script(1)};
    std::string first, second;
    for (std::string* out : {&first, &second}) {
        TempDir dir;
        llm::Client client(client_config);
        cotgen::SynthesisConfig config;
        config.out_file = dir.path / "dataset.jsonl";
        config.checkpoint_file = dir.path / "ckpt.jsonl";
        cotgen::synthesize_dataset(scripts, client, {}, config);
        *out = util::read_file(config.out_file);
    }
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("synthesize_dataset rejects contaminated solutions at emission") {
    TempDir dir;
    std::string golden_text = "module gold(input a, output b);\nassign b = a & a;\nendmodule\n";
    MockEndpoint mock([&](const MockRequest& req) {
        MockReply reply;
        if (req.prompt.find("create a high-quality Verilog problem") != std::string::npos) {
            reply.text = "<PROBLEM>p</PROBLEM>";
        } else {
            reply.text = "<think>r</think><answer>" + golden_text + "</answer>";
        }
        return reply;
    });
    llm::ClientConfig client_config;
    client_config.endpoint = mock.url();
    llm::Client client(client_config);

    corpus::GoldenSet goldens;
    corpus::GoldenEntry entry;
    entry.benchmark_id = "b";
    entry.problem_id = "p";
    entry.shingles = ngram::shingles5(ngram::lex_rtl(golden_text));
    goldens.entries.push_back(std::move(entry));

    cotgen::SynthesisConfig config;
    config.out_file = dir.path / "dataset.jsonl";
    config.checkpoint_file = dir.path / "ckpt.jsonl";
    config.retry_failed_once = false;

    auto stats = cotgen::synthesize_dataset({fixture_script(7)}, client, goldens, config);
    CHECK(stats.emitted_triples == 0);
    CHECK(stats.rejected_count == 1);
    CHECK_FALSE(std::filesystem::exists(config.out_file));
}
