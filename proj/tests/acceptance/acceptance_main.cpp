// Acceptance suite: runs each top-level criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the number of
// failures.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "rtlforge/bencheval.hpp"
#include "rtlforge/corpus.hpp"
#include "rtlforge/cotgen.hpp"
#include "rtlforge/llmclient.hpp"
#include "rtlforge/sftpack.hpp"
#include "rtlforge/ttscale.hpp"
#include "rtlforge/util.hpp"
#include "support/mock_llm.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace rtlforge;
using testsupport::MockEndpoint;
using testsupport::MockReply;
using testsupport::MockRequest;
using testsupport::TempDir;

namespace {

const std::filesystem::path kFixtures = RTLFORGE_FIXTURES_DIR;
const std::filesystem::path kRtlsim = RTLFORGE_RTLSIM_BIN;
const char* kValidatorCmd = RTLFORGE_RTLSIM_BIN " check {file}";

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<void(std::ostringstream&)> body;  // throws on failure
};

#define ACCEPT(cond, what)                                              \
    do {                                                                \
        if (!(cond)) throw std::runtime_error(std::string("check failed: ") + what); \
    } while (0)

std::string simple_module(const std::string& name, int flavor) {
    std::string body;
    for (int i = 0; i < 4; ++i) {
        body += "  assign o" + std::to_string(i) + "_" + name + " = i" + std::to_string(i) +
                "_" + name + (flavor % 2 ? " & " : " | ") + "k" + std::to_string(flavor) + ";\n";
    }
    return "module " + name + "(input i0_" + name + ", input i1_" + name + ", input i2_" +
           name + ", input i3_" + name + ", input k" + std::to_string(flavor) + ", output o0_" +
           name + ", output o1_" + name + ", output o2_" + name + ", output o3_" + name +
           ");\n" + body + "endmodule\n";
}

// ---- 1. pass@k oracle equivalence ----
void criterion_pass_at_k(std::ostringstream& detail) {
    std::uint64_t points = 0;
    double max_err = 0.0;
    for (std::uint32_t n = 1; n <= 12; ++n) {
        for (std::uint32_t c = 0; c <= n; ++c) {
            for (std::uint32_t k = 1; k <= n; ++k) {
                double expect = testsupport::pass_at_k_enumeration(n, c, k);
                double got = bencheval::pass_at_k(n, c, k);
                max_err = std::max(max_err, std::fabs(got - expect));
                ACCEPT(std::fabs(got - expect) <= 1e-12,
                       "n=" + std::to_string(n) + " c=" + std::to_string(c) +
                           " k=" + std::to_string(k));
                ++points;
            }
        }
    }
    ACCEPT(std::fabs(bencheval::pass_at_k(10, 1, 5) - 0.5) <= 1e-12, "(10,1,5) -> 0.5");
    ACCEPT(std::fabs(bencheval::pass_at_k(10, 3, 5) - (1.0 - 21.0 / 252.0)) <= 1e-12,
           "(10,3,5) -> 1 - 21/252");
    detail << points << " (n,c,k) points, max |err| = " << max_err;
}

// ---- 2. Jaccard / decontamination soundness ----
void criterion_decontamination(std::ostringstream& detail) {
    std::vector<std::string> golden_texts;
    for (int g = 0; g < 3; ++g) {
        std::string golden = "module gold" + std::to_string(g) +
                             "(input clk, input rst, output reg [7:0] q);\n";
        for (int i = 0; i < 24; ++i) {
            golden += "  always @(posedge clk) q <= rst ? 8'd" + std::to_string(i + g) +
                      " : q + " + std::to_string(i) + ";\n";
        }
        golden += "endmodule\n";
        golden_texts.push_back(golden);
    }
    corpus::GoldenSet goldens;
    for (std::size_t g = 0; g < golden_texts.size(); ++g) {
        corpus::GoldenEntry entry;
        entry.benchmark_id = "fixture";
        entry.problem_id = "g" + std::to_string(g);
        entry.shingles = ngram::shingles5(ngram::lex_rtl(golden_texts[g]));
        goldens.entries.push_back(std::move(entry));
    }

    // 1,000 clean scripts plus verbatim and single-token-edit plants
    std::vector<corpus::RtlScript> clean;
    for (int i = 0; i < 1000; ++i)
        clean.push_back(corpus::make_script(simple_module("clean" + std::to_string(i), i)));

    std::vector<corpus::RtlScript> plants;
    for (const auto& g : golden_texts) {
        plants.push_back(corpus::make_script(g));  // verbatim
        std::string edited = g;
        auto pos = edited.find("q +");
        edited.replace(pos, 3, "q -");             // single-token edit
        plants.push_back(corpus::make_script(edited));
    }

    std::size_t rejected_plants = 0;
    for (const auto& plant : plants) {
        auto outcome = corpus::decontaminate(plant, goldens, 0.8);
        double oracle = 0.0;
        for (const auto& g : golden_texts)
            oracle = std::max(oracle, testsupport::jaccard_window_oracle(plant.text, g));
        ACCEPT(outcome.score == oracle, "plant score matches brute-force oracle exactly");
        ACCEPT(outcome.score > 0.8, "plant score > 0.8");
        if (!outcome.keep) ++rejected_plants;
    }
    ACCEPT(rejected_plants == plants.size(), "every plant rejected");

    std::size_t rejected_clean = 0;
    for (const auto& script : clean) {
        auto outcome = corpus::decontaminate(script, goldens, 0.8);
        double oracle = 0.0;
        for (const auto& g : golden_texts)
            oracle = std::max(oracle, testsupport::jaccard_window_oracle(script.text, g));
        ACCEPT(outcome.score == oracle, "clean score matches brute-force oracle exactly");
        if (!outcome.keep) ++rejected_clean;
    }
    ACCEPT(rejected_clean == 0, "zero clean scripts rejected");
    detail << plants.size() << " plants rejected, 0/" << clean.size() << " clean rejected";
}

// ---- 3. pipeline funnel fixture ----
void criterion_funnel(std::ostringstream& detail) {
    std::string golden = simple_module("funnel_gold", 3);
    corpus::GoldenSet goldens;
    {
        corpus::GoldenEntry entry;
        entry.benchmark_id = "fixture";
        entry.problem_id = "gold";
        entry.shingles = ngram::shingles5(ngram::lex_rtl(golden));
        goldens.entries.push_back(std::move(entry));
    }

    // 200 scripts: 178 clean + planted violations per stage
    std::vector<corpus::RtlScript> scripts;
    for (int i = 0; i < 178; ++i)
        scripts.push_back(corpus::make_script(simple_module("f" + std::to_string(i), i)));
    for (int i = 0; i < 10; ++i)  // duplicates
        scripts.push_back(corpus::make_script(scripts[i].text));
    for (int i = 0; i < 3; ++i) {  // > 65,536 lexical tokens
        std::string text = "module long" + std::to_string(i) + ";\n";
        for (int k = 0; k < 13200; ++k)
            text += "assign w" + std::to_string(k) + " = 1;\n";
        text += "endmodule\n";
        auto s = corpus::make_script(text);
        ACCEPT(s.token_count > 65536, "long fixture exceeds the cutoff");
        scripts.push_back(std::move(s));
    }
    for (int i = 0; i < 5; ++i)  // syntax errors
        scripts.push_back(corpus::make_script("module broken" + std::to_string(i) +
                                              "(input a output b); endmodule"));
    {
        scripts.push_back(corpus::make_script(golden));  // verbatim near-copy
        std::string near = golden;
        auto pos = near.find(" & ");
        near.replace(pos, 3, " | ");
        scripts.push_back(corpus::make_script(near));    // one-token edit
        std::string near2 = golden;
        auto pos2 = near2.find("o2_funnel_gold =");
        near2.replace(pos2, std::string("o2_funnel_gold =").size(), "o2_funnel_gold = ~");
        scripts.push_back(corpus::make_script(near2));   // one extra token
        scripts.push_back(corpus::make_script(golden + "\n"));  // trailing newline variant
    }
    ACCEPT(scripts.size() == 200, "fixture holds exactly 200 scripts");

    corpus::PipelineConfig config;
    config.validator.command = kValidatorCmd;
    config.workers = 8;

    TempDir out1;
    auto result = corpus::run_pipeline(scripts, goldens, config, out1.path, nullptr);
    ACCEPT(result.stats.size() == 5, "five stages reported");
    ACCEPT(result.stats[0].stage == "dedup" && result.stats[0].input_count == 200 &&
               result.stats[0].rejected_count == 10,
           "dedup: 200 in, 10 rejected");
    ACCEPT(result.stats[1].stage == "length" && result.stats[1].input_count == 190 &&
               result.stats[1].rejected_count == 3,
           "length: 190 in, 3 rejected");
    ACCEPT(result.stats[2].stage == "syntax" && result.stats[2].input_count == 187 &&
               result.stats[2].rejected_count == 5,
           "syntax: 187 in, 5 rejected");
    ACCEPT(result.stats[3].stage == "decontaminate" && result.stats[3].input_count == 182 &&
               result.stats[3].rejected_count == 4,
           "decontaminate: 182 in, 4 rejected");
    ACCEPT(result.stats[4].stage == "embedding" && result.stats[4].input_count == 178 &&
               result.stats[4].rejected_count == 0,
           "embedding (disabled): 178 pass through");
    ACCEPT(result.retained == 178, "178 retained");

    std::uint64_t rejected_total = 0;
    for (const auto& s : result.stats) {
        ACCEPT(s.input_count == s.rejected_count + s.retained_count, "per-stage conservation");
        rejected_total += s.rejected_count;
    }
    ACCEPT(rejected_total + result.retained == 200, "stats conservation across the funnel");

    // idempotence: rerunning on the retained corpus changes nothing
    auto retained = corpus::load_scripts(result.corpus_file);
    TempDir out2, out3;
    auto second = corpus::run_pipeline(retained, goldens, config, out2.path, nullptr);
    auto third = corpus::run_pipeline(retained, goldens, config, out3.path, nullptr);
    ACCEPT(second.retained == 178, "second run keeps all 178");
    for (const auto& s : second.stats) ACCEPT(s.rejected_count == 0, "no new rejections");
    ACCEPT(util::read_file(second.manifest_file) == util::read_file(third.manifest_file),
           "manifest identical across reruns");
    detail << "funnel 200 -> 178 with exact per-stage stats; rerun idempotent";
}

// ---- 4. Algorithm-1 conformance under a scripted mock ----
void criterion_algorithm1(std::ostringstream& detail) {
    const char* corrective_head = "Wait, my reasoning must be incorrect.";

    // (a) byte-exact splice including the verbatim corrective prompt
    {
        ttscale::ReasoningTrace trace;
        trace.transcript = "PROMPT reasoning body</think><answer>bad</answer>";
        trace.prompt_len = 7;
        ttscale::CorrectivePrompt prompt;
        prompt.rules = {"Rule A", "Rule B"};
        auto spliced = ttscale::splice_corrective(trace, prompt);
        ACCEPT(spliced.trace.transcript ==
                   "PROMPT reasoning body"
                   "Wait, my reasoning must be incorrect. Let's check the reasoning rules: "
                   "1. Rule A 2. Rule B. Wait, I did not follow the rules. Let's try again.",
               "splice output byte-exact");
    }

    auto goldens = bencheval::load_benchmark(kFixtures / "bench");
    auto easy = util::read_file(goldens[0].golden_path);   // add8
    auto hard = util::read_file(goldens[2].golden_path);   // ps2_fsm
    auto late = util::read_file(kFixtures / "candidates/ps2_fsm_late_done.v");

    // scripted endpoint: add8 solves on the first pass; ps2_fsm emits the
    // late-done candidate first and the golden once corrected
    MockEndpoint mock([&](const MockRequest& req) {
        MockReply reply;
        bool corrected = req.prompt.find(corrective_head) != std::string::npos;
        bool is_ps2 = req.prompt.find("PS/2") != std::string::npos;
        std::string body = is_ps2 ? (corrected ? hard : late) : easy;
        std::string reasoning =
            corrected ? " but the timing is off. Recheck the cycle." : " plan the datapath.";
        reply.text = reasoning + "</think><answer>\n" + body + "\n</answer>";
        return reply;
    });

    llm::ClientConfig client_config;
    client_config.endpoint = mock.url();
    llm::Client client(client_config);

    TempDir work;
    auto verifier = bencheval::default_verifier(kRtlsim, work.path);
    verifier.keep_failed_workdirs = false;
    std::vector<bencheval::BenchmarkProblem> problems = {goldens[0], goldens[2]};

    // (b)+(c): exact token limits and at most T+1 calls per problem
    {
        ttscale::ScaleConfig scale;
        ttscale::Verifier is_correct = [&](const std::string& s) {
            return bencheval::verify(s, problems[1], verifier).verdict ==
                   bencheval::Verdict::Pass;
        };
        auto outcome =
            ttscale::run_scaled(problems[1].spec_text, client, is_correct, {"Rule A"}, scale);
        ACCEPT(outcome.solved, "ps2 solved after one corrective pass");
        ACCEPT(outcome.final_trace.token_limits_used ==
                   std::vector<std::uint32_t>({16384, 32768}),
               "token limits 16384 then 32768");
        ACCEPT(outcome.model_calls == 2, "2 calls for T=2 with early exit");
        ACCEPT(outcome.attempts.size() == 2, "attempts = iterations + 1");

        // exhaust T: never-passing verifier stops at T+1 calls and uses 49152
        ttscale::Verifier never = [](const std::string&) { return false; };
        auto exhausted =
            ttscale::run_scaled(problems[1].spec_text, client, never, {"Rule A"}, scale);
        ACCEPT(exhausted.model_calls == 3, "at most T+1 = 3 model calls");
        ACCEPT(exhausted.final_trace.token_limits_used ==
                   std::vector<std::uint32_t>({16384, 32768, 49152}),
               "token limits 16384 / 32768 / 49152");
    }

    // (d) scaled beats plain on the fixture benchmark
    {
        bencheval::RunConfig run_config;
        run_config.n = 2;
        run_config.ks = {1, 2};
        run_config.workers = 4;
        auto plain = bencheval::make_plain_generator(client, 16384, 0.2);
        auto plain_summary =
            bencheval::run_benchmark(problems, *plain, verifier, run_config);
        ttscale::ScaleConfig scale;
        auto scaled = bencheval::make_scaled_generator(client, {"Rule A"}, scale);
        auto scaled_summary =
            bencheval::run_benchmark(problems, *scaled, verifier, run_config);
        ACCEPT(plain_summary.rate == 0.5, "plain solves only add8");
        ACCEPT(scaled_summary.rate == 1.0, "scaled solves both");
        ACCEPT(scaled_summary.rate > plain_summary.rate,
               "pass-rate improvement scaled vs plain");
        detail << "plain rate " << plain_summary.rate << " -> scaled rate "
               << scaled_summary.rate;
    }
}

// ---- 5. scaling-curve mechanics ----
void criterion_scaling_curve(std::ostringstream& detail) {
    // deterministic mock with graded depth: full reasoning has two Wait
    // checkpoints; each variant sees monotonically more reasoning
    auto goldens = bencheval::load_benchmark(kFixtures / "bench");
    std::vector<bencheval::BenchmarkProblem> problems = {goldens[0], goldens[1], goldens[2]};
    auto add8 = util::read_file(problems[0].golden_path);
    auto counter = util::read_file(problems[1].golden_path);
    auto ps2 = util::read_file(problems[2].golden_path);
    auto late = util::read_file(kFixtures / "candidates/ps2_fsm_late_done.v");
    std::string broken = "module top_module(; endmodule";

    const char* corrective_head = "Wait, my reasoning must be incorrect.";

    MockEndpoint mock([&](const MockRequest& req) {
        MockReply reply;
        std::size_t correctives = 0;
        for (std::size_t pos = 0;
             (pos = req.prompt.find(corrective_head, pos)) != std::string::npos; pos += 4)
            ++correctives;
        bool is_ps2 = req.prompt.find("PS/2") != std::string::npos;
        bool is_counter = req.prompt.find("counts from 0 to 999") != std::string::npos;

        if (req.prompt.rfind("</think>") == req.prompt.size() - 8) {
            // forced answer after a truncation: quality depends on how much
            // reasoning survived
            std::size_t waits = 0;
            for (std::size_t pos = 0;
                 (pos = req.prompt.find("Wait,", pos)) != std::string::npos; pos += 4)
                ++waits;
            std::string body = is_ps2 ? late : (waits >= 1 ? (is_counter ? counter : add8)
                                                           : broken);
            reply.text = "\n<answer>\n" + body + "\n</answer>";
            return reply;
        }
        if (correctives == 0) {
            // base pass: full two-checkpoint reasoning; add8 correct,
            // counter correct, ps2 late
            std::string body = is_ps2 ? late : (is_counter ? counter : add8);
            reply.text = " think. Wait, step two checks widths. Wait, step three checks "
                         "timing closely.</think><answer>\n" + body + "\n</answer>";
            return reply;
        }
        if (correctives == 1) {
            std::string body = is_ps2 ? late : (is_counter ? counter : add8);
            reply.text = " reconsider the spec once more at depth.</think><answer>\n" + body +
                         "\n</answer>";
            return reply;
        }
        std::string body = is_ps2 ? ps2 : (is_counter ? counter : add8);
        reply.text = " the done signal must fire in the same cycle; use the state itself."
                     "</think><answer>\n" + body + "\n</answer>";
        return reply;
    });

    llm::ClientConfig client_config;
    client_config.endpoint = mock.url();
    llm::Client client(client_config);
    TempDir work;
    auto verifier = bencheval::default_verifier(kRtlsim, work.path);
    verifier.keep_failed_workdirs = false;

    // truncation strictly shortens traces
    {
        ttscale::ReasoningTrace trace;
        trace.transcript = "SPEC full think. Wait, a. Wait, b. done</think><answer>x</answer>";
        trace.prompt_len = 5;
        auto t0 = ttscale::truncate_reasoning(trace, 0);
        ACCEPT(t0.truncated, "truncation applies");
        ACCEPT(ttscale::reasoning_token_count(t0.trace) <
                   ttscale::reasoning_token_count(trace),
               "strictly shorter reasoning");
    }

    bencheval::RunConfig run_config;
    run_config.n = 2;
    run_config.ks = {1, 2};
    run_config.workers = 4;
    TempDir out;
    run_config.out_dir = out.path;
    ttscale::ScaleConfig scale;
    auto points = bencheval::scaling_curve(problems, client, {"Rule A"}, verifier, run_config,
                                           scale);
    ACCEPT(points.size() == 5, "five variants: two truncated, one base, two scaled");
    ACCEPT(points[0].variant == "truncated_w0", "variant order");
    ACCEPT(points[4].variant == "scaled_t2", "variant order");
    for (std::size_t i = 1; i < points.size(); ++i) {
        ACCEPT(points[i].mean_reasoning_tokens > points[i - 1].mean_reasoning_tokens,
               "reasoning tokens increase along the sweep");
        ACCEPT(points[i].metric >= points[i - 1].metric,
               "metric monotone non-decreasing in reasoning tokens");
    }
    ACCEPT(points[4].metric > points[0].metric, "the sweep actually climbs");
    ACCEPT(std::filesystem::exists(out.path / "curve.csv"), "curve.csv emitted");
    auto csv = util::read_file(out.path / "curve.csv");
    ACCEPT(std::count(csv.begin(), csv.end(), '\n') == 6, "header + 5 points");
    detail << "metric " << points[0].metric << " -> " << points[4].metric
           << ", tokens " << points[0].mean_reasoning_tokens << " -> "
           << points[4].mean_reasoning_tokens;
}

// ---- 6. SFT packing on a 50-triple toy dataset ----
void criterion_sftpack(std::ostringstream& detail) {
    auto tokenizer = sftpack::make_byte_tokenizer(true);
    std::mt19937 rng(2024);
    std::vector<cotgen::CotTriple> triples;
    for (int i = 0; i < 50; ++i) {
        cotgen::CotTriple triple;
        triple.spec.source_script_id = "triple" + std::to_string(i);
        triple.spec.problem_text = std::string(200 + rng() % 4000, 'p');
        triple.reasoning = std::string(500 + rng() % 9000, 'r');
        triple.solution = std::string(100 + rng() % 2000, 's');
        triples.push_back(std::move(triple));
    }
    std::vector<sftpack::MaskedSequence> sequences;
    std::vector<std::uint32_t> lengths;
    std::uint64_t expected_mask_total = 0;
    for (const auto& triple : triples) {
        auto seq = sftpack::build_masked_sequence(triple, *tokenizer);
        // mask-segment agreement inside the sequence
        for (std::uint32_t i = 0; i < seq.size(); ++i) {
            bool in_loss_span = i >= seq.reasoning_span.start && i < seq.answer_span.end;
            ACCEPT((seq.loss_mask[i] == 1) == in_loss_span, "mask matches spans");
        }
        expected_mask_total += seq.reasoning_span.size() + seq.answer_span.size();
        lengths.push_back(static_cast<std::uint32_t>(seq.size()));
        sequences.push_back(std::move(seq));
    }

    auto chunks = sftpack::pack_chunks(sequences, 32768);

    // exact chunk layout versus the hand-simulated first-fit oracle
    auto layout = testsupport::pack_layout_oracle(lengths, 32768);
    std::size_t piece = 0;
    std::uint64_t mask_total = 0;
    std::vector<std::uint32_t> replay_ids;
    for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
        const auto& chunk = chunks[ci];
        ACCEPT(chunk.token_ids.size() == 32768, "chunk length exactly 32768");
        for (const auto& doc : chunk.docs) {
            ACCEPT(piece < layout.size(), "doc count matches oracle");
            ACCEPT(layout[piece].chunk == ci, "doc chunk index matches oracle");
            ACCEPT(layout[piece].start == doc.start, "doc offset matches oracle");
            ACCEPT(layout[piece].length == doc.end - doc.start, "doc length matches oracle");
            ACCEPT(doc.triple_id == sequences[piece].triple_id, "doc identity preserved");
            for (std::uint32_t i = doc.start; i < doc.end; ++i)
                replay_ids.push_back(chunk.token_ids[i]);
            ++piece;
        }
        for (std::uint32_t i = chunk.pad_start; i < 32768; ++i)
            ACCEPT(chunk.loss_mask[i] == 0, "pad tokens carry no loss");
        for (auto m : chunk.loss_mask) mask_total += m;
    }
    ACCEPT(piece == layout.size(), "every sequence placed exactly once");

    // token conservation: concatenation order preserved, nothing lost
    std::vector<std::uint32_t> original_ids;
    for (const auto& seq : sequences)
        original_ids.insert(original_ids.end(), seq.token_ids.begin(), seq.token_ids.end());
    ACCEPT(replay_ids == original_ids, "non-pad tokens equal the input concatenation");
    ACCEPT(mask_total == expected_mask_total, "mask totals conserved");
    detail << sequences.size() << " triples -> " << chunks.size() << " chunks, mask total "
           << mask_total;
}

// ---- 7. verifier end-to-end on the FSM fixture ----
void criterion_verifier(std::ostringstream& detail) {
    auto problems = bencheval::load_benchmark(kFixtures / "bench");
    const auto& ps2 = problems[2];
    ACCEPT(ps2.problem_id == "ps2_fsm", "fixture present");
    TempDir work;
    auto verifier = bencheval::default_verifier(kRtlsim, work.path);
    verifier.keep_failed_workdirs = false;

    auto golden = bencheval::verify(util::read_file(ps2.golden_path), ps2, verifier);
    ACCEPT(golden.verdict == bencheval::Verdict::Pass, "golden passes");

    auto late = bencheval::verify(
        util::read_file(kFixtures / "candidates/ps2_fsm_late_done.v"), ps2, verifier);
    ACCEPT(late.verdict == bencheval::Verdict::FailTest,
           "one-cycle-late done fails with fail_test");
    detail << "golden pass, late-done fail_test under the bundled simulator";
}

// ---- 8. extraction round-trips ----
void criterion_extraction(std::ostringstream& detail) {
    std::mt19937 rng(7);
    auto random_reasoning = [&]() {
        static const char* words[] = {"alpha", "beta",   "Wait",  "{x}",   "<think",
                                      "<answer", "tick`", "line\n", "paren(", "  pad  "};
        std::string out;
        int n = 1 + static_cast<int>(rng() % 15);
        for (int i = 0; i < n; ++i) {
            out += words[rng() % 10];
            out += ' ';
        }
        return out;
    };
    auto random_solution = [&]() {
        std::string name = "m" + std::to_string(rng() % 10000);
        std::string out = "module " + name + "(input a, output b);\n";
        int extra = static_cast<int>(rng() % 4);
        for (int i = 0; i < extra; ++i)
            out += "wire t" + std::to_string(i) + ";\n";
        out += "assign b = ~a;\nendmodule";
        return out;
    };

    for (int round = 0; round < 100; ++round) {
        std::string problem_body = "Problem " + std::to_string(rng() % 1000) +
                                   (round % 4 == 2 ? " with stray <PROBLEM> inside" : "");
        std::string presponse = "<PROBLEM>" + problem_body + "</PROBLEM>";
        auto problem = cotgen::extract_problem(presponse);
        ACCEPT(problem.ok, "problem extraction succeeds");
        ACCEPT(problem.spec.problem_text == util::trim(problem_body),
               "problem recovered byte-exactly");

        std::string reasoning = random_reasoning();
        std::string solution = random_solution();
        bool fenced = round % 3 == 0;
        std::string wrapped = fenced ? "```verilog\n" + solution + "\n```" : solution;
        std::string response =
            "<think>" + reasoning + "</think>\n<answer>" + wrapped + "</answer>";
        cotgen::Specification spec;
        auto extract = cotgen::extract_triple(response, spec);
        ACCEPT(extract.ok(), "triple extraction succeeds: " + extract.diagnostic);
        ACCEPT(extract.triple->reasoning == reasoning, "reasoning byte-exact");
        ACCEPT(extract.triple->solution == solution, "solution byte-exact");
    }
    detail << "100 randomized round-trips incl. nested tags and fenced answers";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"pass@k oracle equivalence", 5.0, criterion_pass_at_k},
        {"jaccard/decontamination soundness", 30.0, criterion_decontamination},
        {"pipeline funnel fixture", 120.0, criterion_funnel},
        {"algorithm-1 conformance", 10.0, criterion_algorithm1},
        {"scaling-curve mechanics", 60.0, criterion_scaling_curve},
        {"sft packing", 5.0, criterion_sftpack},
        {"verifier end-to-end", 30.0, criterion_verifier},
        {"extraction round-trips", 30.0, criterion_extraction},
    };

    int failures = 0;
    for (auto& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::ostringstream detail;
        std::string error;
        try {
            criterion.body(detail);
        } catch (const std::exception& e) {
            error = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool ok = error.empty() && elapsed <= criterion.budget_seconds;
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << criterion.name << " (" << std::fixed
                  << std::setprecision(2) << elapsed << "s / budget " << criterion.budget_seconds
                  << "s)";
        if (!error.empty()) std::cout << " - " << error;
        if (elapsed > criterion.budget_seconds) std::cout << " - over time budget";
        if (ok && detail.tellp() > 0) std::cout << " - " << detail.str();
        std::cout << "\n";
    }
    return failures;
}
