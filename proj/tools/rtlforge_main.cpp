// RTL reasoning-data toolchain CLI: corpus curation, CoT dataset synthesis,
// SFT chunk packing, iterative test-time scaling, benchmark evaluation, and
// rule generation.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtlforge/bencheval.hpp"
#include "rtlforge/corpus.hpp"
#include "rtlforge/cotgen.hpp"
#include "rtlforge/llmclient.hpp"
#include "rtlforge/rules.hpp"
#include "rtlforge/sftpack.hpp"
#include "rtlforge/ttscale.hpp"
#include "rtlforge/util.hpp"

namespace {

using nlohmann::ordered_json;

std::filesystem::path sibling_rtlsim(const char* argv0) {
    std::filesystem::path self(argv0);
    auto candidate = self.parent_path() / "rtlsim";
    if (std::filesystem::exists(candidate)) return candidate;
    return "rtlsim";  // rely on PATH
}

int cmd_curate(const std::string& input, const std::string& goldens_dir,
               const std::string& config_file, const std::string& out_dir) {
    rtlforge::corpus::PipelineConfig config;
    if (!config_file.empty()) config = rtlforge::corpus::load_pipeline_config(config_file);
    if (config.validator.command.empty()) {
        std::cerr << "config must set validator.command (e.g. \"rtlsim check {file}\" or "
                     "\"iverilog -t null {file}\")\n";
        return 2;
    }
    auto scripts = rtlforge::corpus::load_scripts(input);
    auto goldens =
        rtlforge::corpus::load_goldens(goldens_dir, config.decontaminate_problem_texts);
    if (goldens.empty()) {
        std::cerr << "warning: golden set is empty; decontamination stage will pass everything\n";
    }
    auto result = rtlforge::corpus::run_pipeline(scripts, goldens, config, out_dir);
    for (const auto& s : result.stats) {
        std::cout << s.stage << ": in=" << s.input_count << " rejected=" << s.rejected_count
                  << " retained=" << s.retained_count
                  << " tokens=" << s.total_tokens_retained << "\n";
    }
    std::cout << "retained " << result.retained << " scripts -> " << result.corpus_file << "\n";
    return 0;
}

rtlforge::llm::ClientConfig client_config(const std::string& endpoint, std::uint64_t budget,
                                          const std::string& transcript) {
    rtlforge::llm::ClientConfig config;
    config.endpoint = endpoint;
    config.run_token_budget = budget;
    if (!transcript.empty()) config.transcript_path = transcript;
    return config;
}

std::vector<rtlforge::corpus::RtlScript> load_corpus_file(const std::string& corpus_file) {
    return rtlforge::corpus::load_scripts(corpus_file);
}

int cmd_genspec(const std::string& corpus_file, const std::string& endpoint,
                const std::string& out_file, std::uint64_t budget) {
    // step 1 only: emit specifications for inspection
    auto scripts = load_corpus_file(corpus_file);
    rtlforge::llm::Client client(client_config(endpoint, budget, ""));
    std::uint64_t emitted = 0, failed = 0;
    for (const auto& script : scripts) {
        rtlforge::llm::GenRequest req;
        req.prompt_text = rtlforge::cotgen::render_problem_prompt(script.text);
        req.max_tokens = 2048;
        try {
            auto resp = client.generate(req);
            auto problem = rtlforge::cotgen::extract_problem(resp.text);
            if (!problem.ok) {
                ++failed;
                continue;
            }
            ordered_json rec;
            rec["source_script_id"] = script.id;
            rec["problem_text"] = problem.spec.problem_text;
            rtlforge::util::append_file(out_file, rec.dump() + "\n");
            ++emitted;
        } catch (const rtlforge::llm::ClientError& e) {
            std::cerr << "client error: " << e.what() << "\n";
            if (e.kind() == rtlforge::llm::ClientErrorKind::BudgetExceeded) break;
            ++failed;
        }
    }
    std::cout << "specifications: " << emitted << " emitted, " << failed << " failed\n";
    return 0;
}

int cmd_gencot(const std::string& corpus_file, const std::string& goldens_dir,
               const std::string& endpoint, const std::string& out_file, std::uint64_t budget,
               const std::string& model_id) {
    auto scripts = load_corpus_file(corpus_file);
    auto goldens = rtlforge::corpus::load_goldens(goldens_dir);
    rtlforge::llm::Client client(
        client_config(endpoint, budget, out_file + ".transcript.jsonl"));
    rtlforge::cotgen::SynthesisConfig config;
    config.out_file = out_file;
    config.checkpoint_file = out_file + ".checkpoint.jsonl";
    config.model_id = model_id;
    auto stats = rtlforge::cotgen::synthesize_dataset(scripts, client, goldens, config);
    std::cout << "attempted=" << stats.attempted_scripts << " emitted=" << stats.emitted_triples
              << " rejected=" << stats.rejected_count << " client_errors=" << stats.client_errors
              << " resumed_skips=" << stats.resumed_skips << "\n";
    return 0;
}

int cmd_pack(const std::string& dataset, const std::string& tokenizer_dir,
             const std::string& out_dir, std::uint32_t chunk, const std::string& mode) {
    auto triples = rtlforge::sftpack::load_dataset(dataset);
    std::unique_ptr<rtlforge::sftpack::Tokenizer> tokenizer;
    if (tokenizer_dir == "byte") {
        tokenizer = rtlforge::sftpack::make_byte_tokenizer(true);
    } else {
        tokenizer = rtlforge::sftpack::load_tokenizer(tokenizer_dir);
    }
    std::vector<rtlforge::sftpack::MaskedSequence> sequences;
    std::uint64_t skipped = 0;
    for (const auto& triple : triples) {
        try {
            sequences.push_back(rtlforge::sftpack::build_masked_sequence(triple, *tokenizer));
        } catch (const rtlforge::sftpack::EmptySegment& e) {
            std::cerr << "skipping triple: " << e.what() << "\n";
            ++skipped;
        }
    }
    auto pack_mode = mode == "spill" ? rtlforge::sftpack::PackMode::Spill
                                     : rtlforge::sftpack::PackMode::Whole;
    auto chunks = rtlforge::sftpack::pack_chunks(sequences, chunk, pack_mode);
    rtlforge::sftpack::write_chunks(chunks, chunk, out_dir);
    std::uint64_t pad = 0;
    for (const auto& c : chunks) pad += chunk - c.pad_start;
    std::cout << "packed " << sequences.size() << " sequences (" << skipped << " skipped) into "
              << chunks.size() << " chunks of " << chunk << " tokens, " << pad
              << " pad tokens total\n";
    return 0;
}

int cmd_scale(const std::string& bench_dir, const std::string& endpoint,
              const std::string& rules_file, std::uint32_t max_iters,
              const std::string& limits_csv, double temperature, const std::string& out_dir,
              const std::string& rtlsim, bool bare_wait) {
    auto problems = rtlforge::bencheval::load_benchmark(bench_dir);
    auto verifier = rtlforge::bencheval::default_verifier(
        rtlsim, std::filesystem::path(out_dir) / "work");
    rtlforge::bencheval::check_goldens(problems, verifier);
    std::vector<std::string> rules;
    if (!rules_file.empty()) rules = rtlforge::rules::load_rules_file(rules_file).rules;
    rtlforge::llm::Client client(client_config(endpoint, 0, out_dir + "/transcript.jsonl"));

    rtlforge::ttscale::ScaleConfig config;
    config.max_iterations = max_iters;
    config.temperature = temperature;
    config.bare_wait_ablation = bare_wait;
    config.limits.clear();
    for (const auto& part : rtlforge::util::split(limits_csv, ','))
        config.limits.push_back(static_cast<std::uint32_t>(std::stoul(part)));

    for (const auto& problem : problems) {
        rtlforge::ttscale::Verifier is_correct = [&](const std::string& solution) {
            auto r = rtlforge::bencheval::verify(solution, problem, verifier);
            if (r.verdict == rtlforge::bencheval::Verdict::HarnessError)
                throw std::runtime_error(r.diagnostics);
            return r.verdict == rtlforge::bencheval::Verdict::Pass;
        };
        auto outcome = rtlforge::ttscale::run_scaled(problem.spec_text, client, is_correct,
                                                     rules, config);
        auto dir = std::filesystem::path(out_dir) / problem.problem_id;
        rtlforge::util::write_file(dir / "final_transcript.txt",
                                   outcome.final_trace.transcript);
        for (const auto& a : outcome.attempts) {
            rtlforge::util::write_file(
                dir / ("attempt_" + std::to_string(a.iteration) + ".txt"), a.transcript);
        }
        ordered_json rec;
        rec["problem_id"] = problem.problem_id;
        rec["solved"] = outcome.solved;
        rec["model_calls"] = outcome.model_calls;
        rec["attempts"] = ordered_json::array();
        for (const auto& a : outcome.attempts) {
            ordered_json att;
            att["iteration"] = a.iteration;
            att["reasoning_tokens"] = a.reasoning_tokens;
            att["verdict"] = static_cast<int>(a.verdict);
            rec["attempts"].push_back(att);
        }
        rtlforge::util::write_file(dir / "outcome.json", rec.dump(2) + "\n");
        std::cout << problem.problem_id << ": " << (outcome.solved ? "solved" : "unsolved")
                  << " in " << outcome.model_calls << " calls\n";
    }
    return 0;
}

int cmd_eval(const std::string& bench_dir, const std::string& endpoint, const std::string& mode,
             std::uint32_t n, const std::string& ks_csv, const std::string& rules_file,
             double temperature, const std::string& out_dir, const std::string& rtlsim,
             std::size_t workers) {
    auto problems = rtlforge::bencheval::load_benchmark(bench_dir);
    auto verifier = rtlforge::bencheval::default_verifier(
        rtlsim, std::filesystem::path(out_dir) / "work");
    rtlforge::bencheval::check_goldens(problems, verifier);
    rtlforge::llm::Client client(client_config(endpoint, 0, out_dir + "/transcript.jsonl"));
    std::vector<std::string> rules;
    if (!rules_file.empty()) rules = rtlforge::rules::load_rules_file(rules_file).rules;

    rtlforge::bencheval::RunConfig config;
    config.n = n;
    config.workers = workers;
    config.out_dir = out_dir;
    config.ks.clear();
    for (const auto& part : rtlforge::util::split(ks_csv, ','))
        config.ks.push_back(static_cast<std::uint32_t>(std::stoul(part)));

    rtlforge::ttscale::ScaleConfig scale_config;
    scale_config.temperature = temperature;

    if (mode == "curve") {
        auto points = rtlforge::bencheval::scaling_curve(problems, client, rules, verifier,
                                                         config, scale_config);
        for (const auto& p : points) {
            std::cout << p.variant << ": reasoning_tokens=" << p.mean_reasoning_tokens
                      << " metric=" << p.metric << "\n";
        }
        return 0;
    }

    std::unique_ptr<rtlforge::bencheval::SolutionGenerator> generator;
    if (mode == "scaled") {
        generator = rtlforge::bencheval::make_scaled_generator(client, rules, scale_config);
    } else {
        generator = rtlforge::bencheval::make_plain_generator(client, 16384, temperature);
    }
    auto summary = rtlforge::bencheval::run_benchmark(problems, *generator, verifier, config);
    for (const auto& [k, v] : summary.pass_at) std::cout << "pass@" << k << " = " << v << "\n";
    std::cout << "pass rate = " << summary.rate << "\n";
    std::cout << "mean reasoning tokens = " << summary.mean_reasoning_tokens << "\n";
    return 0;
}

int cmd_rules(const std::string& bench_dir, const std::string& endpoint,
              const std::string& out_file, std::size_t cap) {
    auto problems = rtlforge::bencheval::load_benchmark(bench_dir);
    std::vector<rtlforge::rules::SourcedRules> lists;
    if (endpoint.empty()) {
        std::cerr << "no endpoint given; writing the built-in fallback rule\n";
        lists.push_back({"fallback", {rtlforge::rules::fallback_rule()}});
    } else {
        rtlforge::llm::Client client(client_config(endpoint, 0, ""));
        for (const auto& problem : problems) {
            rtlforge::llm::GenRequest req;
            req.prompt_text = rtlforge::rules::render_rulegen_prompt(problem.spec_text);
            req.max_tokens = 2048;
            try {
                auto resp = client.generate(req);
                auto extract = rtlforge::rules::extract_rules(resp.text);
                if (extract.ok) lists.push_back({problem.problem_id, extract.rules});
            } catch (const rtlforge::llm::ClientError& e) {
                std::cerr << problem.problem_id << ": " << e.what() << "\n";
            }
        }
    }
    auto set = rtlforge::rules::aggregate(lists, cap);
    rtlforge::rules::save_rules_file(set, out_file);
    std::cout << "wrote " << set.rules.size() << " rules to " << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rtlforge - RTL reasoning data curation, test-time scaling, and evaluation"};
    app.require_subcommand(1);
    std::string default_rtlsim = sibling_rtlsim(argv[0]).string();

    // curate
    std::string cur_input, cur_goldens, cur_config, cur_out;
    auto* curate = app.add_subcommand("curate", "run the corpus filtering pipeline");
    curate->add_option("--input", cur_input, "directory tree or .jsonl of RTL scripts")
        ->required();
    curate->add_option("--goldens", cur_goldens, "benchmark directory with golden solutions")
        ->required();
    curate->add_option("--config", cur_config, "pipeline config JSON");
    curate->add_option("--out", cur_out, "output directory")->required();

    // genspec
    std::string gs_corpus, gs_endpoint, gs_out;
    std::uint64_t gs_budget = 0;
    auto* genspec = app.add_subcommand("genspec", "generate problem specifications (step 1)");
    genspec->add_option("--corpus", gs_corpus, "curated corpus .jsonl")->required();
    genspec->add_option("--endpoint", gs_endpoint, "completion endpoint URL")->required();
    genspec->add_option("--out", gs_out, "output .jsonl")->required();
    genspec->add_option("--budget-tokens", gs_budget, "run token budget (0 = unlimited)");

    // gencot
    std::string gc_corpus, gc_goldens, gc_endpoint, gc_out, gc_model = "unknown";
    std::uint64_t gc_budget = 0;
    auto* gencot = app.add_subcommand("gencot", "synthesize reasoning triples (steps 1+2)");
    gencot->add_option("--corpus", gc_corpus, "curated corpus .jsonl")->required();
    gencot->add_option("--goldens", gc_goldens, "benchmark directory for the emission re-check")
        ->required();
    gencot->add_option("--endpoint", gc_endpoint, "completion endpoint URL")->required();
    gencot->add_option("--out", gc_out, "dataset .jsonl")->required();
    gencot->add_option("--budget-tokens", gc_budget, "run token budget (0 = unlimited)");
    gencot->add_option("--model-id", gc_model, "model id recorded in triple meta");

    // pack
    std::string pk_dataset, pk_tokenizer = "byte", pk_out, pk_mode = "whole";
    std::uint32_t pk_chunk = 32768;
    auto* pack = app.add_subcommand("pack", "build loss-masked packed chunks");
    pack->add_option("--dataset", pk_dataset, "triples .jsonl")->required();
    pack->add_option("--tokenizer", pk_tokenizer, "tokenizer dir, or 'byte' for the toy one");
    pack->add_option("--out", pk_out, "output directory")->required();
    pack->add_option("--chunk", pk_chunk, "chunk length in tokens");
    pack->add_option("--mode", pk_mode, "whole|spill");

    // scale
    std::string sc_bench, sc_endpoint, sc_rules, sc_out, sc_rtlsim = default_rtlsim;
    std::string sc_limits = "16384,32768,49152";
    std::uint32_t sc_iters = 2;
    double sc_temp = 0.2;
    bool sc_bare_wait = false;
    auto* scale = app.add_subcommand("scale", "iterative test-time scaling over a benchmark");
    scale->add_option("--bench", sc_bench, "benchmark directory")->required();
    scale->add_option("--model-endpoint", sc_endpoint, "completion endpoint URL")->required();
    scale->add_option("--rules", sc_rules, "rules file");
    scale->add_option("--max-iters", sc_iters, "maximum corrective iterations T");
    scale->add_option("--limits", sc_limits, "comma-separated token limits per pass");
    scale->add_option("--temperature", sc_temp, "sampling temperature");
    scale->add_option("--out", sc_out, "output directory")->required();
    scale->add_option("--rtlsim", sc_rtlsim, "path to the simulator CLI");
    scale->add_flag("--bare-wait", sc_bare_wait,
                    "ablation: splice a bare 'Wait' instead of the corrective prompt");

    // eval
    std::string ev_bench, ev_endpoint, ev_mode = "plain", ev_ks = "1,5", ev_rules, ev_out;
    std::string ev_rtlsim = default_rtlsim;
    std::uint32_t ev_n = 10;
    double ev_temp = 0.2;
    std::size_t ev_workers = 4;
    auto* eval = app.add_subcommand("eval", "run a benchmark and score pass@k / pass rate");
    eval->add_option("--bench", ev_bench, "benchmark directory")->required();
    eval->add_option("--model-endpoint", ev_endpoint, "completion endpoint URL")->required();
    eval->add_option("--mode", ev_mode, "plain|scaled|curve");
    eval->add_option("--n", ev_n, "trials per problem");
    eval->add_option("--k", ev_ks, "comma-separated k values");
    eval->add_option("--rules", ev_rules, "rules file (scaled/curve modes)");
    eval->add_option("--temperature", ev_temp, "sampling temperature");
    eval->add_option("--out", ev_out, "output directory")->required();
    eval->add_option("--rtlsim", ev_rtlsim, "path to the simulator CLI");
    eval->add_option("--workers", ev_workers, "parallel trials");

    // rules
    std::string ru_bench, ru_endpoint, ru_out = "rules.txt";
    std::size_t ru_cap = 10;
    auto* rules_cmd = app.add_subcommand("rules", "generate reasoning rules from a benchmark");
    rules_cmd->add_option("--bench", ru_bench, "benchmark directory")->required();
    rules_cmd->add_option("--endpoint", ru_endpoint, "completion endpoint URL (empty: fallback)");
    rules_cmd->add_option("--out", ru_out, "rules file to write");
    rules_cmd->add_option("--cap", ru_cap, "maximum aggregated rules");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curate->parsed()) return cmd_curate(cur_input, cur_goldens, cur_config, cur_out);
        if (genspec->parsed()) return cmd_genspec(gs_corpus, gs_endpoint, gs_out, gs_budget);
        if (gencot->parsed())
            return cmd_gencot(gc_corpus, gc_goldens, gc_endpoint, gc_out, gc_budget, gc_model);
        if (pack->parsed()) return cmd_pack(pk_dataset, pk_tokenizer, pk_out, pk_chunk, pk_mode);
        if (scale->parsed())
            return cmd_scale(sc_bench, sc_endpoint, sc_rules, sc_iters, sc_limits, sc_temp,
                             sc_out, sc_rtlsim, sc_bare_wait);
        if (eval->parsed())
            return cmd_eval(ev_bench, ev_endpoint, ev_mode, ev_n, ev_ks, ev_rules, ev_temp,
                            ev_out, ev_rtlsim, ev_workers);
        if (rules_cmd->parsed()) return cmd_rules(ru_bench, ru_endpoint, ru_out, ru_cap);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
