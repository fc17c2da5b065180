#include "rtlforge/bencheval.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rtlforge/pool.hpp"
#include "rtlforge/subprocess.hpp"
#include "rtlforge/util.hpp"

#include <unistd.h>

namespace rtlforge::bencheval {

using nlohmann::ordered_json;

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::FailCompile: return "fail_compile";
        case Verdict::FailTest: return "fail_test";
        case Verdict::Timeout: return "timeout";
        case Verdict::HarnessError: return "harness_error";
    }
    return "?";
}

VerifierConfig default_verifier(const std::filesystem::path& rtlsim_path,
                                const std::filesystem::path& work_root) {
    VerifierConfig config;
    config.compile_cmd = rtlsim_path.string() + " check {candidate} {testbench}";
    config.run_cmd = rtlsim_path.string() + " run --top {top} {candidate} {testbench}";
    config.work_root = work_root;
    return config;
}

namespace {

std::filesystem::path unique_workdir(const VerifierConfig& verifier,
                                     const std::string& problem_id) {
    static std::atomic<std::uint64_t> counter{0};
    auto root = verifier.work_root.empty() ? std::filesystem::temp_directory_path()
                                           : verifier.work_root;
    auto dir = root / (problem_id + "-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    // the simulator runs with cwd = workdir, so every substituted path must
    // stay valid from there
    return std::filesystem::absolute(dir);
}

std::vector<std::string> render_verifier_cmd(const std::string& tmpl,
                                             const std::filesystem::path& candidate,
                                             const BenchmarkProblem& problem,
                                             const std::filesystem::path& workdir) {
    return util::render_command(tmpl, [&](std::string_view name) -> std::optional<std::string> {
        if (name == "candidate") return std::filesystem::absolute(candidate).string();
        if (name == "testbench")
            return std::filesystem::absolute(problem.testbench_path).string();
        if (name == "workdir") return workdir.string();
        if (name == "out") return (workdir / "sim.out").string();
        if (name == "top") return problem.testbench_top;
        return std::nullopt;
    });
}

}  // namespace

namespace {

VerifyResult verify_impl(const std::string& candidate_source, const BenchmarkProblem& problem,
                         const VerifierConfig& verifier) {
    VerifyResult result;
    if (candidate_source.empty()) {
        result.verdict = Verdict::FailCompile;
        result.diagnostics = "empty candidate";
        return result;
    }
    auto workdir = unique_workdir(verifier, problem.problem_id);
    result.workdir = workdir;
    if (verifier.workdir_probe) verifier.workdir_probe(workdir.string());
    auto candidate = workdir / "candidate.v";
    util::write_file(candidate, candidate_source);

    util::RunOptions options;
    options.cwd = workdir;
    options.timeout = std::chrono::milliseconds(
        1000ll * (problem.timeout_s > 0 ? problem.timeout_s : verifier.timeout_s));

    if (!verifier.compile_cmd.empty()) {
        auto argv = render_verifier_cmd(verifier.compile_cmd, candidate, problem, workdir);
        auto run = util::run_command(argv, options);
        if (!run.spawned) {
            result.verdict = Verdict::HarnessError;
            result.diagnostics = "cannot launch simulator: " + run.spawn_error;
            return result;
        }
        if (run.timed_out) {
            result.verdict = Verdict::Timeout;
            result.diagnostics = "compile step timed out";
            return result;
        }
        if (run.exit_code != 0) {
            result.verdict = Verdict::FailCompile;
            result.diagnostics = util::trim(run.err.empty() ? run.out : run.err);
            return result;
        }
    }

    auto argv = render_verifier_cmd(verifier.run_cmd, candidate, problem, workdir);
    auto run = util::run_command(argv, options);
    if (!run.spawned) {
        result.verdict = Verdict::HarnessError;
        result.diagnostics = "cannot launch simulator: " + run.spawn_error;
        return result;
    }
    util::write_file(workdir / "sim.stdout", run.out);
    if (run.timed_out) {
        result.verdict = Verdict::Timeout;
        result.diagnostics = "simulation timed out";
        return result;
    }
    if (run.exit_code != 0) {
        result.verdict = Verdict::FailTest;
        result.diagnostics = "simulator exit " + std::to_string(run.exit_code) + ": " +
                             util::trim(run.err.empty() ? run.out : run.err).substr(0, 500);
        return result;
    }
    if (!problem.fail_substring.empty() &&
        run.out.find(problem.fail_substring) != std::string::npos) {
        result.verdict = Verdict::FailTest;
        result.diagnostics = "failure marker found: " + problem.fail_substring;
        return result;
    }
    if (!problem.pass_substring.empty() &&
        run.out.find(problem.pass_substring) == std::string::npos) {
        result.verdict = Verdict::FailTest;
        result.diagnostics = "pass marker missing: " + problem.pass_substring;
        return result;
    }
    result.verdict = Verdict::Pass;
    return result;
}

}  // namespace

VerifyResult verify(const std::string& candidate_source, const BenchmarkProblem& problem,
                    const VerifierConfig& verifier) {
    VerifyResult result = verify_impl(candidate_source, problem, verifier);
    bool keep = result.verdict != Verdict::Pass && verifier.keep_failed_workdirs;
    if (!keep && !result.workdir.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(result.workdir, ec);
    }
    return result;
}

double pass_at_k(std::uint32_t n, std::uint32_t c, std::uint32_t k) {
    if (k < 1 || k > n) throw std::invalid_argument("pass_at_k requires 1 <= k <= n");
    if (c > n) throw std::invalid_argument("pass_at_k requires c <= n");
    if (c == 0) return 0.0;
    if (k > n - c) return 1.0;
    long double prod = 1.0L;
    for (std::uint32_t i = 0; i < k; ++i) {
        prod *= static_cast<long double>(n - c - i) / static_cast<long double>(n - i);
    }
    return static_cast<double>(1.0L - prod);
}

double pass_rate(const std::vector<TrialMatrix>& matrices) {
    if (matrices.empty()) return 0.0;
    std::size_t solved = 0;
    for (const auto& m : matrices)
        if (m.c >= 1) ++solved;
    return static_cast<double>(solved) / static_cast<double>(matrices.size());
}

namespace {

class PlainGenerator : public SolutionGenerator {
public:
    PlainGenerator(llm::Client& client, std::uint32_t max_tokens, double temperature)
        : client_(client), max_tokens_(max_tokens), temperature_(temperature) {}

    Outcome generate(const BenchmarkProblem& problem, std::uint64_t,
                     const ttscale::Verifier&) override {
        ttscale::ReasoningTrace trace;
        trace.transcript = problem.spec_text;
        trace.prompt_len = problem.spec_text.size();
        llm::GenRequest req;
        req.prompt_text = trace.transcript;
        req.max_tokens = max_tokens_;
        req.temperature = temperature_;
        auto resp = client_.generate(req);
        trace.transcript += resp.text;
        Outcome out;
        out.solution = ttscale::extract_solution(trace);
        out.reasoning_tokens = ttscale::reasoning_token_count(trace);
        out.model_calls = 1;
        return out;
    }
    std::string name() const override { return "plain"; }

private:
    llm::Client& client_;
    std::uint32_t max_tokens_;
    double temperature_;
};

class ScaledGenerator : public SolutionGenerator {
public:
    ScaledGenerator(llm::Client& client, std::vector<std::string> rules,
                    ttscale::ScaleConfig config)
        : client_(client), rules_(std::move(rules)), config_(config) {}

    Outcome generate(const BenchmarkProblem& problem, std::uint64_t,
                     const ttscale::Verifier& is_correct) override {
        auto scaled = ttscale::run_scaled(problem.spec_text, client_, is_correct, rules_, config_);
        Outcome out;
        out.solution = scaled.final_solution;
        out.reasoning_tokens = scaled.attempts.back().reasoning_tokens;
        out.model_calls = scaled.model_calls;
        return out;
    }
    std::string name() const override {
        return "scaled_t" + std::to_string(config_.max_iterations);
    }

private:
    llm::Client& client_;
    std::vector<std::string> rules_;
    ttscale::ScaleConfig config_;
};

class TruncatedGenerator : public SolutionGenerator {
public:
    TruncatedGenerator(llm::Client& client, std::uint32_t keep_waits, std::uint32_t max_tokens,
                       double temperature)
        : client_(client), keep_waits_(keep_waits), max_tokens_(max_tokens),
          temperature_(temperature) {}

    Outcome generate(const BenchmarkProblem& problem, std::uint64_t,
                     const ttscale::Verifier&) override {
        ttscale::ReasoningTrace trace;
        trace.transcript = problem.spec_text;
        trace.prompt_len = problem.spec_text.size();
        llm::GenRequest req;
        req.prompt_text = trace.transcript;
        req.max_tokens = max_tokens_;
        req.temperature = temperature_;
        auto resp = client_.generate(req);
        trace.transcript += resp.text;

        auto truncated = ttscale::truncate_reasoning(trace, keep_waits_);
        if (truncated.truncated) {
            // force an immediate answer from the shortened reasoning
            llm::GenRequest cont;
            cont.prompt_text = truncated.trace.transcript;
            cont.max_tokens = max_tokens_;
            cont.temperature = temperature_;
            cont.mode = llm::GenMode::Continuation;
            auto more = client_.generate(cont);
            truncated.trace.transcript += more.text;
        }
        Outcome out;
        out.solution = ttscale::extract_solution(truncated.trace);
        out.reasoning_tokens = ttscale::reasoning_token_count(truncated.trace);
        out.model_calls = truncated.truncated ? 2 : 1;
        return out;
    }
    std::string name() const override { return "truncated_w" + std::to_string(keep_waits_); }

private:
    llm::Client& client_;
    std::uint32_t keep_waits_;
    std::uint32_t max_tokens_;
    double temperature_;
};

}  // namespace

std::unique_ptr<SolutionGenerator> make_plain_generator(llm::Client& client,
                                                        std::uint32_t max_tokens,
                                                        double temperature) {
    return std::make_unique<PlainGenerator>(client, max_tokens, temperature);
}
std::unique_ptr<SolutionGenerator> make_scaled_generator(llm::Client& client,
                                                         std::vector<std::string> rules,
                                                         ttscale::ScaleConfig config) {
    return std::make_unique<ScaledGenerator>(client, std::move(rules), config);
}
std::unique_ptr<SolutionGenerator> make_truncated_generator(llm::Client& client,
                                                            std::uint32_t keep_waits,
                                                            std::uint32_t max_tokens,
                                                            double temperature) {
    return std::make_unique<TruncatedGenerator>(client, keep_waits, max_tokens, temperature);
}

std::vector<BenchmarkProblem> load_benchmark(const std::filesystem::path& dir) {
    std::vector<BenchmarkProblem> problems;
    auto root = dir / "problems";
    if (!std::filesystem::exists(root))
        throw std::runtime_error("no problems/ directory under " + dir.string());
    std::vector<std::filesystem::path> entries;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory()) entries.push_back(entry.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& p : entries) {
        BenchmarkProblem problem;
        problem.problem_id = p.filename().string();
        problem.spec_text = util::read_file(p / "spec.md");
        problem.testbench_path = p / "testbench.v";
        problem.golden_path = p / "golden.v";
        auto meta_path = std::filesystem::exists(p / "meta") ? p / "meta" : p / "meta.json";
        if (auto meta_text = util::try_read_file(meta_path)) {
            auto meta = ordered_json::parse(*meta_text);
            problem.benchmark_id = meta.value("benchmark_id", dir.filename().string());
            problem.top_module = meta.value("top_module", problem.top_module);
            problem.testbench_top = meta.value("testbench_top", problem.testbench_top);
            problem.pass_substring = meta.value("pass_substring", "");
            problem.fail_substring = meta.value("fail_substring", "");
            problem.timeout_s = meta.value("timeout_s", 60);
        } else {
            problem.benchmark_id = dir.filename().string();
        }
        problems.push_back(std::move(problem));
    }
    return problems;
}

void check_goldens(const std::vector<BenchmarkProblem>& problems,
                   const VerifierConfig& verifier) {
    for (const auto& problem : problems) {
        auto golden = util::read_file(problem.golden_path);
        auto result = verify(golden, problem, verifier);
        if (result.verdict != Verdict::Pass) {
            throw std::runtime_error("golden sanity failed for " + problem.problem_id + ": " +
                                     verdict_name(result.verdict) + " (" + result.diagnostics +
                                     ")");
        }
    }
}

RunSummary run_benchmark(const std::vector<BenchmarkProblem>& problems,
                         SolutionGenerator& generator, const VerifierConfig& verifier,
                         const RunConfig& config) {
    RunSummary summary;
    summary.matrices.resize(problems.size());
    std::size_t total = problems.size() * config.n;

    struct Cell {
        TrialRecord record;
    };
    std::vector<Cell> cells(total);

    util::parallel_for(total, config.workers, [&](std::size_t idx) {
        std::size_t pi = idx / config.n;
        std::uint32_t trial = static_cast<std::uint32_t>(idx % config.n);
        const auto& problem = problems[pi];
        TrialRecord rec;
        rec.trial = trial;
        rec.seed = config.base_seed + idx;
        ttscale::Verifier is_correct = [&](const std::string& solution) {
            auto r = verify(solution, problem, verifier);
            if (r.verdict == Verdict::HarnessError)
                throw std::runtime_error("verifier unavailable: " + r.diagnostics);
            return r.verdict == Verdict::Pass;
        };
        try {
            auto outcome = generator.generate(problem, rec.seed, is_correct);
            rec.reasoning_tokens = outcome.reasoning_tokens;
            rec.model_calls = outcome.model_calls;
            if (!outcome.solution) {
                rec.verdict = Verdict::FailTest;
                rec.diagnostics = "no solution extracted";
            } else {
                auto vr = verify(*outcome.solution, problem, verifier);
                rec.verdict = vr.verdict;
                rec.diagnostics = vr.diagnostics;
            }
        } catch (const std::exception& e) {
            rec.verdict = Verdict::HarnessError;
            rec.diagnostics = e.what();
        }
        cells[idx].record = std::move(rec);
    });

    double reasoning_sum = 0;
    for (std::size_t pi = 0; pi < problems.size(); ++pi) {
        TrialMatrix& matrix = summary.matrices[pi];
        matrix.problem_id = problems[pi].problem_id;
        matrix.n = config.n;
        for (std::uint32_t t = 0; t < config.n; ++t) {
            const auto& rec = cells[pi * config.n + t].record;
            if (rec.verdict == Verdict::Pass) ++matrix.c;
            reasoning_sum += static_cast<double>(rec.reasoning_tokens);
            matrix.trials.push_back(rec);
        }
    }
    summary.rate = pass_rate(summary.matrices);
    summary.mean_reasoning_tokens = total ? reasoning_sum / static_cast<double>(total) : 0.0;
    for (std::uint32_t k : config.ks) {
        double acc = 0;
        for (const auto& m : summary.matrices) acc += pass_at_k(m.n, m.c, k);
        summary.pass_at[k] =
            summary.matrices.empty() ? 0.0 : acc / static_cast<double>(summary.matrices.size());
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ostringstream trials;
        for (const auto& m : summary.matrices) {
            for (const auto& rec : m.trials) {
                ordered_json j;
                j["problem_id"] = m.problem_id;
                j["trial"] = rec.trial;
                j["seed"] = rec.seed;
                j["verdict"] = verdict_name(rec.verdict);
                j["diagnostics"] = rec.diagnostics;
                j["reasoning_tokens"] = rec.reasoning_tokens;
                j["model_calls"] = rec.model_calls;
                trials << j.dump() << "\n";
            }
        }
        util::write_file(config.out_dir / "trials.jsonl", trials.str());

        std::ostringstream csv;
        csv << "problem_id,n,c";
        for (std::uint32_t k : config.ks) csv << ",pass_at_" << k;
        csv << "\n";
        for (const auto& m : summary.matrices) {
            csv << m.problem_id << "," << m.n << "," << m.c;
            for (std::uint32_t k : config.ks) csv << "," << pass_at_k(m.n, m.c, k);
            csv << "\n";
        }
        csv << "TOTAL," << config.n << ",";
        csv << "-";
        for (std::uint32_t k : config.ks) csv << "," << summary.pass_at[k];
        csv << "\n";
        util::write_file(config.out_dir / "summary.csv", csv.str());

        // one (reasoning tokens, metric) point per run; curve mode stitches
        // five of these into curve.csv
        std::ostringstream point;
        point << "mean_reasoning_tokens,pass_rate\n"
              << summary.mean_reasoning_tokens << "," << summary.rate << "\n";
        util::write_file(config.out_dir / "point.csv", point.str());
    }
    return summary;
}

std::vector<CurvePoint> scaling_curve(const std::vector<BenchmarkProblem>& problems,
                                      llm::Client& client,
                                      const std::vector<std::string>& rules,
                                      const VerifierConfig& verifier, const RunConfig& config,
                                      const ttscale::ScaleConfig& scale_config) {
    std::vector<CurvePoint> points;
    std::uint32_t base_tokens = scale_config.limits.empty() ? 16384 : scale_config.limits[0];

    auto run_variant = [&](SolutionGenerator& generator) {
        RunConfig sub = config;
        sub.out_dir = config.out_dir.empty() ? std::filesystem::path{}
                                             : config.out_dir / generator.name();
        auto summary = run_benchmark(problems, generator, verifier, sub);
        CurvePoint point;
        point.variant = generator.name();
        point.mean_reasoning_tokens = summary.mean_reasoning_tokens;
        point.metric = summary.rate;
        points.push_back(point);
    };

    // two truncated, one base, two scaled: the five reasoning-length variants
    auto trunc0 = make_truncated_generator(client, 0, base_tokens, scale_config.temperature);
    auto trunc1 = make_truncated_generator(client, 1, base_tokens, scale_config.temperature);
    auto plain = make_plain_generator(client, base_tokens, scale_config.temperature);
    ttscale::ScaleConfig one = scale_config;
    one.max_iterations = 1;
    ttscale::ScaleConfig two = scale_config;
    two.max_iterations = 2;
    auto scaled1 = make_scaled_generator(client, rules, one);
    auto scaled2 = make_scaled_generator(client, rules, two);

    run_variant(*trunc0);
    run_variant(*trunc1);
    run_variant(*plain);
    run_variant(*scaled1);
    run_variant(*scaled2);

    if (!config.out_dir.empty()) {
        std::ostringstream csv;
        csv << "benchmark_id,variant,mean_reasoning_tokens,metric\n";
        std::string bench = problems.empty() ? "" : problems[0].benchmark_id;
        for (const auto& p : points) {
            csv << bench << "," << p.variant << "," << p.mean_reasoning_tokens << ","
                << p.metric << "\n";
        }
        util::write_file(config.out_dir / "curve.csv", csv.str());
    }
    return points;
}

}  // namespace rtlforge::bencheval
