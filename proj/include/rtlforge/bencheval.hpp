#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtlforge/llmclient.hpp"
#include "rtlforge/ttscale.hpp"

namespace rtlforge::bencheval {

struct BenchmarkProblem {
    std::string problem_id;
    std::string benchmark_id;  // e.g. verilogeval-human, rtllm, fixturebench
    std::string spec_text;
    std::filesystem::path testbench_path;
    std::filesystem::path golden_path;
    std::string top_module = "top_module";
    std::string testbench_top = "tb";
    std::string pass_substring;  // verdict requires it in stdout when set
    std::string fail_substring;  // verdict fails when found in stdout
    int timeout_s = 60;
};

enum class Verdict { Pass, FailCompile, FailTest, Timeout, HarnessError };
const char* verdict_name(Verdict v);

// Simulator behind a command template: a compile step and a run step.
// Placeholders: {candidate} {testbench} {workdir} {out} {top}.
struct VerifierConfig {
    std::string compile_cmd;
    std::string run_cmd;
    int timeout_s = 60;  // per simulation; timeout counts as a failing trial
    std::filesystem::path work_root;
    bool keep_failed_workdirs = true;
    std::function<void(const std::string&)> workdir_probe;  // test hook (isolation asserts)
};

// Default templates target the bundled rtlsim tool; any conforming simulator
// can be swapped in via config (e.g. iverilog -o {out} ... then vvp {out}).
VerifierConfig default_verifier(const std::filesystem::path& rtlsim_path,
                                const std::filesystem::path& work_root);

struct VerifyResult {
    Verdict verdict = Verdict::HarnessError;
    std::string diagnostics;
    std::filesystem::path workdir;
};

VerifyResult verify(const std::string& candidate_source, const BenchmarkProblem& problem,
                    const VerifierConfig& verifier);

// Unbiased pass@k: 1 - C(n-c, k)/C(n, k), overflow-safe product form.
// Requires 1 <= k <= n and 0 <= c <= n; throws std::invalid_argument.
double pass_at_k(std::uint32_t n, std::uint32_t c, std::uint32_t k);

struct TrialRecord {
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;
    Verdict verdict = Verdict::HarnessError;
    std::string diagnostics;
    std::uint64_t reasoning_tokens = 0;
    std::uint32_t model_calls = 0;
};

struct TrialMatrix {
    std::string problem_id;
    std::uint32_t n = 0;
    std::uint32_t c = 0;
    std::vector<TrialRecord> trials;
};

// fraction of problems with c >= 1
double pass_rate(const std::vector<TrialMatrix>& matrices);

// One candidate solution per (problem, trial); scaled generators verify
// internally (IsCorrect feedback) and report reasoning sizes.
class SolutionGenerator {
public:
    virtual ~SolutionGenerator() = default;
    struct Outcome {
        std::optional<std::string> solution;
        std::uint64_t reasoning_tokens = 0;
        std::uint32_t model_calls = 1;
    };
    virtual Outcome generate(const BenchmarkProblem& problem, std::uint64_t seed,
                             const ttscale::Verifier& is_correct) = 0;
    virtual std::string name() const = 0;
};

// plain: one inference pass. scaled: the iterative loop with corrective
// splices. truncated: one pass then reasoning truncation and a forced
// continuation (the downgraded variants).
std::unique_ptr<SolutionGenerator> make_plain_generator(llm::Client& client,
                                                        std::uint32_t max_tokens,
                                                        double temperature);
std::unique_ptr<SolutionGenerator> make_scaled_generator(llm::Client& client,
                                                         std::vector<std::string> rules,
                                                         ttscale::ScaleConfig config);
std::unique_ptr<SolutionGenerator> make_truncated_generator(llm::Client& client,
                                                            std::uint32_t keep_waits,
                                                            std::uint32_t max_tokens,
                                                            double temperature);

struct RunConfig {
    std::uint32_t n = 10;
    std::vector<std::uint32_t> ks = {1, 5};
    std::uint64_t base_seed = 1;
    std::size_t workers = 4;
    std::filesystem::path out_dir;
};

struct RunSummary {
    std::vector<TrialMatrix> matrices;
    std::map<std::uint32_t, double> pass_at;  // k -> mean over problems
    double rate = 0.0;
    double mean_reasoning_tokens = 0.0;
};

std::vector<BenchmarkProblem> load_benchmark(const std::filesystem::path& dir);

// Asserts testbench+golden sanity for each problem; throws on a failing golden.
void check_goldens(const std::vector<BenchmarkProblem>& problems,
                   const VerifierConfig& verifier);

// n independent trials per problem, fresh recorded seeds; per-problem records
// and aggregate metrics written under config.out_dir when set.
RunSummary run_benchmark(const std::vector<BenchmarkProblem>& problems,
                         SolutionGenerator& generator, const VerifierConfig& verifier,
                         const RunConfig& config);

struct CurvePoint {
    std::string variant;
    double mean_reasoning_tokens = 0.0;
    double metric = 0.0;  // pass rate on the fixture
};

// The five-variant reasoning-length sweep: two truncated, one base, two
// scaled. Each point is (mean reasoning tokens, metric); also written as
// curve.csv for plotting.
std::vector<CurvePoint> scaling_curve(const std::vector<BenchmarkProblem>& problems,
                                      llm::Client& client,
                                      const std::vector<std::string>& rules,
                                      const VerifierConfig& verifier, const RunConfig& config,
                                      const ttscale::ScaleConfig& scale_config);

}  // namespace rtlforge::bencheval
