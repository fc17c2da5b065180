// Integration coverage for the installed CLI surface: spawns the real
// binaries against a scripted endpoint and checks the files they leave
// behind.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rtlforge/subprocess.hpp"
#include "rtlforge/util.hpp"
#include "support/mock_llm.hpp"
#include "support/temp_dir.hpp"

using namespace rtlforge;
using testsupport::MockEndpoint;
using testsupport::MockReply;
using testsupport::MockRequest;
using testsupport::TempDir;

namespace {

const std::filesystem::path kCli = RTLFORGE_CLI_BIN;
const std::filesystem::path kRtlsim = RTLFORGE_RTLSIM_BIN;
const std::filesystem::path kFixtures = RTLFORGE_FIXTURES_DIR;

util::RunResult run_cli(const std::vector<std::string>& args,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(60000)) {
    std::vector<std::string> argv = {kCli.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    util::RunOptions options;
    options.timeout = timeout;
    return util::run_command(argv, options);
}

MockEndpoint scripted_endpoint() {
    return MockEndpoint([](const MockRequest& req) {
        MockReply reply;
        if (req.prompt.find("create a high-quality Verilog problem") != std::string::npos) {
            reply.text = "<PROBLEM>Invert a bit.</PROBLEM>";
        } else if (req.prompt.find("solve a Verilog problem") != std::string::npos) {
            reply.text = "<think>flip it</think><answer>module inv(input a, output b); "
                         "assign b = ~a; endmodule</answer>";
        } else {
            reply.text = " plan</think><answer>module nope(input a, output b); "
                         "assign b = a; endmodule</answer>";
        }
        return reply;
    });
}

}  // namespace

TEST_CASE("curate -> gencot -> pack through the real binaries") {
    TempDir work;
    auto input = work.path / "input";
    for (int i = 0; i < 3; ++i) {
        util::write_file(input / ("m" + std::to_string(i) + ".v"),
                         "module m" + std::to_string(i) + "(input a" + std::to_string(i) +
                             ", output y" + std::to_string(i) + ");\n  assign y" +
                             std::to_string(i) + " = ~a" + std::to_string(i) +
                             ";\nendmodule\n");
    }
    util::write_file(input / "bad.v", "module bad( endmodule\n");
    util::write_file(work.path / "config.json",
                     "{ \"workers\": 2, \"validator\": { \"command\": \"" + kRtlsim.string() +
                         " check {file}\" } }\n");

    auto curate = run_cli({"curate", "--input", input.string(), "--goldens",
                           (kFixtures / "bench").string(), "--config",
                           (work.path / "config.json").string(), "--out",
                           (work.path / "curated").string()});
    REQUIRE_MESSAGE(curate.exit_code == 0, curate.err);
    CHECK(curate.out.find("retained 3 scripts") != std::string::npos);
    CHECK(std::filesystem::exists(work.path / "curated/manifest.jsonl"));

    auto mock = scripted_endpoint();
    auto gencot = run_cli({"gencot", "--corpus", (work.path / "curated/corpus.jsonl").string(),
                           "--goldens", (kFixtures / "bench").string(), "--endpoint", mock.url(),
                           "--out", (work.path / "dataset.jsonl").string()});
    REQUIRE_MESSAGE(gencot.exit_code == 0, gencot.err);
    CHECK(gencot.out.find("emitted=3") != std::string::npos);

    auto pack = run_cli({"pack", "--dataset", (work.path / "dataset.jsonl").string(),
                         "--tokenizer", "byte", "--out", (work.path / "packed").string(),
                         "--chunk", "1024"});
    REQUIRE_MESSAGE(pack.exit_code == 0, pack.err);
    CHECK(std::filesystem::exists(work.path / "packed/chunks.bin"));
    CHECK(std::filesystem::exists(work.path / "packed/chunks.idx.jsonl"));
}

TEST_CASE("rules fallback and eval through the real binaries") {
    TempDir work;
    auto rules = run_cli({"rules", "--bench", (kFixtures / "bench").string(), "--out",
                          (work.path / "rules.txt").string()});
    REQUIRE_MESSAGE(rules.exit_code == 0, rules.err);
    auto rules_text = util::read_file(work.path / "rules.txt");
    CHECK(rules_text.find("Carefully implement output signals") != std::string::npos);

    auto mock = scripted_endpoint();
    auto eval = run_cli({"eval", "--bench", (kFixtures / "bench").string(), "--model-endpoint",
                         mock.url(), "--mode", "plain", "--n", "1", "--k", "1", "--out",
                         (work.path / "eval").string(), "--rtlsim", kRtlsim.string(),
                         "--workers", "2"},
                        std::chrono::milliseconds(120000));
    REQUIRE_MESSAGE(eval.exit_code == 0, eval.err);
    CHECK(eval.out.find("pass@1") != std::string::npos);
    CHECK(std::filesystem::exists(work.path / "eval/trials.jsonl"));
    CHECK(std::filesystem::exists(work.path / "eval/summary.csv"));
    CHECK(std::filesystem::exists(work.path / "eval/point.csv"));
}

TEST_CASE("usage errors exit nonzero") {
    auto bad = run_cli({"curate"});
    CHECK(bad.exit_code != 0);
    auto unknown = run_cli({"definitely-not-a-subcommand"});
    CHECK(unknown.exit_code != 0);
}
