// Subset Verilog-2005 front-end: `check` parses (syntax validation contract:
// exit 0 = valid), `run` elaborates and simulates until $finish, natural
// quiescence, or a limit.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtlforge/util.hpp"
#include "rtlforge/vlog/interp.hpp"
#include "rtlforge/vlog/parser.hpp"

namespace {

int do_check(const std::vector<std::string>& files) {
    bool ok = true;
    for (const auto& f : files) {
        auto text = rtlforge::util::try_read_file(f);
        if (!text) {
            std::cerr << f << ": cannot open\n";
            ok = false;
            continue;
        }
        auto diags = rtlforge::vlog::check_source(*text, f);
        if (!diags.empty()) {
            std::cerr << rtlforge::vlog::format_diags(diags);
            ok = false;
        }
    }
    return ok ? 0 : 1;
}

int do_run(const std::vector<std::string>& files, const std::string& top,
           std::uint64_t max_time, std::uint64_t max_steps) {
    std::vector<rtlforge::vlog::Module> modules;
    for (const auto& f : files) {
        auto text = rtlforge::util::try_read_file(f);
        if (!text) {
            std::cerr << f << ": cannot open\n";
            return 1;
        }
        auto parsed = rtlforge::vlog::parse_source(*text, f);
        if (!parsed.ok()) {
            std::cerr << rtlforge::vlog::format_diags(parsed.diags);
            return 1;
        }
        for (auto& m : parsed.modules) modules.push_back(std::move(m));
    }
    rtlforge::vlog::SimOptions options;
    options.top = top;
    options.max_time = max_time;
    options.max_steps = max_steps;
    auto result = rtlforge::vlog::simulate(modules, options);
    for (const auto& d : result.diags) {
        std::cerr << d.file << ":" << d.line << ": " << d.message << "\n";
    }
    if (!result.elaborated) return 1;
    if (result.aborted) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rtlsim - subset Verilog-2005 syntax checker and simulator"};
    app.require_subcommand(1);

    std::vector<std::string> check_files;
    auto* check = app.add_subcommand("check", "validate syntax (exit 0 = valid)");
    check->add_option("files", check_files, "Verilog source files")->required();

    std::vector<std::string> run_files;
    std::string top;
    std::uint64_t max_time = 0;
    std::uint64_t max_steps = 200'000'000;
    auto* run = app.add_subcommand("run", "simulate a design with its testbench");
    run->add_option("files", run_files, "Verilog source files")->required();
    run->add_option("--top", top, "top module (default: auto-detect)");
    run->add_option("--max-time", max_time, "abort after this simulation time (0 = unlimited)");
    run->add_option("--max-steps", max_steps, "abort after this many statement steps");

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return do_check(check_files);
    return do_run(run_files, top, max_time, max_steps);
}
