#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtlforge/vlog/ast.hpp"

namespace rtlforge::vlog {

struct SimOptions {
    std::string top;                    // empty: auto-detect the uninstantiated module
    std::uint64_t max_time = 0;         // 0: unlimited
    std::uint64_t max_steps = 200'000'000;
    std::ostream* output = nullptr;     // $display sink; default std::cout
};

struct SimResult {
    bool elaborated = false;
    bool finished = false;              // $finish (or $stop) was executed
    bool aborted = false;               // hit max_time or max_steps
    std::uint64_t end_time = 0;
    std::vector<Diagnostic> diags;
};

// Elaborates `top` over the parsed modules and runs the event-driven kernel.
// Supported subset: modules, parameters, wire/reg/integer/time (1-D arrays),
// continuous assigns, gate primitives, always/initial with the usual
// behavioral statements, tasks, functions, and the common system tasks.
SimResult simulate(const std::vector<Module>& modules, const SimOptions& options);

// Elaboration-only pass, used to sanity-check designs without running them.
SimResult elaborate_only(const std::vector<Module>& modules, const std::string& top);

}  // namespace rtlforge::vlog
