#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rtlforge/vlog/ast.hpp"

namespace rtlforge::vlog {

struct PreprocResult {
    std::string text;
    std::vector<Diagnostic> diags;
    bool ok() const { return diags.empty(); }
};

// Text-level pass ahead of parsing: object-like `define expansion,
// `ifdef/`ifndef/`elsif/`else/`endif, `include, (* attribute *) removal, and
// line-directive style controls (`timescale etc.) dropped. Newlines are
// preserved so downstream line numbers still line up.
PreprocResult preprocess(std::string_view source, const std::string& filename,
                         const std::vector<std::filesystem::path>& include_dirs = {});

}  // namespace rtlforge::vlog
