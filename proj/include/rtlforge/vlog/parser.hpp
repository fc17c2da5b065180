#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rtlforge/vlog/ast.hpp"

namespace rtlforge::vlog {

struct ParseResult {
    std::vector<Module> modules;
    std::vector<Diagnostic> diags;
    bool ok() const { return diags.empty(); }
};

// Preprocesses then parses one source text. All syntax problems land in
// diags; the returned modules are whatever parsed cleanly.
ParseResult parse_source(std::string_view source, const std::string& filename,
                         const std::vector<std::filesystem::path>& include_dirs = {});

// Convenience used by the syntax-validator CLI and triple validation.
std::vector<Diagnostic> check_source(std::string_view source, const std::string& filename);

std::string format_diags(const std::vector<Diagnostic>& diags);

}  // namespace rtlforge::vlog
