#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rtlforge::rules {

struct RuleProvenance {
    std::string source;  // benchmark file or "fallback"
    int index = 0;       // position within its source response
};

struct RuleSet {
    std::vector<std::string> rules;
    std::vector<RuleProvenance> provenance;  // parallel to rules
};

// Default rule used when no generated rules exist, so the corrective prompt
// always renders with at least one rule.
const std::string& fallback_rule();

std::string render_rulegen_prompt(const std::string& markdown,
                                  const std::string& template_override = {});

struct RulesExtract {
    bool ok = false;        // false: SectionMissing
    std::vector<std::string> rules;
    bool truncated = false; // more than 3 items were present; first 3 kept
};
// Parses the section headed "Verilog Coding Rules" and returns its list
// items, at most 3 per response.
RulesExtract extract_rules(std::string_view response);

struct SourcedRules {
    std::string source;
    std::vector<std::string> rules;
};

// Concatenates in input order, removes case-insensitive exact duplicates,
// caps at max_rules. aggregate(aggregate(X)) == aggregate(X).
RuleSet aggregate(const std::vector<SourcedRules>& lists, std::size_t max_rules = 10);

// Rules file: UTF-8, one rule per line, '#' starts a comment.
RuleSet load_rules_file(const std::filesystem::path& path);
void save_rules_file(const RuleSet& set, const std::filesystem::path& path);

}  // namespace rtlforge::rules
