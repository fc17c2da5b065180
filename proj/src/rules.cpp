#include "rtlforge/rules.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "rtlforge/prompts.hpp"
#include "rtlforge/util.hpp"

namespace rtlforge::rules {

const std::string& fallback_rule() {
    static const std::string rule =
        "Carefully implement output signals based on their timing requirements";
    return rule;
}

std::string render_rulegen_prompt(const std::string& markdown,
                                  const std::string& template_override) {
    const std::string& tmpl =
        template_override.empty() ? prompts::rulegen_template() : template_override;
    return prompts::render(tmpl, {{"md_content", markdown}});
}

namespace {

// normalizes a heading line: markdown markers and trailing colon removed
std::string heading_text(std::string_view line) {
    std::string t = util::trim(line);
    while (!t.empty() && (t.front() == '#' || t.front() == '*' || t.front() == '_'))
        t.erase(t.begin());
    while (!t.empty() && (t.back() == '*' || t.back() == '_' || t.back() == ':' ||
                          t.back() == '#'))
        t.pop_back();
    return util::trim(t);
}

// "1. text" / "2) text" / "- text" / "* text" -> text; empty if not a list item
std::string list_item_text(std::string_view line) {
    std::string t = util::trim(line);
    if (t.empty()) return {};
    if (t[0] == '-' || t[0] == '*') {
        std::string rest = util::trim(t.substr(1));
        return rest;
    }
    std::size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) {
        return util::trim(t.substr(i + 1));
    }
    return {};
}

// strips surrounding bold/emphasis markers from an extracted rule
std::string clean_rule(std::string s) {
    std::string t = util::trim(s);
    while (t.size() >= 4 && util::starts_with(t, "**") && util::ends_with(t, "**"))
        t = util::trim(t.substr(2, t.size() - 4));
    return t;
}

}  // namespace

RulesExtract extract_rules(std::string_view response) {
    RulesExtract out;
    std::istringstream in{std::string(response)};
    std::string line;
    bool in_section = false;
    std::vector<std::string> items;
    while (std::getline(in, line)) {
        if (!in_section) {
            if (heading_text(line) == "Verilog Coding Rules") in_section = true;
            continue;
        }
        std::string item = list_item_text(line);
        if (!item.empty()) {
            items.push_back(clean_rule(item));
            continue;
        }
        if (util::trim(line).empty()) continue;
        // prose before the list is skipped; prose after it ends the section
        if (!items.empty()) break;
    }
    if (!in_section) return out;
    out.ok = true;
    if (items.size() > 3) {
        out.truncated = true;
        items.resize(3);
    }
    out.rules = std::move(items);
    return out;
}

RuleSet aggregate(const std::vector<SourcedRules>& lists, std::size_t max_rules) {
    RuleSet set;
    std::set<std::string> seen;
    for (const auto& src : lists) {
        int index = 0;
        for (const auto& rule : src.rules) {
            std::string trimmed = util::trim(rule);
            ++index;
            if (trimmed.empty()) continue;
            std::string key = util::lower(trimmed);
            if (!seen.insert(key).second) continue;
            if (set.rules.size() >= max_rules) return set;
            set.rules.push_back(trimmed);
            set.provenance.push_back(RuleProvenance{src.source, index});
        }
    }
    return set;
}

RuleSet load_rules_file(const std::filesystem::path& path) {
    RuleSet set;
    auto text = util::read_file(path);
    std::istringstream in(text);
    std::string line;
    int index = 0;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        std::string body = util::trim(hash == std::string::npos ? line : line.substr(0, hash));
        ++index;
        if (body.empty()) continue;
        set.rules.push_back(body);
        set.provenance.push_back(RuleProvenance{path.string(), index});
    }
    return set;
}

void save_rules_file(const RuleSet& set, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "# one rule per line; lines starting with # are comments\n";
    for (const auto& rule : set.rules) out << rule << "\n";
    util::write_file(path, out.str());
}

}  // namespace rtlforge::rules
