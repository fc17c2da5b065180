#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtlforge::prompts {

// Thrown when a required {slot} does not occur in the template text; an empty
// slot VALUE is always legal.
class TemplateSlotMissing : public std::runtime_error {
public:
    explicit TemplateSlotMissing(const std::string& slot)
        : std::runtime_error("template slot missing: {" + slot + "}"), slot_(slot) {}
    const std::string& slot() const { return slot_; }

private:
    std::string slot_;
};

// Compiled-in copies of the template assets under assets/prompts/. A unit
// test pins them byte-equal to the files.
const std::string& problem_template();    // slot: {code}
const std::string& solution_template();   // slots: {reference_code}, {problem}
const std::string& rulegen_template();    // slot: {md_content}

// Single-pass substitution: each {name} occurrence present in `slots` is
// replaced once and never rescanned, so slot values containing {name}
// literals survive untouched. Every slot key must occur in the template at
// least once or TemplateSlotMissing is thrown.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& slots);

}  // namespace rtlforge::prompts
