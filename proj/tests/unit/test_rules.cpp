#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rtlforge/rules.hpp"
#include "rtlforge/ttscale.hpp"
#include "support/temp_dir.hpp"

using namespace rtlforge;

TEST_CASE("render_rulegen_prompt") {
    auto prompt = rules::render_rulegen_prompt("# Benchmark\nSome problem.");
    CHECK(prompt.find("List up to 3 critical Verilog coding rules") != std::string::npos);
    CHECK(prompt.find("# Benchmark\nSome problem.") != std::string::npos);

    // empty markdown leaves the prompt otherwise intact
    auto empty = rules::render_rulegen_prompt("");
    CHECK(empty.find("List up to 3 critical Verilog coding rules") != std::string::npos);

    // slot literal in the markdown is not substituted again
    auto adversarial = rules::render_rulegen_prompt("contains {md_content} literally");
    auto first = adversarial.find("contains {md_content} literally");
    REQUIRE(first != std::string::npos);
    CHECK(adversarial.find("contains contains", 0) == std::string::npos);
}

TEST_CASE("extract_rules: well-formed section") {
    std::string response =
        "Potential Pitfalls Analysis\nstuff\n\n"
        "Verilog Coding Rules\n"
        "1. Always declare signal widths explicitly.\n"
        "2. Use nonblocking assignments in clocked blocks.\n"
        "3. Initialize registers on reset.\n";
    auto extract = rules::extract_rules(response);
    REQUIRE(extract.ok);
    REQUIRE(extract.rules.size() == 3);
    CHECK(extract.rules[0] == "Always declare signal widths explicitly.");
    CHECK_FALSE(extract.truncated);
}

TEST_CASE("extract_rules: markdown styling tolerated") {
    std::string response =
        "**Verilog Coding Rules**\n"
        "- rule one\n"
        "- rule two\n\n"
        "Closing remarks follow here.\n";
    auto extract = rules::extract_rules(response);
    REQUIRE(extract.ok);
    CHECK(extract.rules == std::vector<std::string>{"rule one", "rule two"});
}

TEST_CASE("extract_rules: missing section") {
    auto extract = rules::extract_rules("no such heading anywhere\n1. item\n");
    CHECK_FALSE(extract.ok);
}

TEST_CASE("extract_rules: five items keep only three") {
    std::string response = "Verilog Coding Rules\n1. a\n2. b\n3. c\n4. d\n5. e\n";
    auto extract = rules::extract_rules(response);
    REQUIRE(extract.ok);
    CHECK(extract.rules.size() == 3);
    CHECK(extract.truncated);
    CHECK(extract.rules == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("aggregate dedups case-insensitively and caps") {
    std::vector<rules::SourcedRules> lists = {
        {"a.md", {"Keep resets synchronous", "Width match everything"}},
        {"b.md", {"keep resets synchronous", "Third rule"}},
    };
    auto set = rules::aggregate(lists, 10);
    CHECK(set.rules == std::vector<std::string>{"Keep resets synchronous",
                                                "Width match everything", "Third rule"});
    REQUIRE(set.provenance.size() == 3);
    CHECK(set.provenance[2].source == "b.md");

    // 12 distinct rules, cap 10 -> first 10 in order
    std::vector<rules::SourcedRules> many(1);
    many[0].source = "m.md";
    for (int i = 0; i < 12; ++i) many[0].rules.push_back("rule " + std::to_string(i));
    auto capped = rules::aggregate(many, 10);
    CHECK(capped.rules.size() == 10);
    CHECK(capped.rules.front() == "rule 0");
    CHECK(capped.rules.back() == "rule 9");
}

TEST_CASE("aggregate is idempotent and order stable") {
    std::vector<rules::SourcedRules> lists = {
        {"x", {"b rule", "a rule", "b rule", "c rule"}},
    };
    auto once = rules::aggregate(lists, 10);
    auto twice = rules::aggregate({{"agg", once.rules}}, 10);
    CHECK(once.rules == twice.rules);
    CHECK(once.rules == std::vector<std::string>{"b rule", "a rule", "c rule"});
}

TEST_CASE("empty aggregation falls back to the default rule in the corrective prompt") {
    auto set = rules::aggregate({}, 10);
    CHECK(set.rules.empty());
    ttscale::CorrectivePrompt prompt;
    prompt.rules = set.rules;
    CHECK(prompt.render().find(
              "1. Carefully implement output signals based on their timing requirements") !=
          std::string::npos);
}

TEST_CASE("rules file round trip with comments") {
    testsupport::TempDir dir;
    rules::RuleSet set;
    set.rules = {"first rule", "second rule"};
    set.provenance = {{"s", 1}, {"s", 2}};
    auto path = dir.path / "rules.txt";
    rules::save_rules_file(set, path);
    auto loaded = rules::load_rules_file(path);
    CHECK(loaded.rules == set.rules);

    util::write_file(path, "# comment only\nkeep this  \n  \n# more\nand this\n");
    auto parsed = rules::load_rules_file(path);
    CHECK(parsed.rules == std::vector<std::string>{"keep this", "and this"});
}
