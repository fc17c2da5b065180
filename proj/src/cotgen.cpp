#include "rtlforge/cotgen.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "rtlforge/ngram.hpp"
#include "rtlforge/prompts.hpp"
#include "rtlforge/util.hpp"
#include "rtlforge/vlog/parser.hpp"

namespace rtlforge::cotgen {

using nlohmann::ordered_json;

namespace {

// first well-formed <open>...<close> pair; inner stray opens stay in the body
std::optional<std::pair<std::size_t, std::size_t>> first_pair(std::string_view text,
                                                              std::string_view open,
                                                              std::string_view close) {
    auto o = text.find(open);
    if (o == std::string_view::npos) return std::nullopt;
    auto c = text.find(close, o + open.size());
    if (c == std::string_view::npos) return std::nullopt;
    return std::make_pair(o + open.size(), c);
}

}  // namespace

std::string render_problem_prompt(const std::string& script_text,
                                  const std::string& template_override) {
    const std::string& tmpl =
        template_override.empty() ? prompts::problem_template() : template_override;
    return prompts::render(tmpl, {{"code", script_text}});
}

ProblemExtract extract_problem(std::string_view response) {
    ProblemExtract out;
    auto span = first_pair(response, "<PROBLEM>", "</PROBLEM>");
    if (!span) return out;
    out.ok = true;
    out.spec.problem_text = util::trim(response.substr(span->first, span->second - span->first));
    auto next_open = response.find("<PROBLEM>", span->second);
    out.multiple_pairs = next_open != std::string_view::npos &&
                         response.find("</PROBLEM>", next_open) != std::string_view::npos;
    return out;
}

std::string render_solution_prompt(const Specification& spec, const std::string& reference_code,
                                   const std::string& template_override) {
    const std::string& tmpl =
        template_override.empty() ? prompts::solution_template() : template_override;
    return prompts::render(tmpl, {{"reference_code", reference_code},
                                  {"problem", spec.problem_text}});
}

std::string strip_code_fence(std::string_view text) {
    std::string trimmed = util::trim(text);
    if (!util::starts_with(trimmed, "```")) return trimmed;
    auto first_newline = trimmed.find('\n');
    if (first_newline == std::string::npos) return trimmed;
    std::string_view body = std::string_view(trimmed).substr(first_newline + 1);
    // closing fence must sit on its own final line
    auto close = body.rfind("```");
    if (close == std::string_view::npos) return trimmed;
    std::string_view tail = body.substr(close + 3);
    if (!util::trim(tail).empty()) return trimmed;
    std::string_view inner = body.substr(0, close);
    while (!inner.empty() && (inner.back() == '\n' || inner.back() == '\r'))
        inner.remove_suffix(1);
    return std::string(inner);
}

const char* triple_error_name(TripleError e) {
    switch (e) {
        case TripleError::None: return "none";
        case TripleError::MissingThink: return "missing_think";
        case TripleError::MissingAnswer: return "missing_answer";
        case TripleError::SyntaxRejected: return "syntax_rejected";
    }
    return "?";
}

TripleExtract extract_triple(std::string_view response, const Specification& spec) {
    TripleExtract out;
    auto think = first_pair(response, "<think>", "</think>");
    if (!think) {
        out.error = TripleError::MissingThink;
        out.diagnostic = "no well-formed <think>...</think> pair";
        return out;
    }
    auto answer = first_pair(response, "<answer>", "</answer>");
    if (!answer) {
        out.error = TripleError::MissingAnswer;
        out.diagnostic = "no well-formed <answer>...</answer> pair";
        return out;
    }
    CotTriple triple;
    triple.spec = spec;
    triple.reasoning = std::string(response.substr(think->first, think->second - think->first));
    triple.solution =
        strip_code_fence(response.substr(answer->first, answer->second - answer->first));
    auto diags = vlog::check_source(triple.solution, "answer");
    if (!diags.empty()) {
        out.error = TripleError::SyntaxRejected;
        out.diagnostic = util::trim(vlog::format_diags(diags));
        return out;
    }
    triple.meta.reasoning_lexical_tokens = ngram::lex_rtl(triple.reasoning).size();
    triple.meta.solution_lexical_tokens = ngram::lex_rtl(triple.solution).size();
    out.triple = std::move(triple);
    return out;
}

SynthesisStats synthesize_dataset(const std::vector<corpus::RtlScript>& scripts,
                                  llm::Client& client, const corpus::GoldenSet& goldens,
                                  const SynthesisConfig& config) {
    SynthesisStats stats;
    std::set<std::string> done;
    if (auto existing = util::try_read_file(config.checkpoint_file)) {
        std::istringstream in(*existing);
        std::string line;
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            auto j = ordered_json::parse(line, nullptr, false);
            if (!j.is_discarded()) done.insert(j.value("script_id", ""));
        }
    }

    auto record_outcome = [&](const std::string& id, const std::string& outcome,
                              const std::string& detail) {
        ordered_json j;
        j["script_id"] = id;
        j["outcome"] = outcome;
        if (!detail.empty()) j["detail"] = detail;
        util::append_file(config.checkpoint_file, j.dump() + "\n");
        done.insert(id);
    };

    for (const auto& script : scripts) {
        if (done.count(script.id)) {
            ++stats.resumed_skips;
            continue;
        }
        ++stats.attempted_scripts;

        auto attempt_once = [&]() -> std::pair<TripleExtract, std::string> {
            llm::GenRequest step1;
            step1.prompt_text = render_problem_prompt(script.text);
            step1.max_tokens = config.problem_max_tokens;
            step1.temperature = config.temperature;
            auto resp1 = client.generate(step1);
            auto problem = extract_problem(resp1.text);
            if (!problem.ok) {
                TripleExtract bad;
                bad.error = TripleError::MissingAnswer;
                bad.diagnostic = "problem step produced no <PROBLEM> tags";
                return {bad, "missing_problem_tag"};
            }
            problem.spec.source_script_id = script.id;
            llm::GenRequest step2;
            step2.prompt_text = render_solution_prompt(problem.spec, script.text);
            step2.max_tokens = config.solution_max_tokens;
            step2.temperature = config.temperature;
            auto resp2 = client.generate(step2);
            auto extract = extract_triple(resp2.text, problem.spec);
            if (extract.triple) {
                extract.triple->meta.model_id = config.model_id;
                extract.triple->meta.endpoint_completion_tokens =
                    resp1.generated_tokens + resp2.generated_tokens;
            }
            return {std::move(extract), ""};
        };

        for (int sample = 0; sample < config.samples_per_script; ++sample) {
            try {
                auto [extract, tag] = attempt_once();
                if (!extract.ok() && config.retry_failed_once) {
                    auto retry = attempt_once();
                    extract = std::move(retry.first);
                    tag = retry.second;
                }
                if (!extract.ok()) {
                    ++stats.rejected_count;
                    record_outcome(script.id,
                                   tag.empty() ? triple_error_name(extract.error) : tag,
                                   extract.diagnostic);
                    continue;
                }
                // emission-time contamination re-check
                auto sol_shingles =
                    ngram::shingles5(ngram::lex_rtl(extract.triple->solution));
                double worst = 0.0;
                for (const auto& golden : goldens.entries)
                    worst = std::max(worst, ngram::jaccard(sol_shingles, golden.shingles));
                if (worst > config.decontam_threshold) {
                    ++stats.rejected_count;
                    record_outcome(script.id, "contaminated_solution",
                                   "jaccard " + std::to_string(worst));
                    continue;
                }
                ordered_json rec;
                rec["spec"] = {{"problem_text", extract.triple->spec.problem_text},
                               {"source_script_id", extract.triple->spec.source_script_id}};
                rec["reasoning"] = extract.triple->reasoning;
                rec["solution"] = extract.triple->solution;
                rec["meta"] = {
                    {"model_id", extract.triple->meta.model_id},
                    {"reasoning_lexical_tokens", extract.triple->meta.reasoning_lexical_tokens},
                    {"solution_lexical_tokens", extract.triple->meta.solution_lexical_tokens},
                    {"endpoint_completion_tokens",
                     extract.triple->meta.endpoint_completion_tokens},
                    {"token_kind", "lexical"},
                };
                util::append_file(config.out_file, rec.dump() + "\n");
                ++stats.emitted_triples;
                record_outcome(script.id, "emitted", "");
            } catch (const llm::ClientError& e) {
                ++stats.client_errors;
                ++stats.rejected_count;
                record_outcome(script.id, "client_error", e.what());
                if (e.kind() == llm::ClientErrorKind::BudgetExceeded) return stats;
            }
        }
    }
    return stats;
}

}  // namespace rtlforge::cotgen
