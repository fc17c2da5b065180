#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtlforge/bencheval.hpp"
#include "rtlforge/cotgen.hpp"
#include "rtlforge/ngram.hpp"
#include "rtlforge/prompts.hpp"
#include "rtlforge/rules.hpp"
#include "rtlforge/sftpack.hpp"
#include "rtlforge/ttscale.hpp"
#include "rtlforge/vlog/parser.hpp"

namespace py = pybind11;

namespace {

std::vector<std::string> lex_tokens(const std::string& source) {
    std::vector<std::string> out;
    for (const auto& tok : rtlforge::ngram::lex_rtl(source).tokens) out.push_back(tok.text);
    return out;
}

double jaccard_texts(const std::string& a, const std::string& b) {
    using namespace rtlforge::ngram;
    return jaccard(shingles5(lex_rtl(a)), shingles5(lex_rtl(b)));
}

std::size_t shingle_count(const std::string& text) {
    return rtlforge::ngram::shingles5(rtlforge::ngram::lex_rtl(text)).count();
}

bool check_syntax(const std::string& source) {
    return rtlforge::vlog::check_source(source, "<python>").empty();
}

std::string splice_text(const std::string& transcript, std::size_t prompt_len,
                        const std::vector<std::string>& rules) {
    rtlforge::ttscale::ReasoningTrace trace;
    trace.transcript = transcript;
    trace.prompt_len = prompt_len;
    rtlforge::ttscale::CorrectivePrompt prompt;
    prompt.rules = rules;
    return rtlforge::ttscale::splice_corrective(trace, prompt).trace.transcript;
}

py::object extract_solution_text(const std::string& transcript, std::size_t prompt_len) {
    rtlforge::ttscale::ReasoningTrace trace;
    trace.transcript = transcript;
    trace.prompt_len = prompt_len;
    auto solution = rtlforge::ttscale::extract_solution(trace);
    if (!solution) return py::none();
    return py::str(*solution);
}

py::object truncate_text(const std::string& transcript, std::size_t prompt_len,
                         std::uint32_t keep_waits) {
    rtlforge::ttscale::ReasoningTrace trace;
    trace.transcript = transcript;
    trace.prompt_len = prompt_len;
    auto result = rtlforge::ttscale::truncate_reasoning(trace, keep_waits);
    if (!result.truncated) return py::none();
    return py::str(result.trace.transcript);
}

py::dict pack_triples(const std::vector<std::tuple<std::string, std::string, std::string>>& triples,
                      std::uint32_t chunk_len, bool with_specials) {
    auto tokenizer = rtlforge::sftpack::make_byte_tokenizer(with_specials);
    std::vector<rtlforge::sftpack::MaskedSequence> sequences;
    for (const auto& [x, r, y] : triples) {
        rtlforge::cotgen::CotTriple triple;
        triple.spec.problem_text = x;
        triple.reasoning = r;
        triple.solution = y;
        sequences.push_back(rtlforge::sftpack::build_masked_sequence(triple, *tokenizer));
    }
    auto chunks = rtlforge::sftpack::pack_chunks(sequences, chunk_len);
    py::list out;
    std::uint64_t mask_total = 0;
    for (const auto& chunk : chunks) {
        py::dict d;
        d["ids"] = chunk.token_ids;
        d["mask"] = chunk.loss_mask;
        d["pad_start"] = chunk.pad_start;
        d["docs"] = chunk.docs.size();
        out.append(d);
        for (auto m : chunk.loss_mask) mask_total += m;
    }
    py::dict result;
    result["chunks"] = out;
    result["mask_total"] = mask_total;
    return result;
}

}  // namespace

PYBIND11_MODULE(_rtlforge, m) {
    m.doc() = "RTL reasoning-data toolchain core operations";

    m.def("lex_tokens", &lex_tokens, py::arg("source"),
          "Deterministic lexical tokens of an RTL source");
    m.def("shingle_count", &shingle_count, py::arg("text"), "Number of unique 5-gram shingles");
    m.def("jaccard", &jaccard_texts, py::arg("a"), py::arg("b"),
          "5-gram Jaccard similarity of two sources");
    m.def("check_syntax", &check_syntax, py::arg("source"),
          "True when the source parses as Verilog-2005");
    m.def("pass_at_k", &rtlforge::bencheval::pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"),
          "Unbiased pass@k estimate");
    m.def("render_problem_prompt", [](const std::string& code) {
        return rtlforge::cotgen::render_problem_prompt(code);
    });
    m.def("render_solution_prompt", [](const std::string& problem, const std::string& reference) {
        rtlforge::cotgen::Specification spec;
        spec.problem_text = problem;
        return rtlforge::cotgen::render_solution_prompt(spec, reference);
    });
    m.def("render_rulegen_prompt", [](const std::string& markdown) {
        return rtlforge::rules::render_rulegen_prompt(markdown);
    });
    m.def("extract_problem", [](const std::string& response) -> py::object {
        auto extract = rtlforge::cotgen::extract_problem(response);
        if (!extract.ok) return py::none();
        return py::str(extract.spec.problem_text);
    });
    m.def("corrective_prompt", [](const std::vector<std::string>& rules) {
        rtlforge::ttscale::CorrectivePrompt prompt;
        prompt.rules = rules;
        return prompt.render();
    });
    m.def("splice_corrective", &splice_text, py::arg("transcript"), py::arg("prompt_len"),
          py::arg("rules"));
    m.def("extract_solution", &extract_solution_text, py::arg("transcript"),
          py::arg("prompt_len"));
    m.def("truncate_reasoning", &truncate_text, py::arg("transcript"), py::arg("prompt_len"),
          py::arg("keep_waits"));
    m.def("pack_byte_triples", &pack_triples, py::arg("triples"), py::arg("chunk_len") = 32768,
          py::arg("with_specials") = true);
}
