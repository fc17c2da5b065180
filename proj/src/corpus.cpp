#include "rtlforge/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "rtlforge/pool.hpp"
#include "rtlforge/subprocess.hpp"
#include "rtlforge/util.hpp"

namespace rtlforge::corpus {

using nlohmann::ordered_json;

RtlScript make_script(std::string text, std::string path) {
    RtlScript s;
    s.id = util::content_id(text);
    s.path = std::move(path);
    s.token_count = ngram::lex_rtl(text).size();
    s.text = std::move(text);
    return s;
}

std::vector<bool> dedup_exact(const std::vector<RtlScript>& scripts) {
    std::vector<bool> keep(scripts.size(), false);
    std::map<std::string, std::vector<std::size_t>> by_id;
    for (std::size_t i = 0; i < scripts.size(); ++i) by_id[scripts[i].id].push_back(i);
    for (std::size_t i = 0; i < scripts.size(); ++i) {
        const auto& bucket = by_id[scripts[i].id];
        bool duplicate = false;
        for (std::size_t j : bucket) {
            if (j >= i) break;
            if (scripts[j].text == scripts[i].text) {  // ids collide only on equal text in practice
                duplicate = true;
                break;
            }
        }
        keep[i] = !duplicate;
    }
    return keep;
}

bool filter_length_keep(const RtlScript& script, std::uint64_t max_tokens) {
    return script.token_count <= max_tokens;
}

SyntaxOutcome validate_syntax(const RtlScript& script, const ValidatorConfig& validator,
                              const std::filesystem::path& scratch_dir) {
    if (validator.command.empty())
        throw ValidatorUnavailable("no syntax validator command configured");
    std::filesystem::create_directories(scratch_dir);
    auto file = scratch_dir / (script.id + ".v");
    util::write_file(file, script.text);
    auto argv = util::render_command(validator.command, [&](std::string_view name)
                                                           -> std::optional<std::string> {
        if (name == "file") return file.string();
        return std::nullopt;
    });
    util::RunOptions options;
    options.timeout = std::chrono::milliseconds(validator.timeout_s * 1000);
    auto run = util::run_command(argv, options);
    std::error_code ec;
    std::filesystem::remove(file, ec);
    if (!run.spawned)
        throw ValidatorUnavailable("cannot launch syntax validator: " + run.spawn_error);
    SyntaxOutcome out;
    if (run.timed_out) {
        out.keep = false;
        out.reason = "validator timeout";
        return out;
    }
    out.keep = run.exit_code == 0;
    if (!out.keep) {
        std::string diag = util::trim(run.err.empty() ? run.out : run.err);
        if (diag.size() > 500) diag.resize(500);
        out.reason = diag.empty() ? "validator exit " + std::to_string(run.exit_code) : diag;
    }
    return out;
}

DecontamOutcome decontaminate(const RtlScript& script, const GoldenSet& goldens,
                              double threshold) {
    DecontamOutcome out;
    ngram::ShingleSet shingles = ngram::shingles5(ngram::lex_rtl(script.text, script.id));
    for (const auto& golden : goldens.entries) {
        double score = ngram::jaccard(shingles, golden.shingles);
        if (score > out.score) {
            out.score = score;
            out.matched_benchmark = golden.benchmark_id;
            out.matched_problem = golden.problem_id;
        }
    }
    out.keep = !(out.score > threshold);
    return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw EmbeddingDimensionMismatch("embedding dimensions differ: " +
                                         std::to_string(a.size()) + " vs " +
                                         std::to_string(b.size()));
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return std::nan("");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbedOutcome filter_embedding(const std::vector<double>& embedding,
                              const std::vector<std::vector<double>>& centroids,
                              double min_cosine) {
    EmbedOutcome out;
    double norm = 0;
    for (double v : embedding) norm += v * v;
    if (norm == 0.0) {
        out.keep = false;
        out.reason = "zero-norm embedding (cosine undefined)";
        out.score = 0.0;
        return out;
    }
    double best = -1.0;
    for (const auto& c : centroids) {
        double cs = cosine_similarity(embedding, c);
        if (!std::isnan(cs)) best = std::max(best, cs);
    }
    out.score = best;
    out.keep = best >= min_cosine;
    if (!out.keep) out.reason = "max cosine " + std::to_string(best);
    return out;
}

namespace {

class HttpEmbedder : public EmbeddingProvider {
public:
    explicit HttpEmbedder(EmbeddingConfig config) : config_(std::move(config)) {
        const std::string& url = config_.endpoint;
        auto scheme_end = url.find("://");
        std::size_t path_start =
            scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            host_ = url;
            path_ = "/";
        } else {
            host_ = url.substr(0, path_start);
            path_ = url.substr(path_start);
        }
    }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        httplib::Client http(host_);
        http.set_connection_timeout(config_.timeout_s, 0);
        http.set_read_timeout(config_.timeout_s, 0);
        ordered_json body;
        body["texts"] = texts;
        auto res = http.Post(path_, body.dump(), "application/json");
        if (!res || res->status != 200)
            throw EmbedderUnavailable("embedding endpoint failed: " +
                                      (res ? "status " + std::to_string(res->status)
                                           : httplib::to_string(res.error())));
        ordered_json parsed;
        try {
            parsed = ordered_json::parse(res->body);
        } catch (const std::exception& e) {
            throw EmbedderUnavailable(std::string("embedding response is not JSON: ") + e.what());
        }
        if (!parsed.contains("embeddings"))
            throw EmbedderUnavailable("embedding response missing 'embeddings'");
        std::vector<std::vector<double>> out;
        for (const auto& row : parsed["embeddings"]) {
            out.push_back(row.get<std::vector<double>>());
        }
        if (out.size() != texts.size())
            throw EmbedderUnavailable("embedding count mismatch");
        return out;
    }

private:
    EmbeddingConfig config_;
    std::string host_, path_;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> make_http_embedder(const EmbeddingConfig& config) {
    return std::make_unique<HttpEmbedder>(config);
}

PipelineConfig load_pipeline_config(const std::filesystem::path& json_file) {
    PipelineConfig config;
    auto text = util::read_file(json_file);
    auto j = ordered_json::parse(text);
    config.max_tokens = j.value("max_tokens", config.max_tokens);
    config.decontam_threshold = j.value("decontam_threshold", config.decontam_threshold);
    config.decontaminate_problem_texts =
        j.value("decontaminate_problem_texts", config.decontaminate_problem_texts);
    config.workers = j.value("workers", config.workers);
    if (j.contains("validator")) {
        config.validator.command = j["validator"].value("command", "");
        config.validator.timeout_s = j["validator"].value("timeout_s", 30);
    }
    if (j.contains("embedding")) {
        const auto& e = j["embedding"];
        config.embedding.endpoint = e.value("endpoint", "");
        config.embedding.min_cosine = e.value("min_cosine", 0.3);
        config.embedding.batch = e.value("batch", std::size_t{16});
        if (e.contains("centroid_groups"))
            config.embedding.centroid_groups =
                e["centroid_groups"].get<std::vector<std::vector<std::string>>>();
    }
    return config;
}

GoldenSet load_goldens(const std::filesystem::path& dir, bool include_problem_texts) {
    GoldenSet set;
    if (!std::filesystem::exists(dir)) return set;
    // benchmark layout: problems/<id>/{golden.v, spec.md, ...} or a flat
    // directory of .v goldens
    auto problems = dir / "problems";
    std::filesystem::path scan = std::filesystem::exists(problems) ? problems : dir;
    std::vector<std::filesystem::path> entries;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(scan)) {
        if (entry.is_regular_file()) entries.push_back(entry.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& p : entries) {
        bool is_golden = p.filename() == "golden.v" || (scan == dir && p.extension() == ".v");
        bool is_spec = include_problem_texts && p.filename() == "spec.md";
        if (!is_golden && !is_spec) continue;
        GoldenEntry entry;
        entry.benchmark_id = dir.filename().string();
        entry.problem_id = p.parent_path().filename().string() + (is_spec ? "/spec" : "");
        entry.shingles = ngram::shingles5(ngram::lex_rtl(util::read_file(p)));
        set.entries.push_back(std::move(entry));
    }
    return set;
}

std::vector<RtlScript> load_scripts(const std::filesystem::path& input) {
    std::vector<RtlScript> scripts;
    if (!std::filesystem::exists(input))
        throw std::runtime_error("input not found: " + input.string());
    if (std::filesystem::is_regular_file(input) && input.extension() == ".jsonl") {
        std::ifstream in(input);
        std::string line;
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            auto j = ordered_json::parse(line);
            scripts.push_back(
                make_script(j.value("text", ""), j.value("path", std::string{})));
        }
        return scripts;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(input)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension();
        if (ext == ".v" || ext == ".sv" || ext == ".vh" || ext == ".verilog")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    scripts.reserve(files.size());
    for (const auto& f : files) scripts.push_back(make_script(util::read_file(f), f.string()));
    return scripts;
}

namespace {

struct StageOutcome {
    bool keep = true;
    std::string reason;
    std::string matched;
    double score = 0.0;
    bool has_score = false;
};

struct Checkpoint {
    std::map<std::string, StageOutcome> entries;
    std::filesystem::path file;

    void load(const std::filesystem::path& path) {
        file = path;
        auto text = util::try_read_file(path);
        if (!text) return;
        std::istringstream in(*text);
        std::string line;
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            auto j = ordered_json::parse(line, nullptr, false);
            if (j.is_discarded()) continue;
            StageOutcome outcome;
            outcome.keep = j.value("keep", false);
            outcome.reason = j.value("reason", "");
            outcome.matched = j.value("matched", "");
            outcome.score = j.value("score", 0.0);
            outcome.has_score = j.contains("score");
            entries[j.value("id", "")] = outcome;
        }
    }

    void append(const std::string& id, const StageOutcome& outcome) {
        ordered_json j;
        j["id"] = id;
        j["keep"] = outcome.keep;
        if (!outcome.reason.empty()) j["reason"] = outcome.reason;
        if (!outcome.matched.empty()) j["matched"] = outcome.matched;
        if (outcome.has_score) j["score"] = outcome.score;
        util::append_file(file, j.dump() + "\n");
        entries[id] = outcome;
    }
};

StageStats make_stats(const std::string& name, const std::vector<const RtlScript*>& input,
                      const std::vector<std::uint8_t>& keep) {
    StageStats stats;
    stats.stage = name;
    stats.input_count = input.size();
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (keep[i]) {
            ++stats.retained_count;
            stats.total_tokens_retained += input[i]->token_count;
        } else {
            ++stats.rejected_count;
        }
    }
    return stats;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<RtlScript>& scripts, const GoldenSet& goldens,
                            const PipelineConfig& config, const std::filesystem::path& out_dir,
                            EmbeddingProvider* embedder_override) {
    std::filesystem::create_directories(out_dir);
    auto checkpoints_dir = out_dir / "checkpoints";
    std::filesystem::create_directories(checkpoints_dir);

    PipelineResult result;
    struct Verdict {
        const RtlScript* script;
        bool rejected = false;
        std::string stage;
        std::string reason;
        std::string matched;
        double score = 0.0;
        bool has_score = false;
    };
    // multimap: duplicate texts share an id, and both their rejection and
    // the original's keep must appear; order stays deterministic
    std::multimap<std::string, Verdict> final_verdicts;

    std::vector<const RtlScript*> live;
    live.reserve(scripts.size());
    for (const auto& s : scripts) live.push_back(&s);

    auto apply_stage = [&](const std::string& name, const std::vector<std::uint8_t>& keep,
                           const std::vector<StageOutcome>& outcomes) {
        result.stats.push_back(make_stats(name, live, keep));
        std::vector<const RtlScript*> next;
        next.reserve(live.size());
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (keep[i]) {
                next.push_back(live[i]);
                continue;
            }
            Verdict v;
            v.script = live[i];
            v.rejected = true;
            v.stage = name;
            if (i < outcomes.size()) {
                v.reason = outcomes[i].reason;
                v.matched = outcomes[i].matched;
                v.score = outcomes[i].score;
                v.has_score = outcomes[i].has_score;
            }
            final_verdicts.insert({live[i]->id, std::move(v)});
        }
        live.swap(next);
    };

    // 1. dedup
    {
        std::vector<const RtlScript*> input = live;
        std::vector<std::uint8_t> keep(input.size(), 1);
        std::map<std::string, std::vector<std::size_t>> by_id;
        for (std::size_t i = 0; i < input.size(); ++i) by_id[input[i]->id].push_back(i);
        std::vector<StageOutcome> outcomes(input.size());
        for (std::size_t i = 0; i < input.size(); ++i) {
            for (std::size_t j : by_id[input[i]->id]) {
                if (j >= i) break;
                if (input[j]->text == input[i]->text) {
                    keep[i] = false;
                    outcomes[i].reason = "duplicate of " + input[j]->id;
                    break;
                }
            }
        }
        apply_stage("dedup", keep, outcomes);
    }

    // 2. length
    {
        std::vector<std::uint8_t> keep(live.size(), 0);
        std::vector<StageOutcome> outcomes(live.size());
        for (std::size_t i = 0; i < live.size(); ++i) {
            keep[i] = filter_length_keep(*live[i], config.max_tokens);
            if (!keep[i])
                outcomes[i].reason = "token_count " + std::to_string(live[i]->token_count) +
                                     " exceeds " + std::to_string(config.max_tokens);
        }
        apply_stage("length", keep, outcomes);
    }

    // 3. syntax (checkpointed, external validator)
    {
        Checkpoint ckpt;
        ckpt.load(checkpoints_dir / "syntax.jsonl");
        std::vector<std::uint8_t> keep(live.size(), 0);
        std::vector<StageOutcome> outcomes(live.size());
        auto scratch = out_dir / "scratch";
        std::mutex ckpt_mutex;
        util::parallel_for(live.size(), config.workers, [&](std::size_t i) {
            {
                std::lock_guard<std::mutex> lock(ckpt_mutex);
                auto it = ckpt.entries.find(live[i]->id);
                if (it != ckpt.entries.end()) {
                    outcomes[i] = it->second;
                    keep[i] = it->second.keep;
                    return;
                }
            }
            auto syntax = validate_syntax(*live[i], config.validator, scratch);
            StageOutcome outcome;
            outcome.keep = syntax.keep;
            outcome.reason = syntax.reason;
            outcomes[i] = outcome;
            keep[i] = syntax.keep;
            std::lock_guard<std::mutex> lock(ckpt_mutex);
            ckpt.append(live[i]->id, outcome);
        });
        apply_stage("syntax", keep, outcomes);
    }

    // 4. decontamination (checkpointed)
    {
        Checkpoint ckpt;
        ckpt.load(checkpoints_dir / "decontaminate.jsonl");
        std::vector<std::uint8_t> keep(live.size(), 0);
        std::vector<StageOutcome> outcomes(live.size());
        std::mutex ckpt_mutex;
        util::parallel_for(live.size(), config.workers, [&](std::size_t i) {
            {
                std::lock_guard<std::mutex> lock(ckpt_mutex);
                auto it = ckpt.entries.find(live[i]->id);
                if (it != ckpt.entries.end()) {
                    // the checkpoint stores the score; the verdict always
                    // reflects the current threshold so the cutoff can be
                    // re-tuned without recomputation
                    StageOutcome outcome = it->second;
                    outcome.keep = !(outcome.score > config.decontam_threshold);
                    outcomes[i] = outcome;
                    keep[i] = outcome.keep;
                    return;
                }
            }
            auto dec = decontaminate(*live[i], goldens, config.decontam_threshold);
            StageOutcome outcome;
            outcome.keep = dec.keep;
            outcome.score = dec.score;
            outcome.has_score = true;
            if (!dec.keep) {
                outcome.matched = dec.matched_benchmark + "/" + dec.matched_problem;
                outcome.reason = "jaccard " + std::to_string(dec.score) + " with " +
                                 outcome.matched;
            }
            outcomes[i] = outcome;
            keep[i] = dec.keep;
            std::lock_guard<std::mutex> lock(ckpt_mutex);
            ckpt.append(live[i]->id, outcome);
        });
        apply_stage("decontaminate", keep, outcomes);
    }

    // 5. embedding (optional; scores persisted for threshold re-tuning)
    {
        std::vector<std::uint8_t> keep(live.size(), 1);
        std::vector<StageOutcome> outcomes(live.size());
        std::unique_ptr<EmbeddingProvider> owned;
        EmbeddingProvider* embedder = embedder_override;
        if (!embedder && !config.embedding.endpoint.empty()) {
            owned = make_http_embedder(config.embedding);
            embedder = owned.get();
        }
        if (embedder) {
            std::vector<std::vector<double>> centroids;
            for (const auto& group : config.embedding.centroid_groups) {
                if (group.empty()) continue;
                auto vecs = embedder->embed(group);
                std::vector<double> mean(vecs.empty() ? 0 : vecs[0].size(), 0.0);
                for (const auto& v : vecs) {
                    if (v.size() != mean.size())
                        throw EmbeddingDimensionMismatch("centroid group dimension mismatch");
                    for (std::size_t k = 0; k < v.size(); ++k) mean[k] += v[k];
                }
                for (auto& m : mean) m /= static_cast<double>(vecs.size());
                centroids.push_back(std::move(mean));
            }
            if (centroids.empty())
                throw EmbedderUnavailable("embedding filter enabled but no centroids configured");

            Checkpoint ckpt;
            ckpt.load(checkpoints_dir / "embedding.jsonl");
            std::ofstream scores(out_dir / "embedding_scores.jsonl", std::ios::app);
            for (std::size_t base = 0; base < live.size(); base += config.embedding.batch) {
                std::size_t end = std::min(live.size(), base + config.embedding.batch);
                std::vector<std::string> texts;
                std::vector<std::size_t> idx;
                for (std::size_t i = base; i < end; ++i) {
                    auto it = ckpt.entries.find(live[i]->id);
                    if (it != ckpt.entries.end()) {
                        // re-derive the verdict from the stored score; only
                        // zero-norm rejections are threshold-independent
                        StageOutcome outcome = it->second;
                        if (outcome.reason.find("zero-norm") == std::string::npos) {
                            outcome.keep = outcome.score >= config.embedding.min_cosine;
                        }
                        outcomes[i] = outcome;
                        keep[i] = outcome.keep;
                        continue;
                    }
                    texts.push_back(live[i]->text);
                    idx.push_back(i);
                }
                if (texts.empty()) continue;
                auto embeddings = embedder->embed(texts);
                if (embeddings.size() != texts.size())
                    throw EmbedderUnavailable("embedding batch size mismatch");
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    std::size_t i = idx[k];
                    auto emb = filter_embedding(embeddings[k], centroids,
                                                config.embedding.min_cosine);
                    StageOutcome outcome;
                    outcome.keep = emb.keep;
                    outcome.reason = emb.reason;
                    outcome.score = emb.score;
                    outcome.has_score = true;
                    outcomes[i] = outcome;
                    keep[i] = emb.keep;
                    ckpt.append(live[i]->id, outcome);
                    ordered_json rec;
                    rec["id"] = live[i]->id;
                    rec["score"] = emb.score;
                    scores << rec.dump() << "\n";
                }
            }
        }
        apply_stage("embedding", keep, outcomes);
    }

    for (const RtlScript* s : live) {
        Verdict v;
        v.script = s;
        v.rejected = false;
        v.stage = "retained";
        final_verdicts.insert({s->id, std::move(v)});
    }

    // outputs, ordered by id regardless of worker scheduling
    result.retained = live.size();
    result.corpus_file = out_dir / "corpus.jsonl";
    result.manifest_file = out_dir / "manifest.jsonl";
    result.stats_file = out_dir / "stats.json";

    std::vector<const RtlScript*> retained_sorted = live;
    std::sort(retained_sorted.begin(), retained_sorted.end(),
              [](const RtlScript* a, const RtlScript* b) { return a->id < b->id; });
    {
        std::ostringstream corpus;
        for (const RtlScript* s : retained_sorted) {
            ordered_json rec;
            rec["id"] = s->id;
            rec["text"] = s->text;
            rec["token_count"] = s->token_count;
            corpus << rec.dump() << "\n";
        }
        util::write_file(result.corpus_file, corpus.str());
    }
    {
        std::ostringstream manifest;
        for (const auto& [id, v] : final_verdicts) {
            ordered_json rec;
            rec["id"] = id;
            rec["stage"] = v.stage;
            rec["verdict"] = v.rejected ? "reject" : "keep";
            rec["reason"] = v.reason;
            if (v.has_score) rec["score"] = v.score;
            manifest << rec.dump() << "\n";
        }
        util::write_file(result.manifest_file, manifest.str());
    }
    {
        ordered_json stats = ordered_json::array();
        for (const auto& s : result.stats) {
            ordered_json rec;
            rec["stage"] = s.stage;
            rec["input_count"] = s.input_count;
            rec["rejected_count"] = s.rejected_count;
            rec["retained_count"] = s.retained_count;
            rec["total_tokens_retained"] = s.total_tokens_retained;
            stats.push_back(rec);
        }
        ordered_json top;
        top["token_kind"] = "lexical";
        top["stages"] = stats;
        util::write_file(result.stats_file, top.dump(2) + "\n");
    }
    return result;
}

}  // namespace rtlforge::corpus
