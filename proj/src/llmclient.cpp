#include "rtlforge/llmclient.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rtlforge/util.hpp"

namespace rtlforge::llm {

using nlohmann::ordered_json;

namespace {

struct SlotGuard {
    std::mutex& mutex;
    std::condition_variable& cv;
    std::size_t& in_flight;

    ~SlotGuard() {
        {
            std::lock_guard<std::mutex> lock(mutex);
            --in_flight;
        }
        cv.notify_one();
    }
};

ordered_json request_body(const GenRequest& request) {
    ordered_json body;
    body["prompt"] = request.prompt_text;
    body["max_tokens"] = request.max_tokens;
    body["temperature"] = request.temperature;
    body["stop"] = request.stop_sequences;
    return body;
}

}  // namespace

Client::Client(ClientConfig config) : config_(std::move(config)) {
    const std::string& url = config_.endpoint;
    auto scheme_end = url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = url;
        path_ = "/";
    } else {
        scheme_host_port_ = url.substr(0, path_start);
        path_ = url.substr(path_start);
    }
}

std::uint64_t Client::tokens_spent() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return tokens_spent_;
}

void Client::log_line(const std::string& line) {
    if (config_.transcript_path.empty()) return;
    std::lock_guard<std::mutex> lock(log_mutex_);
    util::append_file(config_.transcript_path, line + "\n");
}

GenResponse Client::generate(const GenRequest& request) {
    if (request.max_tokens == 0) {
        throw ClientError(ClientErrorKind::MalformedResponse, "max_tokens must be >= 1");
    }

    std::uint32_t effective_max = request.max_tokens;
    std::uint64_t seq = 0;
    {
        std::unique_lock<std::mutex> lock(mutex_);
        slot_available_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
        ++in_flight_;
        seq = seq_++;
        if (config_.run_token_budget) {
            if (tokens_spent_ >= config_.run_token_budget) {
                --in_flight_;
                throw ClientError(ClientErrorKind::BudgetExceeded,
                                  "run token budget exhausted (" +
                                      std::to_string(config_.run_token_budget) + " tokens)");
            }
            std::uint64_t remaining = config_.run_token_budget - tokens_spent_;
            if (remaining < effective_max)
                effective_max = static_cast<std::uint32_t>(remaining);
        }
    }
    SlotGuard guard{mutex_, slot_available_, in_flight_};

    ordered_json body = request_body(request);
    body["max_tokens"] = effective_max;
    std::string payload = body.dump();

    httplib::Client http(scheme_host_port_);
    http.set_connection_timeout(config_.timeout_s, 0);
    http.set_read_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (!config_.auth_token_env.empty()) {
        if (const char* token = std::getenv(config_.auth_token_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        auto res = http.Post(path_, headers, payload, "application/json");
        bool transient = false;
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            transient = true;
        } else if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            transient = true;
        } else if (res->status != 200) {
            ordered_json err;
            err["seq"] = seq;
            err["request"] = body;
            err["error"] = "http " + std::to_string(res->status);
            log_line(err.dump());
            throw ClientError(ClientErrorKind::MalformedResponse,
                              "endpoint returned status " + std::to_string(res->status));
        } else {
            ordered_json parsed;
            try {
                parsed = ordered_json::parse(res->body);
            } catch (const std::exception& e) {
                ordered_json err;
                err["seq"] = seq;
                err["request"] = body;
                err["error"] = std::string("bad json: ") + e.what();
                log_line(err.dump());
                throw ClientError(ClientErrorKind::MalformedResponse,
                                  std::string("response is not JSON: ") + e.what());
            }
            if (!parsed.contains("text") || !parsed["text"].is_string()) {
                throw ClientError(ClientErrorKind::MalformedResponse,
                                  "response missing 'text'");
            }
            GenResponse out;
            out.text = parsed["text"].get<std::string>();
            std::string reason = parsed.value("finish_reason", "stop");
            out.finish_reason = reason == "length" ? FinishReason::Length
                              : reason == "stop"   ? FinishReason::Stop
                                                   : FinishReason::Error;
            if (parsed.contains("usage") && parsed["usage"].contains("completion_tokens")) {
                out.generated_tokens = parsed["usage"]["completion_tokens"].get<std::uint64_t>();
            }
            // accounting never exceeds what was asked for, so the run budget
            // invariant holds even against a miscounting endpoint
            std::uint64_t charged = std::min<std::uint64_t>(out.generated_tokens, effective_max);
            {
                std::lock_guard<std::mutex> lock(mutex_);
                tokens_spent_ += charged;
            }
            ordered_json rec;
            rec["seq"] = seq;
            rec["request"] = body;
            rec["response"] = parsed;
            log_line(rec.dump());
            return out;
        }
        if (transient && attempt < config_.max_attempts) {
            int delay = config_.backoff_base_ms;
            for (int k = 1; k < attempt; ++k) delay *= 2;
            delay = std::min(delay, config_.backoff_cap_ms);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
    ordered_json err;
    err["seq"] = seq;
    err["request"] = body;
    err["error"] = last_error;
    log_line(err.dump());
    throw ClientError(ClientErrorKind::EndpointUnreachable,
                      "endpoint unreachable after " + std::to_string(config_.max_attempts) +
                          " attempts: " + last_error);
}

std::string wrap_chat_body(const GenRequest& request, const std::string& model_id) {
    ordered_json body;
    body["model"] = model_id;
    body["messages"] = ordered_json::array();
    ordered_json msg;
    msg["role"] = "user";
    msg["content"] = request.prompt_text;
    body["messages"].push_back(msg);
    body["max_tokens"] = request.max_tokens;
    body["temperature"] = request.temperature;
    return body.dump();
}

}  // namespace rtlforge::llm
