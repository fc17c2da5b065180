#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlforge::llm {

enum class GenMode { Fresh, Continuation };

// Completion-style request. In Continuation mode prompt_text is the verbatim
// partial transcript and the endpoint must continue it raw; this is what lets
// a spliced trace resume mid-thought. The chat adapter below cannot do that.
struct GenRequest {
    std::string prompt_text;
    std::uint32_t max_tokens = 1024;
    double temperature = 0.6;
    std::vector<std::string> stop_sequences;
    GenMode mode = GenMode::Fresh;
};

enum class FinishReason { Stop, Length, Error };

struct GenResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
    std::uint64_t generated_tokens = 0;
};

enum class ClientErrorKind { EndpointUnreachable, BudgetExceeded, MalformedResponse };

class ClientError : public std::runtime_error {
public:
    ClientError(ClientErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ClientErrorKind kind() const { return kind_; }

private:
    ClientErrorKind kind_;
};

struct ClientConfig {
    std::string endpoint;                   // e.g. http://127.0.0.1:8080/v1/completions
    std::string auth_token_env = "RTLFORGE_API_TOKEN";
    int timeout_s = 300;
    int max_attempts = 3;                   // total tries per request
    int backoff_base_ms = 100;              // doubles per retry
    int backoff_cap_ms = 2000;
    std::uint64_t run_token_budget = 0;     // cumulative completion tokens; 0 = unlimited
    std::size_t max_in_flight = 4;
    std::filesystem::path transcript_path;  // append-only JSONL; empty = no log
};

class Client {
public:
    explicit Client(ClientConfig config);

    // Transient transport failures retry with capped exponential backoff (at
    // most max_attempts tries); content errors never retry. Throws
    // ClientError on EndpointUnreachable / BudgetExceeded / MalformedResponse.
    GenResponse generate(const GenRequest& request);

    std::uint64_t tokens_spent() const;

private:
    ClientConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    mutable std::mutex mutex_;
    std::condition_variable slot_available_;
    std::size_t in_flight_ = 0;
    std::uint64_t tokens_spent_ = 0;
    std::uint64_t seq_ = 0;
    std::mutex log_mutex_;

    void log_line(const std::string& line);
};

// Lossy adapter: folds a completion request into a chat-style body. Raw
// continuation is impossible over a chat protocol (the transcript gets
// re-wrapped as a message), so iterative splicing must not use this path.
std::string wrap_chat_body(const GenRequest& request, const std::string& model_id);

}  // namespace rtlforge::llm
