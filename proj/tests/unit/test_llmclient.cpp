#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rtlforge/llmclient.hpp"
#include "rtlforge/util.hpp"
#include "support/mock_llm.hpp"
#include "support/temp_dir.hpp"

using namespace rtlforge;
using testsupport::MockEndpoint;
using testsupport::MockReply;
using testsupport::MockRequest;

namespace {

llm::ClientConfig fast_config(const std::string& url) {
    llm::ClientConfig config;
    config.endpoint = url;
    config.backoff_base_ms = 1;
    config.backoff_cap_ms = 2;
    config.timeout_s = 5;
    return config;
}

}  // namespace

TEST_CASE("echo mock round trip") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.text = "canned reply";
        return reply;
    });
    llm::Client client(fast_config(mock.url()));
    llm::GenRequest req;
    req.prompt_text = "hello";
    auto resp = client.generate(req);
    CHECK(resp.text == "canned reply");
    CHECK(resp.finish_reason == llm::FinishReason::Stop);
}

TEST_CASE("max_tokens=1 budget boundary reports length") {
    MockEndpoint mock([](const MockRequest& req) {
        MockReply reply;
        reply.text = "w";
        reply.finish_reason = "length";
        reply.completion_tokens = req.max_tokens;
        return reply;
    });
    llm::Client client(fast_config(mock.url()));
    llm::GenRequest req;
    req.max_tokens = 1;
    auto resp = client.generate(req);
    CHECK(resp.finish_reason == llm::FinishReason::Length);
    CHECK(resp.generated_tokens == 1);
}

TEST_CASE("continuation passes the transcript through verbatim") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.text = " D";
        return reply;
    });
    llm::Client client(fast_config(mock.url()));
    llm::GenRequest req;
    req.prompt_text = "A B C";
    req.mode = llm::GenMode::Continuation;
    client.generate(req);
    auto seen = mock.requests();
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].prompt == "A B C");
}

TEST_CASE("transient failures retry with backoff, then succeed") {
    std::atomic<int> calls{0};
    MockEndpoint mock([&](const MockRequest&) {
        MockReply reply;
        if (calls.fetch_add(1) < 2) {
            reply.status = 500;
            return reply;
        }
        reply.text = "finally";
        return reply;
    });
    llm::Client client(fast_config(mock.url()));
    auto resp = client.generate(llm::GenRequest{});
    CHECK(resp.text == "finally");
    CHECK(mock.hit_count() == 3);
}

TEST_CASE("gives up after max attempts") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.status = 503;
        return reply;
    });
    llm::Client client(fast_config(mock.url()));
    CHECK_THROWS_AS(client.generate(llm::GenRequest{}), llm::ClientError);
    CHECK(mock.hit_count() == 3);
}

TEST_CASE("content errors never retry") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.raw_body = "this is not json";
        return reply;
    });
    llm::Client client(fast_config(mock.url()));
    try {
        client.generate(llm::GenRequest{});
        FAIL("expected ClientError");
    } catch (const llm::ClientError& e) {
        CHECK(e.kind() == llm::ClientErrorKind::MalformedResponse);
    }
    CHECK(mock.hit_count() == 1);
}

TEST_CASE("unreachable endpoint") {
    llm::Client client(fast_config("http://127.0.0.1:1/v1/completions"));
    try {
        client.generate(llm::GenRequest{});
        FAIL("expected ClientError");
    } catch (const llm::ClientError& e) {
        CHECK(e.kind() == llm::ClientErrorKind::EndpointUnreachable);
    }
}

TEST_CASE("run budget is a hard cap on cumulative tokens") {
    MockEndpoint mock([](const MockRequest& req) {
        MockReply reply;
        reply.text = "tok";
        reply.finish_reason = "length";
        reply.completion_tokens = req.max_tokens;  // endpoint consumes everything allowed
        return reply;
    });
    auto config = fast_config(mock.url());
    config.run_token_budget = 100;
    llm::Client client(config);

    llm::GenRequest req;
    req.max_tokens = 40;
    client.generate(req);
    client.generate(req);
    // 80 spent; the third call is clamped to the remaining 20
    auto third = client.generate(req);
    CHECK(third.generated_tokens == 20);
    CHECK(client.tokens_spent() == 100);
    CHECK_THROWS_AS(client.generate(req), llm::ClientError);
    CHECK(client.tokens_spent() <= 100);
}

TEST_CASE("bearer token picked up from the configured environment variable") {
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.text = "ok";
        return reply;
    });
    ::setenv("RTLFORGE_TEST_TOKEN", "sekrit", 1);
    auto config = fast_config(mock.url());
    config.auth_token_env = "RTLFORGE_TEST_TOKEN";
    llm::Client client(config);
    client.generate(llm::GenRequest{});
    auto seen = mock.requests();
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].authorization == "Bearer sekrit");
    ::unsetenv("RTLFORGE_TEST_TOKEN");
}

TEST_CASE("transcript log is append-only jsonl") {
    testsupport::TempDir dir;
    MockEndpoint mock([](const MockRequest&) {
        MockReply reply;
        reply.text = "ok";
        return reply;
    });
    auto config = fast_config(mock.url());
    config.transcript_path = dir.path / "log.jsonl";
    llm::Client client(config);
    client.generate(llm::GenRequest{});
    client.generate(llm::GenRequest{});
    auto log = util::read_file(config.transcript_path);
    CHECK(std::count(log.begin(), log.end(), '\n') == 2);
    CHECK(log.find("\"response\"") != std::string::npos);
}
