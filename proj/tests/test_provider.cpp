#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/provider.hpp"

using namespace metafair;
using namespace metafair::provider;
using nlohmann::json;

namespace {

ChatRequest request_for(const std::string& user) {
    ChatRequest r;
    r.system_prompt = "system";
    r.user_prompt = user;
    r.model_id = "test-model";
    return r;
}

// Local stub backend with a programmable behaviour per attempt.
struct StubServer {
    httplib::Server server;
    std::thread worker;
    int port = 0;
    std::atomic<int> hits{0};

    template <typename Handler>
    void start(Handler handler) {
        server.Post("/v1/chat/completions",
                    [this, handler](const httplib::Request& req, httplib::Response& res) {
                        handler(++hits, req, res);
                    });
        port = server.bind_to_any_port("127.0.0.1");
        worker = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubServer() {
        server.stop();
        if (worker.joinable()) worker.join();
    }

    ProviderConfig config(std::size_t max_attempts = 3) {
        ProviderConfig c;
        c.kind = ProviderKind::OpenAICompatible;
        c.name = "stub";
        c.model = "test-model";
        c.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
        c.timeout = std::chrono::milliseconds(1000);
        c.retry.max_attempts = max_attempts;
        c.retry.backoff_initial = std::chrono::milliseconds(10);
        return c;
    }
};

void ok_chat_response(httplib::Response& res, const std::string& content) {
    json body = {{"choices", {{{"message", {{"content", content}}}}}}};
    res.set_content(body.dump(), "application/json");
}

}  // namespace

TEST_CASE("scripted mock answers by first matching rule, else default") {
    MockScript script;
    script.rules.push_back({"rate", "4"});
    script.rules.push_back({"suitable response", "Yes"});
    script.default_response = "default answer";
    auto mock = make_provider(scripted_mock(script));

    CHECK(mock->complete(request_for("Please rate this from 1 to 5")) == "4");
    CHECK(mock->complete(request_for("Is the following a suitable response?")) == "Yes");
    CHECK(mock->complete(request_for("nothing matches")) == "default answer");
}

TEST_CASE("scripted mock echoes and counts calls via placeholders") {
    MockScript script;
    script.rules.push_back({"echo", "{user_prompt}"});
    script.default_response = "call {call_index}";
    auto mock = make_provider(scripted_mock(script));

    CHECK(mock->complete(request_for("echo hi")) == "echo hi");
    CHECK(mock->complete(request_for("x")) == "call 0");
    CHECK(mock->complete(request_for("x")) == "call 1");
}

TEST_CASE("scripted mock records a transcript of all calls") {
    MockScript script;
    script.default_response = "ok";
    auto provider = make_provider(scripted_mock(script));
    provider->complete(request_for("one"));
    provider->complete(request_for("two"));
    provider->complete(request_for("three"));

    auto* mock = dynamic_cast<ScriptedMockProvider*>(provider.get());
    REQUIRE(mock != nullptr);
    auto transcript = mock->transcript();
    REQUIRE(transcript.size() == 3);
    CHECK(transcript[0].user_prompt == "one");
    CHECK(transcript[2].user_prompt == "three");
}

TEST_CASE("identical scripted inputs yield identical outputs") {
    MockScript script;
    script.rules.push_back({"^a", "alpha"});
    script.default_response = "omega";
    auto a = make_provider(scripted_mock(script));
    auto b = make_provider(scripted_mock(script));
    for (const char* prompt : {"abc", "zzz", "a tail"}) {
        CHECK(a->complete(request_for(prompt)) == b->complete(request_for(prompt)));
    }
}

TEST_CASE("openai-compatible path sends system+user and parses the reply") {
    StubServer stub;
    std::string seen_body;
    stub.start([&](int, const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        ok_chat_response(res, "backend says hi");
    });

    auto reply = complete(stub.config(), request_for("hello backend"));
    CHECK(reply == "backend says hi");

    json sent = json::parse(seen_body);
    REQUIRE(sent.at("messages").size() == 2);
    CHECK(sent["messages"][0]["role"] == "system");
    CHECK(sent["messages"][1]["role"] == "user");
    CHECK(sent["messages"][1]["content"] == "hello backend");
    CHECK(sent["model"] == "test-model");
    CHECK_FALSE(sent.contains("temperature"));  // backend default left in place
}

TEST_CASE("401 yields AuthError with zero retries") {
    StubServer stub;
    stub.start([&](int, const httplib::Request&, httplib::Response& res) {
        res.status = 401;
    });
    CHECK_THROWS_AS(complete(stub.config(3), request_for("x")), AuthError);
    CHECK(stub.hits.load() == 1);
}

TEST_CASE("missing credential env var fails before any call") {
    StubServer stub;
    stub.start([&](int, const httplib::Request&, httplib::Response& res) {
        ok_chat_response(res, "never");
    });
    auto config = stub.config();
    config.credential_env_var = "METAFAIR_TEST_NO_SUCH_VAR";
    CHECK_THROWS_AS(complete(config, request_for("x")), AuthError);
    CHECK(stub.hits.load() == 0);
}

TEST_CASE("transient 500s are retried until success") {
    StubServer stub;
    stub.start([&](int attempt, const httplib::Request&, httplib::Response& res) {
        if (attempt <= 2) {
            res.status = 500;
        } else {
            ok_chat_response(res, "third time lucky");
        }
    });
    CHECK(complete(stub.config(3), request_for("x")) == "third time lucky");
    CHECK(stub.hits.load() == 3);
}

TEST_CASE("slow responses on attempts 1-2 then success on 3") {
    StubServer stub;
    stub.start([&](int attempt, const httplib::Request&, httplib::Response& res) {
        if (attempt <= 2) std::this_thread::sleep_for(std::chrono::milliseconds(600));
        ok_chat_response(res, "made it");
    });
    auto config = stub.config(3);
    config.timeout = std::chrono::milliseconds(200);  // 600 ms replies must time out
    CHECK(complete(config, request_for("x")) == "made it");
    CHECK(stub.hits.load() == 3);
}

TEST_CASE("retry budget exhaustion reports the transport failure") {
    StubServer stub;
    stub.start([&](int, const httplib::Request&, httplib::Response& res) {
        res.status = 503;
    });
    CHECK_THROWS_AS(complete(stub.config(2), request_for("x")), TransportError);
    CHECK(stub.hits.load() == 2);
}

TEST_CASE("non-retryable client errors do not retry") {
    StubServer stub;
    stub.start([&](int, const httplib::Request&, httplib::Response& res) {
        res.status = 404;
    });
    CHECK_THROWS_AS(complete(stub.config(3), request_for("x")), TransportError);
    CHECK(stub.hits.load() == 1);
}

TEST_CASE("garbage backend bodies raise MalformedBackendResponse") {
    StubServer stub;
    stub.start([&](int, const httplib::Request&, httplib::Response& res) {
        res.set_content("not json", "text/plain");
    });
    CHECK_THROWS_AS(complete(stub.config(), request_for("x")), MalformedBackendResponse);

    StubServer stub2;
    stub2.start([&](int, const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"unexpected": "shape"})", "application/json");
    });
    CHECK_THROWS_AS(complete(stub2.config(), request_for("x")), MalformedBackendResponse);
}

TEST_CASE("complete never mutates the request") {
    MockScript script;
    script.default_response = "ok";
    auto mock = make_provider(scripted_mock(script));
    auto request = request_for("fixed");
    auto copy = request;
    mock->complete(request);
    CHECK(request.user_prompt == copy.user_prompt);
    CHECK(request.system_prompt == copy.system_prompt);
    CHECK(request.model_id == copy.model_id);
}

TEST_CASE("provider config round-trips through JSON") {
    MockScript script;
    script.rules.push_back({"a", "b"});
    script.default_response = "d";
    auto config = scripted_mock(script, "fixture");
    auto node = provider_config_to_json(config);
    auto back = provider_config_from_json(node, "fixture", {});
    REQUIRE(back.script.has_value());
    REQUIRE(back.script->rules.size() == 1);
    CHECK(back.script->rules[0].match == "a");
    CHECK(back.script->default_response == "d");
}
