#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace metafair::provider {

/// One chat exchange sent to a backend. temperature == 0 requests
/// deterministic decoding where the backend supports it; nullopt leaves the
/// backend default in place (same for max_tokens).
struct ChatRequest {
    std::string system_prompt;
    std::string user_prompt;
    std::optional<double> temperature;
    std::optional<int> max_tokens;
    std::string model_id;
};

enum class ProviderKind { OpenAICompatible, OllamaStyle, ScriptedMock };

struct RetryPolicy {
    std::size_t max_attempts = 3;
    std::chrono::milliseconds backoff_initial{1000};  // doubles per attempt
};

/// One scripted rule: `match` is an ECMAScript regex searched in the user
/// prompt. Responses may use {user_prompt} (echo) and {call_index} (0-based
/// per-rule hit count, for run-to-run variation that stays deterministic).
struct ScriptRule {
    std::string match;
    std::string response;
};

struct MockScript {
    std::vector<ScriptRule> rules;
    std::string default_response;
};

struct ProviderConfig {
    ProviderKind kind = ProviderKind::ScriptedMock;
    std::string name;   // label used in records and reports
    std::string model;  // model id sent to the backend (defaults to name)
    std::optional<std::string> base_url;            // required for HTTP kinds
    std::optional<std::string> credential_env_var;  // bearer token source
    std::chrono::milliseconds timeout{120000};
    RetryPolicy retry;
    std::optional<int> max_tokens;
    std::optional<MockScript> script;  // required for ScriptedMock
    int max_in_flight = 4;

    std::string model_id() const { return model.empty() ? name : model; }
};

/// A reusable backend handle, safe for concurrent use. In-flight calls are
/// bounded per handle (config.max_in_flight).
class Provider {
public:
    virtual ~Provider() = default;

    /// Returns the assistant message text. Retries transient transport
    /// failures per the retry policy; never retries authorization failures.
    /// Throws TransportError, AuthError, TimeoutError,
    /// MalformedBackendResponse.
    virtual std::string complete(const ChatRequest& request) = 0;

    virtual const ProviderConfig& config() const = 0;
};

class ScriptedMockProvider : public Provider {
public:
    virtual std::vector<ChatRequest> transcript() const = 0;
};

std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

/// One-shot convenience: build a transient handle and complete the request.
std::string complete(const ProviderConfig& config, const ChatRequest& request);

/// Builds a deterministic mock config from a script.
ProviderConfig scripted_mock(MockScript script, std::string name = "mock");

ProviderConfig provider_config_from_json(const nlohmann::json& node,
                                         const std::string& name,
                                         const std::filesystem::path& base_dir = {});
nlohmann::json provider_config_to_json(const ProviderConfig& config);

MockScript load_mock_script(const std::filesystem::path& path);

}  // namespace metafair::provider
