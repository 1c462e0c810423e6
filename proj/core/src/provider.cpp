#include "metafair/provider.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <regex>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/text.hpp"

namespace metafair::provider {

namespace {

using nlohmann::json;

std::string substitute(std::string templ, const ChatRequest& request,
                       std::size_t call_index) {
    return text::render_placeholders(
        templ, {{"user_prompt", request.user_prompt},
                {"call_index", std::to_string(call_index)}});
}

class ScriptedMockImpl : public ScriptedMockProvider {
public:
    explicit ScriptedMockImpl(ProviderConfig config) : config_(std::move(config)) {
        if (!config_.script) throw ConfigError("scripted mock requires a script");
        for (const auto& rule : config_.script->rules) {
            patterns_.emplace_back(rule.match,
                                   std::regex::ECMAScript | std::regex::icase);
        }
        hits_.assign(patterns_.size() + 1, 0);  // last slot: default-rule hits
    }

    std::string complete(const ChatRequest& request) override {
        std::lock_guard lock(mutex_);
        transcript_.push_back(request);
        const auto& script = *config_.script;
        for (std::size_t i = 0; i < patterns_.size(); ++i) {
            if (std::regex_search(request.user_prompt, patterns_[i])) {
                return substitute(script.rules[i].response, request, hits_[i]++);
            }
        }
        return substitute(script.default_response, request, hits_.back()++);
    }

    const ProviderConfig& config() const override { return config_; }

    std::vector<ChatRequest> transcript() const override {
        std::lock_guard lock(mutex_);
        return transcript_;
    }

private:
    ProviderConfig config_;
    std::vector<std::regex> patterns_;
    std::vector<std::size_t> hits_;
    mutable std::mutex mutex_;
    std::vector<ChatRequest> transcript_;
};

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // leading path prefix, no trailing slash
};

ParsedUrl parse_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("base_url must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.origin = url;
    } else {
        out.origin = url.substr(0, path_start);
        out.path = url.substr(path_start);
        while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    }
    return out;
}

class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig config)
        : config_(std::move(config)),
          slots_(config_.max_in_flight > 0 ? config_.max_in_flight : 1) {
        if (!config_.base_url) throw ConfigError("HTTP provider requires base_url");
        url_ = parse_base_url(*config_.base_url);
    }

    std::string complete(const ChatRequest& request) override {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<256>& s;
            ~Release() { s.release(); }
        } release{slots_};

        std::string token;
        if (config_.credential_env_var) {
            const char* value = std::getenv(config_.credential_env_var->c_str());
            if (value == nullptr || *value == '\0') {
                throw AuthError("credential environment variable '" +
                                *config_.credential_env_var + "' is not set");
            }
            token = value;
        }

        const auto [path, body] = build_request(request);

        const std::size_t attempts =
            config_.retry.max_attempts > 0 ? config_.retry.max_attempts : 1;
        std::string last_failure = "no attempt made";
        bool saw_timeout = false;
        for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
            if (attempt > 1) {
                auto delay = config_.retry.backoff_initial * (1LL << (attempt - 2));
                std::this_thread::sleep_for(delay);
            }

            httplib::Client client(url_.origin);
            client.set_connection_timeout(config_.timeout);
            client.set_read_timeout(config_.timeout);
            client.set_write_timeout(config_.timeout);
            httplib::Headers headers;
            if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

            auto res = client.Post(url_.path + path, headers, body, "application/json");
            if (!res) {
                auto err = res.error();
                if (err == httplib::Error::ConnectionTimeout ||
                    err == httplib::Error::Read)
                    saw_timeout = true;
                last_failure = "transport failure: " + httplib::to_string(err);
                continue;  // transient; retry
            }
            if (res->status == 401 || res->status == 403) {
                throw AuthError("backend rejected credentials (status " +
                                std::to_string(res->status) + ")");
            }
            if (res->status == 408 || res->status == 429 || res->status >= 500) {
                last_failure = "status " + std::to_string(res->status);
                continue;  // transient; retry
            }
            if (res->status < 200 || res->status >= 300) {
                throw TransportError("backend returned status " +
                                     std::to_string(res->status) + " for " + path);
            }
            return extract_message(res->body);
        }
        const std::string detail = config_.name + " after " + std::to_string(attempts) +
                                   " attempt(s): " + last_failure;
        if (saw_timeout) throw TimeoutError(detail);
        throw TransportError(detail);
    }

    const ProviderConfig& config() const override { return config_; }

private:
    std::pair<std::string, std::string> build_request(const ChatRequest& request) const {
        json body;
        if (config_.kind == ProviderKind::OpenAICompatible) {
            body["model"] = request.model_id;
            body["messages"] = json::array();
            if (!request.system_prompt.empty()) {
                body["messages"].push_back(
                    {{"role", "system"}, {"content", request.system_prompt}});
            }
            body["messages"].push_back({{"role", "user"}, {"content", request.user_prompt}});
            if (request.temperature) body["temperature"] = *request.temperature;
            if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
            return {"/chat/completions", body.dump()};
        }
        // Ollama-style /api/generate: system and user concatenated into one prompt.
        body["model"] = request.model_id;
        std::string prompt = request.user_prompt;
        if (!request.system_prompt.empty()) {
            prompt = request.system_prompt + "\n\n" + request.user_prompt;
        }
        body["prompt"] = prompt;
        body["stream"] = false;
        json options = json::object();
        if (request.temperature) options["temperature"] = *request.temperature;
        if (request.max_tokens) options["num_predict"] = *request.max_tokens;
        if (!options.empty()) body["options"] = options;
        return {"/api/generate", body.dump()};
    }

    std::string extract_message(const std::string& body) const {
        json doc = json::parse(body, nullptr, false);
        if (doc.is_discarded())
            throw MalformedBackendResponse("backend body is not JSON");
        try {
            if (config_.kind == ProviderKind::OpenAICompatible) {
                return doc.at("choices").at(0).at("message").at("content").get<std::string>();
            }
            return doc.at("response").get<std::string>();
        } catch (const json::exception& e) {
            throw MalformedBackendResponse(std::string("unexpected backend shape: ") +
                                           e.what());
        }
    }

    ProviderConfig config_;
    ParsedUrl url_;
    std::counting_semaphore<256> slots_;
};

}  // namespace

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
    if (config.kind == ProviderKind::ScriptedMock) {
        return std::make_shared<ScriptedMockImpl>(config);
    }
    return std::make_shared<HttpProvider>(config);
}

std::string complete(const ProviderConfig& config, const ChatRequest& request) {
    return make_provider(config)->complete(request);
}

ProviderConfig scripted_mock(MockScript script, std::string name) {
    ProviderConfig config;
    config.kind = ProviderKind::ScriptedMock;
    config.name = std::move(name);
    config.script = std::move(script);
    return config;
}

namespace {

ProviderKind parse_kind(const std::string& s) {
    if (s == "openai_compatible" || s == "openai") return ProviderKind::OpenAICompatible;
    if (s == "ollama" || s == "ollama_style") return ProviderKind::OllamaStyle;
    if (s == "scripted_mock" || s == "mock") return ProviderKind::ScriptedMock;
    throw ConfigError("unknown provider kind: " + s);
}

std::string kind_name(ProviderKind k) {
    switch (k) {
        case ProviderKind::OpenAICompatible: return "openai_compatible";
        case ProviderKind::OllamaStyle: return "ollama_style";
        case ProviderKind::ScriptedMock: return "scripted_mock";
    }
    return "unknown";
}

MockScript mock_script_from_json(const json& node) {
    MockScript script;
    if (node.contains("rules")) {
        for (const auto& rule : node.at("rules")) {
            script.rules.push_back({rule.at("match").get<std::string>(),
                                    rule.at("response").get<std::string>()});
        }
    }
    script.default_response = node.value("default_response", std::string{});
    return script;
}

}  // namespace

MockScript load_mock_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("mock script is not valid JSON: " + path.string());
    return mock_script_from_json(doc);
}

ProviderConfig provider_config_from_json(const json& node, const std::string& name,
                                         const std::filesystem::path& base_dir) {
    if (!node.is_object()) throw ConfigError("provider '" + name + "' must be an object");
    ProviderConfig config;
    config.name = name;
    config.kind = parse_kind(node.value("kind", std::string("openai_compatible")));
    config.model = node.value("model", std::string{});
    if (node.contains("base_url")) config.base_url = node.at("base_url").get<std::string>();
    if (node.contains("credential_env_var"))
        config.credential_env_var = node.at("credential_env_var").get<std::string>();
    if (node.contains("timeout_s"))
        config.timeout = std::chrono::seconds(node.at("timeout_s").get<long>());
    if (node.contains("max_attempts"))
        config.retry.max_attempts = node.at("max_attempts").get<std::size_t>();
    if (node.contains("backoff_initial_ms"))
        config.retry.backoff_initial =
            std::chrono::milliseconds(node.at("backoff_initial_ms").get<long>());
    if (node.contains("max_tokens")) config.max_tokens = node.at("max_tokens").get<int>();
    if (node.contains("max_in_flight"))
        config.max_in_flight = node.at("max_in_flight").get<int>();

    if (config.kind == ProviderKind::ScriptedMock) {
        if (node.contains("script")) {
            config.script = mock_script_from_json(node.at("script"));
        } else if (node.contains("script_path")) {
            std::filesystem::path p = node.at("script_path").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            config.script = load_mock_script(p);
        } else {
            throw ConfigError("scripted mock '" + name + "' needs 'script' or 'script_path'");
        }
    } else if (!config.base_url) {
        throw ConfigError("provider '" + name + "' (" + kind_name(config.kind) +
                          ") requires base_url");
    }
    return config;
}

json provider_config_to_json(const ProviderConfig& config) {
    json node;
    node["kind"] = kind_name(config.kind);
    if (!config.model.empty()) node["model"] = config.model;
    if (config.base_url) node["base_url"] = *config.base_url;
    if (config.credential_env_var) node["credential_env_var"] = *config.credential_env_var;
    node["timeout_s"] =
        std::chrono::duration_cast<std::chrono::seconds>(config.timeout).count();
    node["max_attempts"] = config.retry.max_attempts;
    node["backoff_initial_ms"] = config.retry.backoff_initial.count();
    if (config.max_tokens) node["max_tokens"] = *config.max_tokens;
    if (config.script) {
        json script;
        script["rules"] = json::array();
        for (const auto& rule : config.script->rules) {
            script["rules"].push_back({{"match", rule.match}, {"response", rule.response}});
        }
        script["default_response"] = config.script->default_response;
        node["script"] = script;
    }
    return node;
}

}  // namespace metafair::provider
