#include "metafair/serve.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"

namespace metafair::serve {

using nlohmann::json;

struct Service::Impl {
    harness::PipelineContext ctx;
    harness::ProviderSet providers;
    httplib::Server server;
    std::thread worker;
    int bound_port = 0;

    explicit Impl(harness::HarnessConfig config)
        : ctx(harness::make_context(std::move(config))), providers(ctx.config) {
        wire();
    }

    static void error_body(httplib::Response& res, int status, const std::string& code,
                           const std::string& message) {
        res.status = status;
        res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(),
                        "application/json");
    }

    // Maps thrown errors onto status codes: config/schema problems are the
    // caller's fault (400), provider trouble is upstream (502).
    template <typename Fn>
    void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        json body = json::object();
        if (!req.body.empty()) {
            body = json::parse(req.body, nullptr, false);
            if (body.is_discarded()) {
                error_body(res, 400, "bad_json", "request body is not valid JSON");
                return;
            }
        }
        try {
            json reply = fn(body);
            res.status = 200;
            res.set_content(reply.dump(), "application/json");
        } catch (const TransportError& e) {
            error_body(res, 502, e.code(), e.what());
        } catch (const TimeoutError& e) {
            error_body(res, 502, e.code(), e.what());
        } catch (const ProviderUnreachable& e) {
            error_body(res, 502, e.code(), e.what());
        } catch (const AuthError& e) {
            error_body(res, 502, e.code(), e.what());
        } catch (const MalformedBackendResponse& e) {
            error_body(res, 502, e.code(), e.what());
        } catch (const Error& e) {
            error_body(res, 400, e.code(), e.what());
        } catch (const json::exception& e) {
            error_body(res, 400, "schema_error", e.what());
        }
    }

    void wire() {
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(
                json{{"status", "ok"}, {"version", harness::tool_version()}}.dump(),
                "application/json");
        });

        server.Post("/generate", [this](const httplib::Request& req,
                                        httplib::Response& res) {
            handle(req, res, [this](const json& body) {
                // The fragment reuses campaign config fields; providers and
                // the generator come from the service config.
                harness::HarnessConfig fragment = ctx.config;
                fragment.campaign = CampaignConfig{};
                json merged = body;
                if (!merged.contains("relations"))
                    throw SchemaError("'relations' is required");
                auto campaign_cfg =
                    harness::config_from_json(merged, std::filesystem::path{});
                fragment.campaign = campaign_cfg.campaign;
                if (merged.contains("seed")) fragment.seed = campaign_cfg.seed;

                harness::PipelineContext local{fragment, ctx.catalogue, ctx.clock};
                auto result = harness::stage_generate(local, providers);
                json reply;
                reply["tests"] = json::array();
                for (const auto& t : result.tests)
                    reply["tests"].push_back(jsonl::to_json(t));
                reply["shortfalls"] = json::array();
                for (const auto& s : result.shortfalls) {
                    reply["shortfalls"].push_back(
                        {{"mr_id", s.mr_id},
                         {"dimension", std::string(dimension_name(s.dimension))},
                         {"requested", s.requested},
                         {"produced", s.produced}});
                }
                return reply;
            });
        });

        server.Post("/execute", [this](const httplib::Request& req,
                                       httplib::Response& res) {
            handle(req, res, [this](const json& body) {
                if (!body.contains("tests")) throw SchemaError("'tests' is required");
                if (!body.contains("model")) throw SchemaError("'model' is required");
                std::vector<MetamorphicTest> tests;
                for (const auto& node : body.at("tests"))
                    tests.push_back(jsonl::test_from_json(node));
                const std::string model = body.at("model").get<std::string>();
                const std::size_t repeats = body.value("repeats", std::size_t{1});
                std::optional<double> temperature;
                if (body.contains("temperature"))
                    temperature = body.at("temperature").get<double>();

                auto records = harness::stage_execute(ctx, providers, tests, model,
                                                      repeats, temperature);
                json reply;
                reply["records"] = json::array();
                for (const auto& r : records) reply["records"].push_back(jsonl::to_json(r));
                return reply;
            });
        });

        server.Post("/evaluate", [this](const httplib::Request& req,
                                        httplib::Response& res) {
            handle(req, res, [this](const json& body) {
                if (!body.contains("tests")) throw SchemaError("'tests' is required");
                if (!body.contains("records")) throw SchemaError("'records' is required");
                std::vector<MetamorphicTest> tests;
                for (const auto& node : body.at("tests"))
                    tests.push_back(jsonl::test_from_json(node));
                std::vector<genie::ExecutionRecord> records;
                for (const auto& node : body.at("records"))
                    records.push_back(jsonl::execution_from_json(node));

                harness::EvaluateOptions options;
                if (body.contains("judges")) {
                    for (const auto& j : body.at("judges"))
                        options.judge_names.push_back(j.get<std::string>());
                }
                if (body.contains("voting"))
                    options.majority = body.at("voting").get<std::string>() == "majority";

                auto verdicts =
                    harness::stage_evaluate(ctx, providers, tests, records, options);
                json reply;
                reply["verdicts"] = json::array();
                for (const auto& v : verdicts) reply["verdicts"].push_back(jsonl::to_json(v));
                return reply;
            });
        });
    }
};

Service::Service(harness::HarnessConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
    if (port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw IoError("cannot bind " + host + ":" + std::to_string(port));
        impl_->bound_port = port;
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->bound_port;
}

void Service::run(const std::string& host, int port) {
    impl_->bound_port = port;
    if (!impl_->server.listen(host, port))
        throw IoError("cannot serve on " + host + ":" + std::to_string(port));
}

void Service::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int Service::port() const { return impl_->bound_port; }

}  // namespace metafair::serve
