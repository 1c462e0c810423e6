#include "metafair/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/harness.hpp"
#include "metafair/serve.hpp"

namespace metafair::cli {

namespace {

using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> catalogue;
    std::optional<std::string> fixed_time;
    std::optional<std::size_t> jobs;
};

harness::HarnessConfig load_with_overrides(const GlobalOptions& global) {
    if (global.config_path.empty()) throw ConfigError("--config is required");
    auto config = harness::load_config(global.config_path);
    if (global.seed) config.seed = *global.seed;
    if (global.catalogue) config.catalogue_path = *global.catalogue;
    if (global.fixed_time) config.fixed_time = *global.fixed_time;
    if (global.jobs) config.jobs = *global.jobs;
    return config;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& out) {
    auto dir = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
    return dir / "manifest.json";
}

int cmd_plan(const GlobalOptions& global) {
    auto config = load_with_overrides(global);
    auto plan = plan_campaign(config.campaign);

    std::cout << "entries:\n";
    for (const auto& e : plan.entries) {
        std::cout << "  " << e.mr_id << " " << dimension_name(e.dimension)
                  << " attributes=" << e.attributes_per_dimension
                  << " tests_per_attribute=" << e.tests_per_attribute
                  << " tests=" << e.test_count() << "\n";
    }
    std::cout << "total_tests: " << plan.total_tests() << "\n";
    std::cout << "repeats_per_test: " << plan.repeats_per_test << "\n";
    if (!config.models_under_test.empty()) {
        std::cout << "models_under_test: " << config.models_under_test.size() << "\n";
        std::cout << "executions: "
                  << plan.total_tests() * config.models_under_test.size() << "\n";
    }
    if (config.review_quota.default_quota > 0 || !config.review_quota.overrides.empty()) {
        std::size_t quota_total = 0;
        for (const auto& mr_id : config.campaign.relations)
            quota_total += config.review_quota.for_mr(mr_id);
        std::cout << "review_quota_total: " << quota_total << "\n";
    }
    return 0;
}

int cmd_generate(const GlobalOptions& global, const std::string& out) {
    auto ctx = harness::make_context(load_with_overrides(global));
    harness::ProviderSet providers(ctx.config);
    auto result = harness::stage_generate(ctx, providers);
    jsonl::write_suite(out, result.tests);
    harness::update_manifest(manifest_path_for(out), "suite", out, ctx.config, ctx.clock);
    std::cout << "wrote " << result.tests.size() << " tests to " << out << " ("
              << result.generator_calls << " generator calls, "
              << result.rejected_elements << " rejects)\n";
    if (!result.shortfalls.empty()) {
        for (const auto& s : result.shortfalls) {
            std::cerr << "generation shortfall: " << s.mr_id << "/"
                      << dimension_name(s.dimension) << " produced " << s.produced
                      << " of " << s.requested << "\n";
        }
        return 1;
    }
    return 0;
}

int cmd_execute(const GlobalOptions& global, const std::string& suite,
                const std::string& model, std::size_t repeats,
                std::optional<double> temperature, const std::string& out) {
    auto ctx = harness::make_context(load_with_overrides(global));
    harness::ProviderSet providers(ctx.config);
    auto tests = jsonl::read_suite(suite);
    auto records =
        harness::stage_execute(ctx, providers, tests, model, repeats, temperature);
    jsonl::write_executions(out, records);
    harness::update_manifest(manifest_path_for(out), "runs:" + model, out, ctx.config,
                             ctx.clock);
    std::size_t failed = 0;
    for (const auto& r : records) {
        if (r.failed) ++failed;
    }
    std::cout << "wrote " << records.size() << " execution records to " << out;
    if (failed > 0) std::cout << " (" << failed << " flagged failed)";
    std::cout << "\n";
    return 0;
}

int cmd_evaluate(const GlobalOptions& global, const std::string& runs,
                 const std::string& suite, const std::vector<std::string>& judges,
                 const std::string& voting, std::size_t judge_repeats,
                 const std::string& out) {
    auto ctx = harness::make_context(load_with_overrides(global));
    harness::ProviderSet providers(ctx.config);
    auto tests = jsonl::read_suite(suite);
    auto records = jsonl::read_executions(runs);
    harness::EvaluateOptions options;
    options.judge_names = judges;
    options.majority = voting == "majority";
    options.judge_repeats = judge_repeats;
    auto verdicts = harness::stage_evaluate(ctx, providers, tests, records, options);
    jsonl::write_verdicts(out, verdicts);
    harness::update_manifest(manifest_path_for(out), "verdicts", out, ctx.config,
                             ctx.clock);
    std::cout << "wrote " << verdicts.size() << " verdicts to " << out << "\n";
    return 0;
}

int cmd_report(const std::string& verdicts_path, const std::string& out_dir,
               std::optional<std::string> evaluator) {
    auto verdicts = jsonl::read_verdicts(verdicts_path);
    auto files = harness::write_reports(out_dir, verdicts, evaluator);
    for (const auto& f : files.files) std::cout << "wrote " << f.string() << "\n";
    return 0;
}

int cmd_annotate_export(const GlobalOptions& global, const std::string& verdicts_path,
                        const std::string& suite, const std::string& runs,
                        std::size_t quota,
                        const std::vector<std::string>& quota_overrides,
                        std::optional<std::string> evaluator, const std::string& out) {
    harness::AnnotateExportOptions options;
    options.quota.default_quota = quota;
    for (const auto& spec : quota_overrides) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--quota-mr expects MR=COUNT (got '" + spec + "')");
        options.quota.overrides[spec.substr(0, eq)] =
            static_cast<std::size_t>(std::stoul(spec.substr(eq + 1)));
    }
    options.seed = global.seed.value_or(0);
    options.evaluator = evaluator;

    auto bundle = harness::build_review_bundle(jsonl::read_verdicts(verdicts_path),
                                               jsonl::read_suite(suite),
                                               jsonl::read_executions(runs), options);
    jsonl::write_lines(out, bundle);
    std::cout << "wrote " << bundle.size() << " review cases to " << out << "\n";
    return 0;
}

int cmd_annotate_import(const std::string& bundle_path, const std::string& out) {
    auto agreement = harness::import_annotations(jsonl::read_lines(bundle_path));
    if (out.empty() || out == "-") {
        std::cout << agreement.dump(2) << "\n";
    } else {
        std::ofstream file(out);
        if (!file) throw IoError("cannot write " + out);
        file << agreement.dump(2) << "\n";
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_serve(const GlobalOptions& global, const std::string& host, int port) {
    serve::Service service(load_with_overrides(global));
    std::cout << "serving on " << host << ":" << port << "\n";
    service.run(host, port);
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"metamorphic bias testing for chat language models", "metafair"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "experiment config (JSON)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "run seed override");
    std::string catalogue_value;
    auto* catalogue_opt =
        app.add_option("--catalogue", catalogue_value, "attribute catalogue override");
    std::string fixed_time_value;
    auto* fixed_time_opt = app.add_option(
        "--fixed-time", fixed_time_value,
        "freeze timestamps (unix seconds or ISO-8601) for reproducible outputs");
    std::size_t jobs_value = 0;
    auto* jobs_opt = app.add_option("--jobs", jobs_value, "max parallel requests");

    auto* plan = app.add_subcommand("plan", "print campaign arithmetic");

    auto* generate = app.add_subcommand("generate", "generate a metamorphic test suite");
    std::string generate_out;
    generate->add_option("--out", generate_out, "suite output (JSON Lines)")->required();

    auto* execute = app.add_subcommand("execute", "run a suite against a model under test");
    std::string execute_suite, execute_model, execute_out;
    std::size_t execute_repeats = 1;
    double execute_temperature = 0.0;
    execute->add_option("--suite", execute_suite, "suite file")->required();
    execute->add_option("--model", execute_model, "model under test (provider name)")
        ->required();
    execute->add_option("--repeats", execute_repeats, "repeats per test");
    auto* temp_opt = execute->add_option("--temperature", execute_temperature,
                                         "model-under-test temperature");
    execute->add_option("--out", execute_out, "executions output (JSON Lines)")->required();

    auto* evaluate = app.add_subcommand("evaluate", "evaluate execution records");
    std::string evaluate_runs, evaluate_suite, evaluate_voting = "none", evaluate_out;
    std::vector<std::string> evaluate_judges;
    std::size_t evaluate_judge_repeats = 1;
    evaluate->add_option("--runs", evaluate_runs, "executions file")->required();
    evaluate->add_option("--suite", evaluate_suite, "suite file")->required();
    evaluate->add_option("--judge", evaluate_judges,
                         "judge provider name (repeat for a committee of three)");
    evaluate->add_option("--voting", evaluate_voting, "none|majority");
    evaluate->add_option("--judge-repeats", evaluate_judge_repeats,
                         "times each judge scores every record");
    evaluate->add_option("--out", evaluate_out, "verdicts output (JSON Lines)")->required();

    auto* report = app.add_subcommand("report", "write JSON/CSV/Markdown reports");
    std::string report_verdicts, report_out, report_evaluator;
    report->add_option("--verdicts", report_verdicts, "verdicts file")->required();
    report->add_option("--out", report_out, "report directory")->required();
    auto* report_eval_opt =
        report->add_option("--evaluator", report_evaluator, "verdict stream to report on");

    auto* annotate = app.add_subcommand("annotate", "review-bundle round trip");
    annotate->require_subcommand(1);
    auto* annotate_export =
        annotate->add_subcommand("export", "emit a review bundle from biased verdicts");
    std::string ae_verdicts, ae_suite, ae_runs, ae_out, ae_evaluator;
    std::size_t ae_quota = 50;
    std::vector<std::string> ae_quota_overrides;
    annotate_export->add_option("--verdicts", ae_verdicts)->required();
    annotate_export->add_option("--suite", ae_suite)->required();
    annotate_export->add_option("--runs", ae_runs)->required();
    annotate_export->add_option("--quota", ae_quota, "cases per MR (default 50)");
    annotate_export->add_option("--quota-mr", ae_quota_overrides,
                                "per-MR override, e.g. MR5=20");
    auto* ae_eval_opt = annotate_export->add_option("--evaluator", ae_evaluator);
    annotate_export->add_option("--out", ae_out, "bundle output (JSON Lines)")->required();

    auto* annotate_import =
        annotate->add_subcommand("import", "ingest human labels, compute agreement");
    std::string ai_bundle, ai_out;
    annotate_import->add_option("--bundle", ai_bundle, "labelled bundle")->required();
    annotate_import->add_option("--out", ai_out, "agreement output (default stdout)");

    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
    std::string serve_host = "127.0.0.1";
    int serve_port = 8080;
    serve_cmd->add_option("--host", serve_host, "bind host");
    serve_cmd->add_option("--port", serve_port, "bind port");

    std::vector<const char*> argv;
    argv.push_back("metafair");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    if (*seed_opt) global.seed = seed_value;
    if (*catalogue_opt) global.catalogue = catalogue_value;
    if (*fixed_time_opt) global.fixed_time = fixed_time_value;
    if (*jobs_opt) global.jobs = jobs_value;

    try {
        if (*plan) return cmd_plan(global);
        if (*generate) return cmd_generate(global, generate_out);
        if (*execute) {
            std::optional<double> temperature;
            if (*temp_opt) temperature = execute_temperature;
            return cmd_execute(global, execute_suite, execute_model, execute_repeats,
                               temperature, execute_out);
        }
        if (*evaluate) {
            return cmd_evaluate(global, evaluate_runs, evaluate_suite, evaluate_judges,
                                evaluate_voting, evaluate_judge_repeats, evaluate_out);
        }
        if (*report) {
            std::optional<std::string> evaluator;
            if (*report_eval_opt) evaluator = report_evaluator;
            return cmd_report(report_verdicts, report_out, evaluator);
        }
        if (*annotate_export) {
            std::optional<std::string> evaluator;
            if (*ae_eval_opt) evaluator = ae_evaluator;
            return cmd_annotate_export(global, ae_verdicts, ae_suite, ae_runs, ae_quota,
                                       ae_quota_overrides, evaluator, ae_out);
        }
        if (*annotate_import) return cmd_annotate_import(ai_bundle, ai_out);
        if (*serve_cmd) return cmd_serve(global, serve_host, serve_port);
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace metafair::cli
