#include "metafair/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/guardme.hpp"
#include "metafair/rng.hpp"

namespace metafair::harness {

using nlohmann::json;

std::string tool_version() { return "0.1.0"; }

std::string format_iso(std::int64_t unix_seconds) {
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::int64_t parse_time_spec(const std::string& spec) {
    if (spec.empty()) throw ConfigError("empty time spec");
    if (spec.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoll(spec);
    }
    std::tm tm{};
    int y, mo, d, h, mi, s;
    if (std::sscanf(spec.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6) {
        throw ConfigError("time spec must be unix seconds or ISO-8601 (got '" + spec + "')");
    }
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::string Clock::now_iso() const {
    if (fixed_unix) return format_iso(*fixed_unix);
    return format_iso(static_cast<std::int64_t>(std::time(nullptr)));
}

std::string content_digest(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a(bytes)));
    return buf;
}

const provider::ProviderConfig& HarnessConfig::provider_named(
    const std::string& name) const {
    auto it = providers.find(name);
    if (it == providers.end()) {
        throw ConfigError("config defines no provider named '" + name + "'");
    }
    return it->second;
}

std::shared_ptr<provider::Provider> ProviderSet::get(const std::string& name) {
    auto it = handles_.find(name);
    if (it != handles_.end()) return it->second;
    auto handle = provider::make_provider(config_->provider_named(name));
    handles_.emplace(name, handle);
    return handle;
}

// ---------------------------------------------------------------------------
// Config loading. Field names here are the normative config schema.

namespace {

std::vector<std::string> relation_list(const json& node) {
    if (node.is_string() && node.get<std::string>() == "all") {
        std::vector<std::string> all;
        for (const auto& mr : mr_catalogue()) all.push_back(mr.id);
        return all;
    }
    if (!node.is_array()) throw ConfigError("'relations' must be an array or \"all\"");
    std::vector<std::string> out;
    for (const auto& id : node) out.push_back(id.get<std::string>());
    return out;
}

}  // namespace

HarnessConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    HarnessConfig config;

    if (doc.contains("relations")) config.campaign.relations = relation_list(doc.at("relations"));
    if (doc.contains("dimensions") && !doc.at("dimensions").is_null()) {
        const json& dims = doc.at("dimensions");
        if (dims.is_string() && dims.get<std::string>() == "all") {
            // empty = per-relation applicable dimensions
        } else if (dims.is_array()) {
            for (const auto& d : dims) {
                auto dim = parse_dimension(d.get<std::string>());
                if (!dim) throw ConfigError("unknown dimension: " + d.get<std::string>());
                config.campaign.dimensions.push_back(*dim);
            }
        } else {
            throw ConfigError("'dimensions' must be an array or \"all\"");
        }
    }
    if (doc.contains("attributes_per_dimension"))
        config.campaign.attributes_per_dimension =
            doc.at("attributes_per_dimension").get<std::size_t>();
    if (doc.contains("attributes")) {
        const json& attrs = doc.at("attributes");
        if (!attrs.is_object()) throw ConfigError("'attributes' must be an object");
        for (const auto& [key, value] : attrs.items()) {
            auto dim = parse_dimension(key);
            if (!dim) throw ConfigError("unknown dimension under 'attributes': " + key);
            std::vector<std::string> list;
            for (const auto& a : value) list.push_back(a.get<std::string>());
            if (list.empty())
                throw ConfigError("'attributes." + key + "' must not be empty");
            config.campaign.named_attributes[*dim] = std::move(list);
        }
    }
    config.campaign.tests_per_attribute = doc.value("tests_per_attribute", std::size_t{1});
    config.campaign.repeats = doc.value("repeats", std::size_t{1});

    if (doc.contains("providers")) {
        for (const auto& [name, node] : doc.at("providers").items()) {
            config.providers.emplace(
                name, provider::provider_config_from_json(node, name, base_dir));
        }
    }
    config.generator = doc.value("generator", std::string{});
    if (doc.contains("models_under_test")) {
        for (const auto& m : doc.at("models_under_test"))
            config.models_under_test.push_back(m.get<std::string>());
    }
    if (doc.contains("judges")) {
        for (const auto& j : doc.at("judges")) config.judges.push_back(j.get<std::string>());
    }
    config.voting = doc.value("voting", std::string("none"));
    if (config.voting != "none" && config.voting != "majority")
        throw ConfigError("'voting' must be \"none\" or \"majority\"");
    if (doc.contains("temperature")) config.mut_temperature = doc.at("temperature").get<double>();
    config.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("catalogue")) {
        std::filesystem::path p = doc.at("catalogue").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        config.catalogue_path = p;
    }
    if (doc.contains("fixed_time"))
        config.fixed_time = doc.at("fixed_time").get<std::string>();
    config.retry_budget = doc.value("retry_budget", std::size_t{3});
    if (doc.contains("review_quota_per_mr")) {
        for (const auto& [key, value] : doc.at("review_quota_per_mr").items()) {
            if (key == "default") {
                config.review_quota.default_quota = value.get<std::size_t>();
            } else {
                config.review_quota.overrides[key] = value.get<std::size_t>();
            }
        }
    }
    if (doc.contains("syntactic_inclusion_mrs")) {
        for (const auto& id : doc.at("syntactic_inclusion_mrs"))
            config.syntactic_inclusion_mrs.push_back(id.get<std::string>());
    }
    config.jobs = doc.value("jobs", std::size_t{4});

    // Referenced providers must exist.
    auto check = [&](const std::string& name, const char* role) {
        if (!name.empty() && !config.providers.count(name))
            throw ConfigError(std::string(role) + " references unknown provider '" + name +
                              "'");
    };
    check(config.generator, "generator");
    for (const auto& m : config.models_under_test) check(m, "models_under_test");
    for (const auto& j : config.judges) check(j, "judges");
    return config;
}

HarnessConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    json doc = json::parse(bytes, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
    auto config = config_from_json(doc, path.parent_path());
    config.digest = content_digest(bytes);
    return config;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

json manifest_to_json(const RunManifest& m) {
    json node;
    node["schema_version"] = jsonl::kSchemaVersion;
    node["run_id"] = m.run_id;
    node["config_digest"] = m.config_digest;
    node["tool_version"] = m.tool_version;
    node["created_at"] = m.created_at;
    node["updated_at"] = m.updated_at;
    node["stage_files"] = m.stage_files;
    return node;
}

RunManifest manifest_from_json(const json& node) {
    RunManifest m;
    m.run_id = node.value("run_id", std::string{});
    m.config_digest = node.value("config_digest", std::string{});
    m.tool_version = node.value("tool_version", std::string{});
    m.created_at = node.value("created_at", std::string{});
    m.updated_at = node.value("updated_at", std::string{});
    if (node.contains("stage_files")) {
        for (const auto& [key, value] : node.at("stage_files").items())
            m.stage_files[key] = value.get<std::string>();
    }
    return m;
}

}  // namespace

RunManifest load_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest: " + manifest_path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw IoError("manifest is not valid JSON: " + manifest_path.string());
    return manifest_from_json(doc);
}

void update_manifest(const std::filesystem::path& manifest_path,
                     const std::string& stage_key,
                     const std::filesystem::path& stage_file,
                     const HarnessConfig& config, const Clock& clock) {
    RunManifest m;
    if (std::filesystem::exists(manifest_path)) {
        m = load_manifest(manifest_path);
    } else {
        m.run_id = config.digest + "-" + std::to_string(config.seed);
        m.config_digest = config.digest;
        m.tool_version = tool_version();
        m.created_at = clock.now_iso();
    }
    m.updated_at = clock.now_iso();
    m.stage_files[stage_key] = stage_file.string();

    if (manifest_path.has_parent_path())
        std::filesystem::create_directories(manifest_path.parent_path());
    const auto tmp = manifest_path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write manifest: " + tmp);
        out << manifest_to_json(m).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, manifest_path);
}

void validate_manifest(const RunManifest& manifest,
                       const std::filesystem::path& base_dir) {
    for (const auto& [key, file] : manifest.stage_files) {
        std::filesystem::path p = file;
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p))
            throw IoError("manifest stage '" + key + "' missing: " + p.string());
        if (key.rfind("suite", 0) == 0) {
            jsonl::read_suite(p);
        } else if (key.rfind("runs", 0) == 0) {
            jsonl::read_executions(p);
        } else if (key.rfind("verdicts", 0) == 0) {
            jsonl::read_verdicts(p);
        }
    }
}

// ---------------------------------------------------------------------------
// Pipeline stages

PipelineContext make_context(HarnessConfig config) {
    PipelineContext ctx{std::move(config), {}, {}};
    ctx.catalogue = ctx.config.catalogue_path
                        ? load_catalogue(*ctx.config.catalogue_path)
                        : default_catalogue();
    if (ctx.config.fixed_time) ctx.clock.fixed_unix = parse_time_spec(*ctx.config.fixed_time);
    return ctx;
}

muse::GenerationResult stage_generate(PipelineContext& ctx, ProviderSet& providers) {
    if (ctx.config.generator.empty())
        throw ConfigError("config names no generator provider");
    auto plan = plan_campaign(ctx.config.campaign);
    muse::GenerationOptions options;
    options.retry_budget = ctx.config.retry_budget;
    options.seed = ctx.config.seed;
    options.created_at = ctx.clock.now_iso();
    auto generator = providers.get(ctx.config.generator);
    return muse::generate_tests(plan, ctx.catalogue, *generator, options);
}

std::vector<genie::ExecutionRecord> stage_execute(
    PipelineContext& ctx, ProviderSet& providers,
    const std::vector<MetamorphicTest>& tests, const std::string& model_name,
    std::size_t repeats, std::optional<double> temperature) {
    auto mut = providers.get(model_name);
    genie::ExecutionOptions options;
    options.repeats = repeats;
    options.temperature = temperature ? temperature : ctx.config.mut_temperature;
    options.started_at = ctx.clock.now_iso();
    return genie::execute_suite(tests, *mut, options, ctx.config.jobs);
}

std::vector<jsonl::VerdictRecord> stage_evaluate(
    PipelineContext& ctx, ProviderSet& providers,
    const std::vector<MetamorphicTest>& tests,
    const std::vector<genie::ExecutionRecord>& records,
    const EvaluateOptions& options) {
    std::map<std::string, const MetamorphicTest*> by_id;
    for (const auto& t : tests) by_id[t.test_id] = &t;

    std::vector<std::string> judge_names =
        options.judge_names.empty() ? ctx.config.judges : options.judge_names;
    const bool majority = options.majority || ctx.config.voting == "majority";
    if (majority && judge_names.size() != 3) {
        throw WrongCommitteeSize("majority voting needs exactly 3 judges, got " +
                                 std::to_string(judge_names.size()));
    }

    std::vector<std::shared_ptr<provider::Provider>> judges;
    for (const auto& name : judge_names) judges.push_back(providers.get(name));

    guardme::EvaluationOptions eval_options;
    eval_options.syntactic_inclusion_mrs = ctx.config.syntactic_inclusion_mrs;

    std::vector<jsonl::VerdictRecord> out;
    for (const auto& record : records) {
        auto found = by_id.find(record.test_id);
        if (found == by_id.end()) {
            throw SchemaError("execution record references unknown test '" +
                              record.test_id + "' (is the right suite loaded?)");
        }
        const MetamorphicTest& test = *found->second;
        const auto& mr = mr_by_id(test.mr_id);

        const bool uses_judges =
            (mr.evaluation.kind == EvaluationKind::JudgePair ||
             mr.evaluation.kind == EvaluationKind::JudgeFollowUp) &&
            std::find(eval_options.syntactic_inclusion_mrs.begin(),
                      eval_options.syntactic_inclusion_mrs.end(),
                      mr.id) == eval_options.syntactic_inclusion_mrs.end() &&
            !record.failed;

        const std::size_t judge_repeats =
            options.judge_repeats > 0 ? options.judge_repeats : 1;
        for (std::size_t jr = 0; jr < judge_repeats; ++jr) {
            auto emit = [&](const guardme::Verdict& v) {
                jsonl::VerdictRecord line;
                line.test_id = test.test_id;
                line.mr_id = test.mr_id;
                line.dimension = test.dimension;
                line.model_under_test = record.model_under_test;
                line.repeat_index = record.repeat_index;
                line.judge_repeat = jr;
                line.verdict = v;
                out.push_back(std::move(line));
            };

            if (uses_judges) {
                if (judges.empty())
                    throw MissingJudge(mr.id + " needs at least one judge model");
                auto individual = guardme::judge_verdicts(record, test, mr, judges);
                for (const auto& v : individual) emit(v);
                if (majority) {
                    auto voted = guardme::majority_vote(individual);
                    voted.evaluator = "majority";
                    emit(voted);
                }
            } else {
                emit(guardme::evaluate_record(record, test, mr, judges, eval_options));
            }
            if (!uses_judges) break;  // heuristics are deterministic; one repeat
        }
    }
    return out;
}

}  // namespace metafair::harness
