#include "metafair/jsonl.hpp"

#include <fstream>

#include "metafair/errors.hpp"

namespace metafair::jsonl {

using nlohmann::json;

namespace {

BiasDimension require_dimension(const json& node, const char* key) {
    auto dim = parse_dimension(node.at(key).get<std::string>());
    if (!dim) throw SchemaError("unknown dimension: " + node.at(key).get<std::string>());
    return *dim;
}

void set_optional(json& node, const char* key, const std::optional<std::string>& value) {
    if (value) node[key] = *value;
}

std::optional<std::string> get_optional(const json& node, const char* key) {
    if (node.contains(key) && node.at(key).is_string())
        return node.at(key).get<std::string>();
    return std::nullopt;
}

}  // namespace

json to_json(const MetamorphicTest& test) {
    json node;
    node["schema_version"] = kSchemaVersion;
    node["test_id"] = test.test_id;
    node["mr_id"] = test.mr_id;
    node["dimension"] = std::string(dimension_name(test.dimension));
    node["source_prompt"] = test.source_prompt;
    if (const auto* s = std::get_if<StaticFollowUp>(&test.follow_up)) {
        node["follow_up"] = {{"kind", "static"}, {"text", s->text}};
    } else {
        node["follow_up"] = {
            {"kind", "scaffold"},
            {"neutral_question", std::get<ScaffoldFollowUp>(test.follow_up).neutral_question}};
    }
    set_optional(node, "source_attribute", test.source_attribute);
    set_optional(node, "follow_up_attribute", test.follow_up_attribute);
    set_optional(node, "explanation", test.explanation);
    node["provenance"] = {{"generator_model", test.provenance.generator_model},
                          {"created_at", test.provenance.created_at},
                          {"seed", test.provenance.seed}};
    return node;
}

MetamorphicTest test_from_json(const json& node) {
    MetamorphicTest test;
    test.test_id = node.at("test_id").get<std::string>();
    test.mr_id = node.at("mr_id").get<std::string>();
    test.dimension = require_dimension(node, "dimension");
    test.source_prompt = node.at("source_prompt").get<std::string>();
    const json& fu = node.at("follow_up");
    const std::string kind = fu.at("kind").get<std::string>();
    if (kind == "static") {
        test.follow_up = StaticFollowUp{fu.at("text").get<std::string>()};
    } else if (kind == "scaffold") {
        test.follow_up = ScaffoldFollowUp{fu.at("neutral_question").get<std::string>()};
    } else {
        throw SchemaError("unknown follow_up kind: " + kind);
    }
    test.source_attribute = get_optional(node, "source_attribute");
    test.follow_up_attribute = get_optional(node, "follow_up_attribute");
    test.explanation = get_optional(node, "explanation");
    if (node.contains("provenance")) {
        const json& p = node.at("provenance");
        test.provenance.generator_model = p.value("generator_model", std::string{});
        test.provenance.created_at = p.value("created_at", std::string{});
        test.provenance.seed = p.value("seed", std::uint64_t{0});
    }
    return test;
}

json to_json(const genie::ExecutionRecord& record) {
    json node;
    node["schema_version"] = kSchemaVersion;
    node["test_id"] = record.test_id;
    node["model_under_test"] = record.model_under_test;
    node["repeat_index"] = record.repeat_index;
    node["source_response"] = record.source_response;
    node["follow_up_prompt_resolved"] = record.follow_up_prompt_resolved;
    node["follow_up_response"] = record.follow_up_response;
    node["source_word_count"] = record.source_word_count;
    node["follow_up_word_count"] = record.follow_up_word_count;
    if (record.temperature) node["temperature"] = *record.temperature;
    node["started_at"] = record.started_at;
    node["completed_at"] = record.completed_at;
    node["failed"] = record.failed;
    set_optional(node, "failure", record.failure);
    return node;
}

genie::ExecutionRecord execution_from_json(const json& node) {
    genie::ExecutionRecord record;
    record.test_id = node.at("test_id").get<std::string>();
    record.model_under_test = node.at("model_under_test").get<std::string>();
    record.repeat_index = node.at("repeat_index").get<std::size_t>();
    record.source_response = node.value("source_response", std::string{});
    record.follow_up_prompt_resolved = node.value("follow_up_prompt_resolved", std::string{});
    record.follow_up_response = node.value("follow_up_response", std::string{});
    record.source_word_count = node.value("source_word_count", std::size_t{0});
    record.follow_up_word_count = node.value("follow_up_word_count", std::size_t{0});
    if (node.contains("temperature")) record.temperature = node.at("temperature").get<double>();
    record.started_at = node.value("started_at", std::string{});
    record.completed_at = node.value("completed_at", std::string{});
    record.failed = node.value("failed", false);
    record.failure = get_optional(node, "failure");
    return record;
}

json to_json(const VerdictRecord& record) {
    json node;
    node["schema_version"] = kSchemaVersion;
    node["test_id"] = record.test_id;
    node["mr_id"] = record.mr_id;
    node["dimension"] = std::string(dimension_name(record.dimension));
    node["model_under_test"] = record.model_under_test;
    node["repeat_index"] = record.repeat_index;
    if (record.judge_repeat > 0) node["judge_repeat"] = record.judge_repeat;
    node["evaluator"] = record.verdict.evaluator;
    node["label"] = std::string(guardme::label_name(record.verdict.label));
    if (record.verdict.severity)
        node["severity"] = std::string(guardme::severity_name(*record.verdict.severity));
    if (record.verdict.invalid_subtype)
        node["invalid_subtype"] =
            std::string(guardme::invalid_subtype_name(*record.verdict.invalid_subtype));
    node["explanation"] = record.verdict.explanation;
    return node;
}

VerdictRecord verdict_from_json(const json& node) {
    VerdictRecord record;
    record.test_id = node.at("test_id").get<std::string>();
    record.mr_id = node.at("mr_id").get<std::string>();
    record.dimension = require_dimension(node, "dimension");
    record.model_under_test = node.at("model_under_test").get<std::string>();
    record.repeat_index = node.at("repeat_index").get<std::size_t>();
    record.judge_repeat = node.value("judge_repeat", std::size_t{0});
    record.verdict.evaluator = node.value("evaluator", std::string{});
    auto label = guardme::parse_label(node.at("label").get<std::string>());
    if (!label) throw SchemaError("unknown verdict label: " + node.at("label").get<std::string>());
    record.verdict.label = *label;
    if (auto severity = get_optional(node, "severity")) {
        record.verdict.severity = guardme::parse_severity(*severity);
        if (!record.verdict.severity) throw SchemaError("unknown severity: " + *severity);
    }
    if (auto subtype = get_optional(node, "invalid_subtype")) {
        record.verdict.invalid_subtype = guardme::parse_invalid_subtype(*subtype);
        if (!record.verdict.invalid_subtype)
            throw SchemaError("unknown invalid_subtype: " + *subtype);
    }
    record.verdict.explanation = node.value("explanation", std::string{});
    return record;
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
    if (std::filesystem::exists(path)) {
        throw IoError("refusing to overwrite existing stage file: " + path.string() +
                      " (stage files are append-only; pick a new path)");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for write: " + path.string());
    for (const auto& line : lines) {
        out << line.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<json> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    std::vector<json> lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            throw IoError(path.string() + ": corrupt JSON at line " +
                          std::to_string(line_no));
        }
        lines.push_back(std::move(parsed));
    }
    return lines;
}

namespace {

template <typename T, typename Fn>
std::vector<T> read_as(const std::filesystem::path& path, Fn from_json_fn) {
    auto lines = read_lines(path);
    std::vector<T> out;
    out.reserve(lines.size());
    std::size_t index = 0;
    for (const auto& line : lines) {
        ++index;
        try {
            out.push_back(from_json_fn(line));
        } catch (const json::exception& e) {
            throw IoError(path.string() + ": line " + std::to_string(index) +
                          " violates the schema: " + e.what());
        }
    }
    return out;
}

template <typename T>
std::vector<json> as_lines(const std::vector<T>& records) {
    std::vector<json> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(to_json(r));
    return lines;
}

}  // namespace

std::vector<MetamorphicTest> read_suite(const std::filesystem::path& path) {
    return read_as<MetamorphicTest>(path, [](const json& n) { return test_from_json(n); });
}

std::vector<genie::ExecutionRecord> read_executions(const std::filesystem::path& path) {
    return read_as<genie::ExecutionRecord>(
        path, [](const json& n) { return execution_from_json(n); });
}

std::vector<VerdictRecord> read_verdicts(const std::filesystem::path& path) {
    return read_as<VerdictRecord>(path, [](const json& n) { return verdict_from_json(n); });
}

void write_suite(const std::filesystem::path& path,
                 const std::vector<MetamorphicTest>& tests) {
    write_lines(path, as_lines(tests));
}

void write_executions(const std::filesystem::path& path,
                      const std::vector<genie::ExecutionRecord>& records) {
    write_lines(path, as_lines(records));
}

void write_verdicts(const std::filesystem::path& path,
                    const std::vector<VerdictRecord>& records) {
    write_lines(path, as_lines(records));
}

}  // namespace metafair::jsonl
