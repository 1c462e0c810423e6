#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/harness.hpp"

namespace metafair::harness {

using nlohmann::json;

std::vector<json> build_review_bundle(
    const std::vector<jsonl::VerdictRecord>& verdicts,
    const std::vector<MetamorphicTest>& tests,
    const std::vector<genie::ExecutionRecord>& records,
    const AnnotateExportOptions& options) {
    const auto selected = select_evaluator(verdicts, options.evaluator);

    std::map<std::string, const MetamorphicTest*> tests_by_id;
    for (const auto& t : tests) tests_by_id[t.test_id] = &t;
    std::map<std::tuple<std::string, std::string, std::size_t>,
             const genie::ExecutionRecord*> records_by_key;
    for (const auto& r : records)
        records_by_key[{r.test_id, r.model_under_test, r.repeat_index}] = &r;

    // Pool: BIASED verdicts only, joined with their dimension.
    std::vector<metrics::BiasedCaseRef> pool;
    std::map<std::tuple<std::string, std::string, std::size_t>,
             const jsonl::VerdictRecord*> verdicts_by_key;
    for (const auto& v : selected) {
        if (v.verdict.label != guardme::VerdictLabel::Biased) continue;
        pool.push_back({v.mr_id, v.model_under_test, v.dimension, v.test_id,
                        v.repeat_index});
        verdicts_by_key[{v.test_id, v.model_under_test, v.repeat_index}] = &v;
    }

    const auto sample =
        metrics::stratified_review_sample(pool, options.quota, options.seed);

    std::vector<json> bundle;
    bundle.reserve(sample.cases.size());
    for (const auto& c : sample.cases) {
        const auto* test = tests_by_id.count(c.test_id) ? tests_by_id.at(c.test_id) : nullptr;
        const auto* record =
            records_by_key.count({c.test_id, c.model, c.repeat_index})
                ? records_by_key.at({c.test_id, c.model, c.repeat_index})
                : nullptr;
        const auto* verdict = verdicts_by_key.at({c.test_id, c.model, c.repeat_index});

        json row;
        row["schema_version"] = jsonl::kSchemaVersion;
        row["test_id"] = c.test_id;
        row["mr_id"] = c.mr_id;
        row["dimension"] = std::string(dimension_name(c.dimension));
        row["model_under_test"] = c.model;
        row["repeat_index"] = c.repeat_index;
        if (test) {
            row["source_prompt"] = test->source_prompt;
            row["follow_up"] = test->follow_up_text();
            if (test->source_attribute) row["source_attribute"] = *test->source_attribute;
            if (test->follow_up_attribute)
                row["follow_up_attribute"] = *test->follow_up_attribute;
        }
        if (record) {
            row["source_response"] = record->source_response;
            row["follow_up_prompt_resolved"] = record->follow_up_prompt_resolved;
            row["follow_up_response"] = record->follow_up_response;
        }
        row["judge_label"] = std::string(guardme::label_name(verdict->verdict.label));
        if (verdict->verdict.severity)
            row["judge_severity"] =
                std::string(guardme::severity_name(*verdict->verdict.severity));
        row["judge_explanation"] = verdict->verdict.explanation;
        row["human_label"] = "";
        row["human_label_2"] = "";
        bundle.push_back(std::move(row));
    }
    return bundle;
}

json import_annotations(const std::vector<json>& bundle) {
    if (bundle.empty()) throw ConfigError("annotation bundle is empty");

    std::vector<std::string> judge_labels;
    std::vector<std::string> labels_1;
    std::vector<std::string> labels_2;
    std::size_t biased = 0, unbiased = 0, invalid_generator = 0, invalid_mut = 0;
    bool all_have_second = true;

    std::size_t line = 0;
    for (const auto& row : bundle) {
        ++line;
        const std::string raw = row.value("human_label", std::string{});
        auto truth = metrics::parse_ground_truth(raw);
        if (!truth) {
            throw SchemaError("bundle line " + std::to_string(line) +
                              ": human_label must be BIASED, UNBIASED, INVALID, "
                              "INVALID_DUE_TO_GENERATOR or INVALID_DUE_TO_MUT (got '" +
                              raw + "')");
        }
        const std::string norm = text::to_lower(raw);
        if (*truth == metrics::GroundTruth::Biased) ++biased;
        if (*truth == metrics::GroundTruth::Unbiased) ++unbiased;
        if (norm.find("generator") != std::string::npos) ++invalid_generator;
        else if (*truth == metrics::GroundTruth::Invalid) ++invalid_mut;

        labels_1.push_back(std::string(metrics::ground_truth_name(*truth)));
        judge_labels.push_back(row.value("judge_label", std::string("BIASED")));

        const std::string second = row.value("human_label_2", std::string{});
        if (second.empty()) {
            all_have_second = false;
        } else {
            auto truth_2 = metrics::parse_ground_truth(second);
            if (!truth_2)
                throw SchemaError("bundle line " + std::to_string(line) +
                                  ": unknown human_label_2 '" + second + "'");
            labels_2.push_back(std::string(metrics::ground_truth_name(*truth_2)));
        }
    }

    json out;
    out["schema_version"] = jsonl::kSchemaVersion;
    out["cases"] = bundle.size();
    // All sampled cases were judge-flagged BIASED, so precision is the share
    // the annotators confirmed.
    out["precision"] = static_cast<double>(biased) / static_cast<double>(bundle.size());
    out["counts"] = {{"biased", biased},
                     {"unbiased", unbiased},
                     {"invalid_due_to_generator", invalid_generator},
                     {"invalid_due_to_mut", invalid_mut}};
    if (all_have_second && labels_2.size() == labels_1.size()) {
        out["kappa"] = metrics::cohen_kappa(labels_1, labels_2);
        out["kappa_between"] = "annotators";
    } else {
        out["kappa"] = metrics::cohen_kappa(labels_1, judge_labels);
        out["kappa_between"] = "annotator_vs_judge";
    }
    return out;
}

}  // namespace metafair::harness
