#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metafair/genie.hpp"
#include "metafair/guardme.hpp"
#include "metafair/metamorphic_test.hpp"

namespace metafair::jsonl {

inline constexpr int kSchemaVersion = 1;

/// One verdict line: the verdict plus its (test, model, repeat, evaluator)
/// key and denormalized relation/dimension for report building.
struct VerdictRecord {
    std::string test_id;
    std::string mr_id;
    BiasDimension dimension = BiasDimension::Gender;
    std::string model_under_test;
    std::size_t repeat_index = 0;
    std::size_t judge_repeat = 0;
    guardme::Verdict verdict;
};

nlohmann::json to_json(const MetamorphicTest& test);
MetamorphicTest test_from_json(const nlohmann::json& node);

nlohmann::json to_json(const genie::ExecutionRecord& record);
genie::ExecutionRecord execution_from_json(const nlohmann::json& node);

nlohmann::json to_json(const VerdictRecord& record);
VerdictRecord verdict_from_json(const nlohmann::json& node);

/// Append-only JSON Lines write; refuses to overwrite an existing file so
/// re-running a stage always produces a new file.
void write_lines(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& lines);

/// Reads a JSON Lines file; a corrupt line raises IoError naming the line
/// number.
std::vector<nlohmann::json> read_lines(const std::filesystem::path& path);

std::vector<MetamorphicTest> read_suite(const std::filesystem::path& path);
std::vector<genie::ExecutionRecord> read_executions(const std::filesystem::path& path);
std::vector<VerdictRecord> read_verdicts(const std::filesystem::path& path);

void write_suite(const std::filesystem::path& path,
                 const std::vector<MetamorphicTest>& tests);
void write_executions(const std::filesystem::path& path,
                      const std::vector<genie::ExecutionRecord>& records);
void write_verdicts(const std::filesystem::path& path,
                    const std::vector<VerdictRecord>& records);

}  // namespace metafair::jsonl
