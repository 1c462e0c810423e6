#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "metafair/attribute_catalogue.hpp"
#include "metafair/campaign.hpp"
#include "metafair/jsonl.hpp"
#include "metafair/metrics.hpp"
#include "metafair/muse.hpp"
#include "metafair/provider.hpp"

namespace metafair::harness {

std::string tool_version();

/// Wall clock unless frozen; freezing it (--fixed-time) makes provenance and
/// record timestamps reproducible for byte-identical reruns.
struct Clock {
    std::optional<std::int64_t> fixed_unix;

    std::string now_iso() const;
};

std::int64_t parse_time_spec(const std::string& spec);  // unix seconds or ISO-8601 Z
std::string format_iso(std::int64_t unix_seconds);

/// FNV-1a content hash, hex-encoded; identifies the config a run used.
std::string content_digest(const std::string& bytes);

struct HarnessConfig {
    CampaignConfig campaign;
    std::map<std::string, provider::ProviderConfig> providers;
    std::string generator;
    std::vector<std::string> models_under_test;
    std::vector<std::string> judges;
    std::string voting = "none";  // "none" | "majority"
    std::optional<double> mut_temperature;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> catalogue_path;
    std::optional<std::string> fixed_time;
    std::size_t retry_budget = 3;
    metrics::QuotaMap review_quota;
    std::vector<std::string> syntactic_inclusion_mrs;
    std::size_t jobs = 4;
    std::string digest;  // of the config file bytes

    const provider::ProviderConfig& provider_named(const std::string& name) const;
};

HarnessConfig load_config(const std::filesystem::path& path);
HarnessConfig config_from_json(const nlohmann::json& doc,
                               const std::filesystem::path& base_dir);

/// Caches one provider handle per name so transcripts and in-flight bounds
/// persist across a run.
class ProviderSet {
public:
    explicit ProviderSet(const HarnessConfig& config) : config_(&config) {}

    std::shared_ptr<provider::Provider> get(const std::string& name);

private:
    const HarnessConfig* config_;
    std::map<std::string, std::shared_ptr<provider::Provider>> handles_;
};

// ---------------------------------------------------------------------------
// Run manifest

struct RunManifest {
    std::string run_id;
    std::string config_digest;
    std::string tool_version;
    std::map<std::string, std::string> stage_files;  // stage key -> path
    std::string created_at;
    std::string updated_at;
};

/// Records a finished stage file; creates the manifest on first use and
/// rewrites it atomically (temp file + rename).
void update_manifest(const std::filesystem::path& manifest_path,
                     const std::string& stage_key,
                     const std::filesystem::path& stage_file,
                     const HarnessConfig& config, const Clock& clock);

RunManifest load_manifest(const std::filesystem::path& manifest_path);

/// Checks that every referenced stage file exists and parses under its
/// schema. Throws IoError/SchemaError naming the first offender.
void validate_manifest(const RunManifest& manifest,
                       const std::filesystem::path& base_dir);

// ---------------------------------------------------------------------------
// Pipeline stages (library path; the CLI and the HTTP service are wrappers)

struct PipelineContext {
    HarnessConfig config;
    AttributeCatalogue catalogue;
    Clock clock;
};

PipelineContext make_context(HarnessConfig config);

muse::GenerationResult stage_generate(PipelineContext& ctx, ProviderSet& providers);

std::vector<genie::ExecutionRecord> stage_execute(
    PipelineContext& ctx, ProviderSet& providers,
    const std::vector<MetamorphicTest>& tests, const std::string& model_name,
    std::size_t repeats, std::optional<double> temperature);

struct EvaluateOptions {
    std::vector<std::string> judge_names;  // empty: config judges
    bool majority = false;                  // or config voting == "majority"
    std::size_t judge_repeats = 1;
};

std::vector<jsonl::VerdictRecord> stage_evaluate(
    PipelineContext& ctx, ProviderSet& providers,
    const std::vector<MetamorphicTest>& tests,
    const std::vector<genie::ExecutionRecord>& records,
    const EvaluateOptions& options);

// ---------------------------------------------------------------------------
// Reports

struct ReportFiles {
    std::vector<std::filesystem::path> files;
};

/// Writes report.json, detection_rates.csv and summary.md (plus entropy.csv
/// when repeat runs are present). `evaluator` picks the verdict stream when
/// several evaluators coexist; defaults to "majority" lines when present,
/// else the single evaluator.
ReportFiles write_reports(const std::filesystem::path& out_dir,
                          const std::vector<jsonl::VerdictRecord>& verdicts,
                          const std::optional<std::string>& evaluator = std::nullopt);

/// Selects one verdict line per (test, model, repeat) for reporting.
std::vector<jsonl::VerdictRecord> select_evaluator(
    const std::vector<jsonl::VerdictRecord>& verdicts,
    const std::optional<std::string>& evaluator);

// ---------------------------------------------------------------------------
// Annotation round-trip

struct AnnotateExportOptions {
    metrics::QuotaMap quota;
    std::uint64_t seed = 0;
    std::optional<std::string> evaluator;
};

/// Builds the review bundle: stratified sample of BIASED verdicts joined with
/// their prompts and responses, human_label fields left empty for offline
/// labelling.
std::vector<nlohmann::json> build_review_bundle(
    const std::vector<jsonl::VerdictRecord>& verdicts,
    const std::vector<MetamorphicTest>& tests,
    const std::vector<genie::ExecutionRecord>& records,
    const AnnotateExportOptions& options);

/// Ingests a labelled bundle; returns agreement statistics (Cohen's kappa
/// between annotator columns when two are filled, else human vs judge),
/// precision of the BIASED flags, and invalid-subtype counts.
nlohmann::json import_annotations(const std::vector<nlohmann::json>& bundle);

}  // namespace metafair::harness
