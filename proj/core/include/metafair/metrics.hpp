#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metafair/guardme.hpp"
#include "metafair/relations.hpp"

namespace metafair::metrics {

enum class GroundTruth { Biased, Unbiased, Invalid };

std::string_view ground_truth_name(GroundTruth g);
std::optional<GroundTruth> parse_ground_truth(std::string_view s);

struct LabelledCase {
    std::string test_id;
    GroundTruth ground_truth = GroundTruth::Unbiased;
    guardme::Verdict prediction;
};

/// How non-definitive predictions (INDETERMINABLE/INVALID) enter binary
/// scoring; the paper scores judges against binary ground truth without
/// stating the mapping, so it stays an explicit knob.
enum class NonDefinitivePolicy { AsUnbiased, Excluded };

std::string_view policy_name(NonDefinitivePolicy policy);

struct MetricsReport {
    double precision = 0.0;  // weighted by ground-truth class support
    double recall = 0.0;
    double f1 = 0.0;
    double roc_auc = 0.0;  // balanced accuracy, (TPR + TNR) / 2
    std::optional<double> stability;
    std::map<std::string, std::size_t> support;  // per-class scored counts
    std::string policy;
    std::size_t excluded_invalid_truth = 0;   // INVALID ground truth, tracked apart
    std::size_t excluded_non_definitive = 0;  // dropped under Excluded policy
};

/// Weighted precision/recall/F1 over {BIASED, UNBIASED} plus balanced-accuracy
/// AUC. Throws DegenerateDataset when a ground-truth class is absent after
/// policy application.
MetricsReport binary_scores(const std::vector<LabelledCase>& cases,
                            NonDefinitivePolicy policy);

/// Rank-based AUC over per-case scores (e.g. fraction of BIASED votes across
/// repeats), ties handled by midrank. truths: true = biased.
double rank_based_auc(const std::vector<double>& scores, const std::vector<bool>& truths);

/// Fraction of groups whose k labels are all identical. Every group must have
/// the same k >= 2 (RaggedGroups otherwise).
double stability(const std::map<std::string, std::vector<std::string>>& verdict_groups);

/// Shannon entropy of the biased/unbiased verdict distribution, 0*log0 = 0.
/// Throws EmptyGroup when both counts are zero.
double verdict_entropy(std::size_t biased, std::size_t unbiased);

/// Cohen's kappa between two equal-length categorical sequences.
double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b);

struct DetectionInput {
    std::string mr_id;
    std::string model;
    bool biased = false;
};

struct DetectionCell {
    std::size_t biased = 0;
    std::size_t total = 0;

    bool empty() const { return total == 0; }
    double rate() const { return total == 0 ? 0.0 : static_cast<double>(biased) / total; }
};

struct DetectionTable {
    std::vector<std::string> mr_ids;  // catalogue order
    std::vector<std::string> models;  // sorted
    std::map<std::pair<std::string, std::string>, DetectionCell> cells;  // incl. empty
    std::map<std::string, DetectionCell> mr_totals;
    std::map<std::string, DetectionCell> model_totals;
    DetectionCell grand;
};

DetectionTable detection_table(const std::vector<DetectionInput>& verdicts);

struct BiasedCaseRef {
    std::string mr_id;
    std::string model;
    BiasDimension dimension = BiasDimension::Gender;
    std::string test_id;
    std::size_t repeat_index = 0;
};

struct QuotaMap {
    std::size_t default_quota = 50;
    std::map<std::string, std::size_t> overrides;  // e.g. MR5 -> 20

    std::size_t for_mr(const std::string& mr_id) const;
};

struct ReviewSample {
    std::vector<BiasedCaseRef> cases;
    std::map<std::string, std::size_t> shortfall;  // mr -> missing count
};

/// Stratified sample of biased cases for manual review. Per MR the quota is
/// split across models proportionally to each model's share of the biased
/// pool (largest-remainder rounding), then balanced across dimensions within
/// each model allotment where possible. Deterministic under seed; quotas
/// exceeding a pool take the whole stratum and flag the shortfall.
ReviewSample stratified_review_sample(const std::vector<BiasedCaseRef>& biased_pool,
                                      const QuotaMap& quota_per_mr, std::uint64_t seed);

}  // namespace metafair::metrics
