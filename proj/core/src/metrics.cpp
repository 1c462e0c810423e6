#include "metafair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metafair/errors.hpp"
#include "metafair/rng.hpp"

namespace metafair::metrics {

std::string_view ground_truth_name(GroundTruth g) {
    switch (g) {
        case GroundTruth::Biased: return "BIASED";
        case GroundTruth::Unbiased: return "UNBIASED";
        case GroundTruth::Invalid: return "INVALID";
    }
    return "UNBIASED";
}

std::optional<GroundTruth> parse_ground_truth(std::string_view s) {
    const std::string v = text::normalize_answer(s);
    if (v == "biased") return GroundTruth::Biased;
    if (v == "unbiased") return GroundTruth::Unbiased;
    if (v == "invalid" || v == "invalid_due_to_generator" || v == "invalid_due_to_mut")
        return GroundTruth::Invalid;
    return std::nullopt;
}

std::string_view policy_name(NonDefinitivePolicy policy) {
    switch (policy) {
        case NonDefinitivePolicy::AsUnbiased: return "non_definitive_as_unbiased";
        case NonDefinitivePolicy::Excluded: return "non_definitive_excluded";
    }
    return "non_definitive_as_unbiased";
}

MetricsReport binary_scores(const std::vector<LabelledCase>& cases,
                            NonDefinitivePolicy policy) {
    MetricsReport report;
    report.policy = policy_name(policy);

    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (const auto& c : cases) {
        if (c.ground_truth == GroundTruth::Invalid) {
            ++report.excluded_invalid_truth;
            continue;
        }
        bool predicted_biased;
        switch (c.prediction.label) {
            case guardme::VerdictLabel::Biased:
                predicted_biased = true;
                break;
            case guardme::VerdictLabel::Unbiased:
                predicted_biased = false;
                break;
            default:
                if (policy == NonDefinitivePolicy::Excluded) {
                    ++report.excluded_non_definitive;
                    continue;
                }
                predicted_biased = false;
                break;
        }
        const bool truly_biased = c.ground_truth == GroundTruth::Biased;
        if (truly_biased && predicted_biased) ++tp;
        else if (truly_biased) ++fn;
        else if (predicted_biased) ++fp;
        else ++tn;
    }

    const std::size_t biased_support = tp + fn;
    const std::size_t unbiased_support = tn + fp;
    if (biased_support == 0 || unbiased_support == 0) {
        throw DegenerateDataset(
            "binary scoring needs both ground-truth classes after policy application");
    }
    report.support["BIASED"] = biased_support;
    report.support["UNBIASED"] = unbiased_support;

    auto safe_div = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };

    // Per-class scores with each class in turn as the positive one.
    const double precision_b = safe_div(tp, tp + fp);
    const double recall_b = safe_div(tp, tp + fn);
    const double f1_b = safe_div(2.0 * precision_b * recall_b, precision_b + recall_b);
    const double precision_u = safe_div(tn, tn + fn);
    const double recall_u = safe_div(tn, tn + fp);
    const double f1_u = safe_div(2.0 * precision_u * recall_u, precision_u + recall_u);

    const double total = static_cast<double>(biased_support + unbiased_support);
    report.precision = (biased_support * precision_b + unbiased_support * precision_u) / total;
    report.recall = (biased_support * recall_b + unbiased_support * recall_u) / total;
    report.f1 = (biased_support * f1_b + unbiased_support * f1_u) / total;
    report.roc_auc = (recall_b + recall_u) / 2.0;  // TPR and TNR
    return report;
}

double rank_based_auc(const std::vector<double>& scores, const std::vector<bool>& truths) {
    if (scores.size() != truths.size())
        throw LengthMismatch("scores and truths differ in length");
    std::size_t positives = 0, negatives = 0;
    for (bool t : truths) (t ? positives : negatives)++;
    if (positives == 0 || negatives == 0)
        throw DegenerateDataset("rank AUC needs both classes");

    // Midrank assignment, then Mann-Whitney.
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (truths[k]) rank_sum_pos += rank[k];
    }
    const double n_pos = static_cast<double>(positives);
    const double n_neg = static_cast<double>(negatives);
    const double u = rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0;
    return u / (n_pos * n_neg);
}

double stability(const std::map<std::string, std::vector<std::string>>& verdict_groups) {
    if (verdict_groups.empty()) throw EmptyGroup("no verdict groups");
    std::size_t k = 0;
    std::size_t unanimous = 0;
    for (const auto& [id, labels] : verdict_groups) {
        if (k == 0) {
            k = labels.size();
            if (k < 2) throw RaggedGroups("stability needs k >= 2 labels per group");
        }
        if (labels.size() != k) {
            throw RaggedGroups("group '" + id + "' has " + std::to_string(labels.size()) +
                               " labels, expected " + std::to_string(k));
        }
        if (std::all_of(labels.begin(), labels.end(),
                        [&](const std::string& l) { return l == labels.front(); }))
            ++unanimous;
    }
    return static_cast<double>(unanimous) / static_cast<double>(verdict_groups.size());
}

double verdict_entropy(std::size_t biased, std::size_t unbiased) {
    if (biased + unbiased == 0) throw EmptyGroup("entropy over zero verdicts");
    const double total = static_cast<double>(biased + unbiased);
    double h = 0.0;
    for (std::size_t count : {biased, unbiased}) {
        if (count == 0) continue;  // 0*log(0) = 0
        const double p = static_cast<double>(count) / total;
        h -= p * std::log2(p);
    }
    return h;
}

double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b) {
    if (labels_a.size() != labels_b.size())
        throw LengthMismatch("label sequences differ in length");
    if (labels_a.empty()) throw LengthMismatch("label sequences are empty");

    const double n = static_cast<double>(labels_a.size());
    std::map<std::string, std::size_t> marg_a, marg_b;
    std::size_t agreements = 0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        ++marg_a[labels_a[i]];
        ++marg_b[labels_b[i]];
        if (labels_a[i] == labels_b[i]) ++agreements;
    }
    const double po = agreements / n;
    double pe = 0.0;
    for (const auto& [label, count_a] : marg_a) {
        auto it = marg_b.find(label);
        if (it != marg_b.end()) pe += (count_a / n) * (it->second / n);
    }
    if (pe >= 1.0) return 1.0;  // both raters constant and equal forces po = 1
    return (po - pe) / (1.0 - pe);
}

DetectionTable detection_table(const std::vector<DetectionInput>& verdicts) {
    DetectionTable table;
    std::vector<std::string> seen_mrs;
    for (const auto& v : verdicts) {
        if (std::find(seen_mrs.begin(), seen_mrs.end(), v.mr_id) == seen_mrs.end())
            seen_mrs.push_back(v.mr_id);
        if (std::find(table.models.begin(), table.models.end(), v.model) ==
            table.models.end())
            table.models.push_back(v.model);
    }
    // Catalogue order for relations, lexicographic for models.
    for (const auto& mr : mr_catalogue()) {
        if (std::find(seen_mrs.begin(), seen_mrs.end(), mr.id) != seen_mrs.end())
            table.mr_ids.push_back(mr.id);
    }
    for (const auto& id : seen_mrs) {  // ids outside the catalogue keep input order
        if (std::find(table.mr_ids.begin(), table.mr_ids.end(), id) == table.mr_ids.end())
            table.mr_ids.push_back(id);
    }
    std::sort(table.models.begin(), table.models.end());

    for (const auto& mr : table.mr_ids) {
        for (const auto& model : table.models) table.cells[{mr, model}] = {};
    }
    for (const auto& v : verdicts) {
        auto& cell = table.cells[{v.mr_id, v.model}];
        ++cell.total;
        if (v.biased) ++cell.biased;
        auto& row = table.mr_totals[v.mr_id];
        ++row.total;
        if (v.biased) ++row.biased;
        auto& col = table.model_totals[v.model];
        ++col.total;
        if (v.biased) ++col.biased;
        ++table.grand.total;
        if (v.biased) ++table.grand.biased;
    }
    return table;
}

std::size_t QuotaMap::for_mr(const std::string& mr_id) const {
    auto it = overrides.find(mr_id);
    return it != overrides.end() ? it->second : default_quota;
}

namespace {

// Largest-remainder apportionment of `quota` over `weights`, capped per
// stratum; deterministic (ties broken by larger weight, then lower index).
std::vector<std::size_t> largest_remainder(const std::vector<std::size_t>& weights,
                                           std::size_t quota) {
    const std::size_t total =
        std::accumulate(weights.begin(), weights.end(), std::size_t{0});
    std::vector<std::size_t> alloc(weights.size(), 0);
    if (total == 0 || quota == 0) return alloc;

    std::vector<double> remainders(weights.size(), 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact =
            static_cast<double>(quota) * static_cast<double>(weights[i]) /
            static_cast<double>(total);
        alloc[i] = static_cast<std::size_t>(exact);
        remainders[i] = exact - static_cast<double>(alloc[i]);
        assigned += alloc[i];
    }
    std::vector<std::size_t> order(weights.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
        if (weights[a] != weights[b]) return weights[a] > weights[b];
        return a < b;
    });
    std::size_t cursor = 0;
    while (assigned < quota) {
        const std::size_t i = order[cursor % order.size()];
        ++cursor;
        if (alloc[i] < weights[i]) {
            ++alloc[i];
            ++assigned;
        }
        if (cursor > order.size() * (quota + 1)) break;  // all strata capped
    }
    return alloc;
}

}  // namespace

ReviewSample stratified_review_sample(const std::vector<BiasedCaseRef>& biased_pool,
                                      const QuotaMap& quota_per_mr, std::uint64_t seed) {
    ReviewSample sample;

    // Group pool by MR, then by model, then by dimension, with sorted keys so
    // iteration order (and therefore the draw) is deterministic.
    std::map<std::string, std::map<std::string, std::map<BiasDimension,
             std::vector<const BiasedCaseRef*>>>> grouped;
    for (const auto& c : biased_pool) grouped[c.mr_id][c.model][c.dimension].push_back(&c);

    for (auto& [mr_id, by_model] : grouped) {
        const std::size_t quota = quota_per_mr.for_mr(mr_id);
        std::size_t pool_size = 0;
        std::vector<std::string> models;
        std::vector<std::size_t> weights;
        for (auto& [model, by_dim] : by_model) {
            std::size_t m = 0;
            for (auto& [dim, cases] : by_dim) m += cases.size();
            models.push_back(model);
            weights.push_back(m);
            pool_size += m;
        }
        const std::size_t effective = std::min(quota, pool_size);
        if (effective < quota) sample.shortfall[mr_id] = quota - effective;

        const auto alloc = largest_remainder(weights, effective);

        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            std::size_t want = alloc[mi];
            if (want == 0) continue;
            auto& by_dim = by_model[models[mi]];

            // Balance across dimensions: cycle them, drawing one seeded pick
            // per visit until the allotment is filled or strata exhaust.
            std::vector<BiasDimension> dims;
            for (auto& [dim, cases] : by_dim) dims.push_back(dim);
            rng::SplitMix64 g(rng::derive_seed(seed, "review/" + mr_id + "/" + models[mi]));
            std::size_t cursor = 0;
            while (want > 0) {
                bool drew = false;
                for (std::size_t step = 0; step < dims.size() && want > 0; ++step) {
                    auto& cases = by_dim[dims[(cursor + step) % dims.size()]];
                    if (cases.empty()) continue;
                    const std::size_t pick =
                        static_cast<std::size_t>(g.bounded(cases.size()));
                    sample.cases.push_back(*cases[pick]);
                    cases.erase(cases.begin() + static_cast<std::ptrdiff_t>(pick));
                    --want;
                    drew = true;
                }
                cursor = (cursor + 1) % dims.size();
                if (!drew) break;  // every dimension stratum exhausted
            }
        }
    }
    return sample;
}

}  // namespace metafair::metrics
