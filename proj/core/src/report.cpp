#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/harness.hpp"

namespace metafair::harness {

using nlohmann::json;

std::vector<jsonl::VerdictRecord> select_evaluator(
    const std::vector<jsonl::VerdictRecord>& verdicts,
    const std::optional<std::string>& evaluator) {
    std::set<std::string> evaluators;
    for (const auto& v : verdicts) evaluators.insert(v.verdict.evaluator);

    std::string chosen;
    if (evaluator) {
        chosen = *evaluator;
        if (!evaluators.count(chosen))
            throw ConfigError("no verdicts from evaluator '" + chosen + "'");
    } else if (evaluators.count("majority")) {
        chosen = "majority";
    } else if (evaluators.size() == 1) {
        chosen = *evaluators.begin();
    } else {
        std::string names;
        for (const auto& e : evaluators) names += (names.empty() ? "" : ", ") + e;
        throw ConfigError("multiple evaluators present (" + names +
                          "); pass --evaluator to pick one");
    }

    std::vector<jsonl::VerdictRecord> out;
    for (const auto& v : verdicts) {
        if (v.verdict.evaluator == chosen) out.push_back(v);
    }
    return out;
}

namespace {

std::string percent(double rate) {
    std::ostringstream out;
    out << static_cast<long>(std::lround(rate * 100.0)) << "%";
    return out.str();
}

struct EntropyCell {
    double sum = 0.0;
    std::size_t groups = 0;

    double average() const { return groups == 0 ? 0.0 : sum / groups; }
};

}  // namespace

ReportFiles write_reports(const std::filesystem::path& out_dir,
                          const std::vector<jsonl::VerdictRecord>& verdicts,
                          const std::optional<std::string>& evaluator) {
    const auto selected = select_evaluator(verdicts, evaluator);
    if (selected.empty()) throw ConfigError("no verdicts to report on");
    std::filesystem::create_directories(out_dir);

    // Detection table over every selected execution verdict.
    std::vector<metrics::DetectionInput> rows;
    rows.reserve(selected.size());
    std::size_t invalid_generator = 0, invalid_mut = 0, indeterminable = 0;
    for (const auto& v : selected) {
        rows.push_back({v.mr_id, v.model_under_test,
                        v.verdict.label == guardme::VerdictLabel::Biased});
        if (v.verdict.label == guardme::VerdictLabel::Invalid) {
            if (v.verdict.invalid_subtype == guardme::InvalidSubtype::DueToGenerator)
                ++invalid_generator;
            else
                ++invalid_mut;
        } else if (v.verdict.label == guardme::VerdictLabel::Indeterminable) {
            ++indeterminable;
        }
    }
    const auto table = metrics::detection_table(rows);

    // Verdict entropy per (test, model) over execution repeats, when present.
    bool has_repeats = false;
    for (const auto& v : selected) {
        if (v.repeat_index > 0) {
            has_repeats = true;
            break;
        }
    }
    std::map<std::pair<std::string, std::string>, EntropyCell> entropy_cells;
    if (has_repeats) {
        std::map<std::tuple<std::string, std::string, std::string>,
                 std::pair<std::size_t, std::size_t>> counts;  // (mr,model,test) -> (b,u)
        for (const auto& v : selected) {
            auto& c = counts[{v.mr_id, v.model_under_test, v.test_id}];
            if (v.verdict.label == guardme::VerdictLabel::Biased) ++c.first;
            if (v.verdict.label == guardme::VerdictLabel::Unbiased) ++c.second;
        }
        for (const auto& [key, c] : counts) {
            if (c.first + c.second == 0) continue;  // all runs invalid/indeterminable
            auto& cell = entropy_cells[{std::get<0>(key), std::get<1>(key)}];
            cell.sum += metrics::verdict_entropy(c.first, c.second);
            ++cell.groups;
        }
    }

    // Stability over judge repeats when present, else over execution repeats.
    bool has_judge_repeats = false;
    for (const auto& v : selected) {
        if (v.judge_repeat > 0) {
            has_judge_repeats = true;
            break;
        }
    }
    std::map<std::string, std::optional<double>> stability_per_model;
    {
        std::map<std::string, std::map<std::string, std::vector<std::string>>> groups;
        for (const auto& v : selected) {
            std::string group_key = has_judge_repeats
                                        ? v.test_id + "#" + std::to_string(v.repeat_index)
                                        : v.test_id;
            groups[v.model_under_test][group_key].push_back(
                std::string(guardme::label_name(v.verdict.label)));
        }
        for (auto& [model, g] : groups) {
            bool ragged = false;
            std::size_t k = 0;
            for (auto& [key, labels] : g) {
                if (k == 0) k = labels.size();
                if (labels.size() != k) ragged = true;
            }
            if (k >= 2 && !ragged) {
                stability_per_model[model] = metrics::stability(g);
            } else {
                stability_per_model[model] = std::nullopt;
            }
        }
    }

    ReportFiles files;

    // --- report.json
    json doc;
    doc["schema_version"] = jsonl::kSchemaVersion;
    doc["evaluator"] = selected.front().verdict.evaluator;
    doc["totals"] = {{"executions", table.grand.total},
                     {"biased", table.grand.biased},
                     {"detection_rate", table.grand.rate()},
                     {"indeterminable", indeterminable},
                     {"invalid_due_to_generator", invalid_generator},
                     {"invalid_due_to_mut", invalid_mut}};
    json detection = json::object();
    for (const auto& mr : table.mr_ids) {
        json row = json::object();
        for (const auto& model : table.models) {
            const auto& cell = table.cells.at({mr, model});
            row[model] = {{"biased", cell.biased},
                          {"total", cell.total},
                          {"rate", cell.rate()},
                          {"empty", cell.empty()}};
        }
        const auto& total = table.mr_totals.count(mr) ? table.mr_totals.at(mr)
                                                      : metrics::DetectionCell{};
        row["TOTAL"] = {{"biased", total.biased},
                        {"total", total.total},
                        {"rate", total.rate()}};
        detection[mr] = row;
    }
    doc["detection"] = detection;
    json per_model = json::object();
    for (const auto& model : table.models) {
        const auto& cell = table.model_totals.count(model) ? table.model_totals.at(model)
                                                           : metrics::DetectionCell{};
        json entry = {{"biased", cell.biased},
                      {"total", cell.total},
                      {"rate", cell.rate()}};
        auto st = stability_per_model.find(model);
        if (st != stability_per_model.end() && st->second) entry["stability"] = *st->second;
        per_model[model] = entry;
    }
    doc["per_model"] = per_model;
    if (has_repeats) {
        json entropy = json::object();
        for (const auto& mr : table.mr_ids) {
            json row = json::object();
            for (const auto& model : table.models) {
                auto it = entropy_cells.find({mr, model});
                if (it != entropy_cells.end()) row[model] = it->second.average();
            }
            entropy[mr] = row;
        }
        doc["entropy"] = entropy;
    }

    const auto json_path = out_dir / "report.json";
    {
        std::ofstream out(json_path);
        if (!out) throw IoError("cannot write " + json_path.string());
        out << doc.dump(2) << '\n';
    }
    files.files.push_back(json_path);

    // --- detection_rates.csv
    const auto csv_path = out_dir / "detection_rates.csv";
    {
        std::ofstream out(csv_path);
        if (!out) throw IoError("cannot write " + csv_path.string());
        out << "mr_id";
        for (const auto& model : table.models) out << "," << model;
        out << ",total_biased,total,rate\n";
        for (const auto& mr : table.mr_ids) {
            out << mr;
            for (const auto& model : table.models) {
                const auto& cell = table.cells.at({mr, model});
                out << "," << cell.biased << "/" << cell.total;
            }
            const auto& total = table.mr_totals.count(mr) ? table.mr_totals.at(mr)
                                                          : metrics::DetectionCell{};
            out << "," << total.biased << "," << total.total << "," << percent(total.rate())
                << "\n";
        }
        out << "TOTAL";
        for (const auto& model : table.models) {
            const auto& cell = table.model_totals.count(model)
                                   ? table.model_totals.at(model)
                                   : metrics::DetectionCell{};
            out << "," << cell.biased << "/" << cell.total;
        }
        out << "," << table.grand.biased << "," << table.grand.total << ","
            << percent(table.grand.rate()) << "\n";
    }
    files.files.push_back(csv_path);

    // --- entropy.csv (repeat runs only)
    if (has_repeats) {
        const auto entropy_path = out_dir / "entropy.csv";
        std::ofstream out(entropy_path);
        if (!out) throw IoError("cannot write " + entropy_path.string());
        out << "mr_id";
        for (const auto& model : table.models) out << "," << model;
        out << "\n";
        for (const auto& mr : table.mr_ids) {
            out << mr;
            for (const auto& model : table.models) {
                auto it = entropy_cells.find({mr, model});
                out << ",";
                if (it != entropy_cells.end()) out << it->second.average();
            }
            out << "\n";
        }
        files.files.push_back(entropy_path);
    }

    // --- summary.md
    const auto md_path = out_dir / "summary.md";
    {
        std::ofstream out(md_path);
        if (!out) throw IoError("cannot write " + md_path.string());
        out << "# Campaign report\n\n";
        out << "- Evaluator: `" << selected.front().verdict.evaluator << "`\n";
        out << "- Executions evaluated: " << table.grand.total << "\n";
        out << "- Flagged biased: " << table.grand.biased << " ("
            << percent(table.grand.rate()) << ")\n";
        out << "- Indeterminable: " << indeterminable
            << ", invalid (generator): " << invalid_generator
            << ", invalid (model under test): " << invalid_mut << "\n\n";

        out << "## Biased executions per MR and model\n\n";
        out << "| MR |";
        for (const auto& model : table.models) out << " " << model << " |";
        out << " TOTAL |\n|---|";
        for (std::size_t i = 0; i < table.models.size() + 1; ++i) out << "---|";
        out << "\n";
        for (const auto& mr : table.mr_ids) {
            out << "| " << mr << " |";
            for (const auto& model : table.models) {
                const auto& cell = table.cells.at({mr, model});
                if (cell.empty()) {
                    out << " - |";
                } else {
                    out << " " << cell.biased << " (" << percent(cell.rate()) << ") |";
                }
            }
            const auto& total = table.mr_totals.count(mr) ? table.mr_totals.at(mr)
                                                          : metrics::DetectionCell{};
            out << " **" << total.biased << " (" << percent(total.rate()) << ")** |\n";
        }
        out << "| **TOTAL** |";
        for (const auto& model : table.models) {
            const auto& cell = table.model_totals.count(model)
                                   ? table.model_totals.at(model)
                                   : metrics::DetectionCell{};
            out << " **" << cell.biased << " (" << percent(cell.rate()) << ")** |";
        }
        out << " **" << table.grand.biased << " (" << percent(table.grand.rate())
            << ")** |\n";

        if (has_repeats) {
            out << "\n## Verdict entropy by MR and model\n\n| MR |";
            for (const auto& model : table.models) out << " " << model << " |";
            out << "\n|---|";
            for (std::size_t i = 0; i < table.models.size(); ++i) out << "---|";
            out << "\n";
            for (const auto& mr : table.mr_ids) {
                out << "| " << mr << " |";
                for (const auto& model : table.models) {
                    auto it = entropy_cells.find({mr, model});
                    if (it == entropy_cells.end()) {
                        out << " - |";
                    } else {
                        char buf[16];
                        std::snprintf(buf, sizeof(buf), "%.3f", it->second.average());
                        out << " " << buf << " |";
                    }
                }
                out << "\n";
            }
        }
        bool any_stability = false;
        for (const auto& [model, st] : stability_per_model) {
            if (st) any_stability = true;
        }
        if (any_stability) {
            out << "\n## Stability per model\n\n| Model | Stability |\n|---|---|\n";
            for (const auto& [model, st] : stability_per_model) {
                if (!st) continue;
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%.3f", *st);
                out << "| " << model << " | " << buf << " |\n";
            }
        }
    }
    files.files.push_back(md_path);
    return files;
}

}  // namespace metafair::harness
