#include "metafair/metamorphic_test.hpp"

#include <algorithm>

#include "metafair/text.hpp"

namespace metafair {

const std::string& MetamorphicTest::follow_up_text() const {
    if (const auto* s = std::get_if<StaticFollowUp>(&follow_up)) return s->text;
    return std::get<ScaffoldFollowUp>(follow_up).neutral_question;
}

namespace {

std::vector<std::string> normalized_set(std::vector<std::string> values) {
    for (auto& v : values) v = text::normalize_answer(v);
    std::sort(values.begin(), values.end());
    return values;
}

}  // namespace

std::optional<std::string> validate_test(const MetamorphicTest& test,
                                         const MetamorphicRelationSpec& mr) {
    if (test.mr_id != mr.id) return "mr_id_mismatch";
    if (!mr.applies_to(test.dimension)) return "dimension_not_applicable";
    if (text::trim(test.source_prompt).empty()) return "empty_source_prompt";
    if (text::trim(test.follow_up_text()).empty()) return "empty_follow_up";

    const bool scaffold = test.is_scaffold();
    if (scaffold != (mr.follow_up_kind == FollowUpKind::ResponseEmbedding))
        return "follow_up_kind_mismatch";

    if (scaffold) {
        // MR8-MR10: the attribute must occur in the source prompt.
        if (!test.source_attribute) return "missing_source_attribute";
        if (!text::contains_ci(test.source_prompt, *test.source_attribute))
            return "attribute_not_in_prompt";
        return std::nullopt;
    }

    if (mr.transformation == Transformation::Addition) {
        // MR1, MR3, MR4, MR6, MR7: the added attribute must occur verbatim
        // (case-insensitive) in the static follow-up text.
        if (!test.follow_up_attribute) return "missing_follow_up_attribute";
        if (!text::contains_ci(test.follow_up_text(), *test.follow_up_attribute))
            return "attribute_not_in_prompt";
        return std::nullopt;
    }

    // Replacement (MR2, MR5, MR11-MR14): both prompts carry their attribute
    // and the two attributes differ.
    if (!test.source_attribute) return "missing_source_attribute";
    if (!test.follow_up_attribute) return "missing_follow_up_attribute";
    if (!text::contains_ci(test.source_prompt, *test.source_attribute))
        return "attribute_not_in_prompt";
    if (!text::contains_ci(test.follow_up_text(), *test.follow_up_attribute))
        return "attribute_not_in_prompt";
    if (text::normalize_answer(*test.source_attribute) ==
        text::normalize_answer(*test.follow_up_attribute))
        return "attributes_identical";

    if (mr.id == "MR13") {
        // Equivalence over options needs comparable answer spaces.
        auto a = text::extract_mc_options(test.source_prompt);
        auto b = text::extract_mc_options(test.follow_up_text());
        if (a.empty() || b.empty()) return "options_missing";
        std::vector<std::string> ab, bb;
        for (const auto& o : a) ab.push_back(o.body);
        for (const auto& o : b) bb.push_back(o.body);
        if (normalized_set(ab) != normalized_set(bb)) return "option_sets_differ";
    }
    if (mr.id == "MR14") {
        // Spearman needs a shared item universe.
        auto a = text::extract_ranking_items(test.source_prompt);
        auto b = text::extract_ranking_items(test.follow_up_text());
        if (a.empty() || b.empty()) return "items_missing";
        if (normalized_set(a) != normalized_set(b)) return "item_sets_differ";
    }
    return std::nullopt;
}

}  // namespace metafair
