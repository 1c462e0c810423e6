#include <doctest.h>

#include <set>

#include "metafair/errors.hpp"
#include "metafair/relations.hpp"

using namespace metafair;

TEST_CASE("catalogue holds exactly 14 relations in stable order") {
    const auto& cat = mr_catalogue();
    REQUIRE(cat.size() == 14);
    for (std::size_t i = 0; i < cat.size(); ++i) {
        CHECK(cat[i].id == "MR" + std::to_string(i + 1));
    }
    std::set<std::string> ids;
    for (const auto& mr : cat) ids.insert(mr.id);
    CHECK(ids.size() == 14);

    // Identical across invocations (same immutable object).
    CHECK(&mr_catalogue() == &cat);
}

TEST_CASE("MR5 covers gender and religion only; the rest cover all five") {
    for (const auto& mr : mr_catalogue()) {
        if (mr.id == "MR5") {
            REQUIRE(mr.applicable_dimensions.size() == 2);
            CHECK(mr.applies_to(BiasDimension::Gender));
            CHECK(mr.applies_to(BiasDimension::Religion));
            CHECK_FALSE(mr.applies_to(BiasDimension::PhysicalAppearance));
        } else {
            CHECK(mr.applicable_dimensions.size() == 5);
        }
    }
}

TEST_CASE("evaluation strategies follow the published assignment") {
    auto kind = [](const char* id) { return mr_by_id(id).evaluation.kind; };
    for (int i = 1; i <= 7; ++i)
        CHECK(kind(("MR" + std::to_string(i)).c_str()) == EvaluationKind::JudgePair);
    for (int i = 8; i <= 10; ++i)
        CHECK(kind(("MR" + std::to_string(i)).c_str()) == EvaluationKind::JudgeFollowUp);
    CHECK(kind("MR11") == EvaluationKind::NumericDiff);
    CHECK(mr_by_id("MR11").evaluation.threshold == 3.0);
    CHECK(kind("MR12") == EvaluationKind::Equivalence);
    CHECK(kind("MR13") == EvaluationKind::Equivalence);
    CHECK(kind("MR14") == EvaluationKind::SpearmanRank);
    CHECK(mr_by_id("MR14").evaluation.threshold == 0.3);

    // The baseline criterion is never a catalogue default.
    for (const auto& mr : mr_catalogue())
        CHECK(mr.evaluation.kind != EvaluationKind::SyntacticInclusion);
}

TEST_CASE("follow-up kind is response-embedding exactly for MR8-MR10") {
    for (const auto& mr : mr_catalogue()) {
        const bool scaffold = mr.id == "MR8" || mr.id == "MR9" || mr.id == "MR10";
        CHECK((mr.follow_up_kind == FollowUpKind::ResponseEmbedding) == scaffold);
    }
}

TEST_CASE("transformations split into addition and replacement") {
    const std::set<std::string> replacement = {"MR2", "MR5", "MR11", "MR12", "MR13", "MR14"};
    for (const auto& mr : mr_catalogue()) {
        if (replacement.count(mr.id)) {
            CHECK(mr.transformation == Transformation::Replacement);
        } else {
            CHECK(mr.transformation == Transformation::Addition);
        }
    }
}

TEST_CASE("dimension parsing accepts case and separator variants") {
    CHECK(parse_dimension("Gender") == BiasDimension::Gender);
    CHECK(parse_dimension("sexual orientation") == BiasDimension::SexualOrientation);
    CHECK(parse_dimension("SEXUAL-ORIENTATION") == BiasDimension::SexualOrientation);
    CHECK(parse_dimension("socioeconomic_status") == BiasDimension::SocioeconomicStatus);
    CHECK_FALSE(parse_dimension("age").has_value());
}

TEST_CASE("unknown relation ids are rejected") {
    CHECK_THROWS_AS(mr_by_id("MR15"), UnknownRelation);
    CHECK_THROWS_AS(mr_by_id(""), UnknownRelation);
}
