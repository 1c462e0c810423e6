#include <doctest.h>

#include "metafair/campaign.hpp"
#include "metafair/errors.hpp"

using namespace metafair;

namespace {

std::vector<std::string> relations(int from, int to) {
    std::vector<std::string> out;
    for (int i = from; i <= to; ++i) out.push_back("MR" + std::to_string(i));
    return out;
}

std::vector<std::string> all_relations() { return relations(1, 14); }

}  // namespace

TEST_CASE("RQ1-style config yields 470 tests") {
    // 9 judge MRs x 5 dims x 5 attrs x 2, plus MR5 x 2 dims x 5 x 2.
    CampaignConfig config;
    config.relations = relations(1, 10);
    config.attributes_per_dimension = 5;
    config.tests_per_attribute = 2;
    auto plan = plan_campaign(config);
    CHECK(plan.total_tests() == 470);
}

TEST_CASE("RQ2-style config yields 3350 tests and 36850 executions over 11 models") {
    CampaignConfig config;
    config.relations = all_relations();
    config.attributes_per_dimension = 10;
    config.tests_per_attribute = 5;
    auto plan = plan_campaign(config);
    CHECK(plan.total_tests() == 3350);
    CHECK(plan.total_tests() * 11 == 36850);
}

TEST_CASE("RQ3-style config yields 134 tests") {
    CampaignConfig config;
    config.relations = all_relations();
    config.attributes_per_dimension = 2;
    config.tests_per_attribute = 1;
    CHECK(plan_campaign(config).total_tests() == 134);
}

TEST_CASE("explicit dimension lists are strict") {
    CampaignConfig config;
    config.relations = {"MR5"};
    config.dimensions = {BiasDimension::PhysicalAppearance};
    config.attributes_per_dimension = 5;
    config.tests_per_attribute = 2;
    CHECK_THROWS_AS(plan_campaign(config), RelationDimensionMismatch);

    config.dimensions = {BiasDimension::Gender, BiasDimension::Religion};
    auto plan = plan_campaign(config);
    CHECK(plan.total_tests() == 20);
}

TEST_CASE("named attributes override counts and derive them from list length") {
    CampaignConfig config;
    config.relations = {"MR1"};
    config.dimensions = {BiasDimension::Gender};
    config.named_attributes[BiasDimension::Gender] = {"female", "male", "non-binary"};
    config.tests_per_attribute = 2;
    auto plan = plan_campaign(config);
    REQUIRE(plan.entries.size() == 1);
    CHECK(plan.entries[0].attributes_per_dimension == 3);
    CHECK(plan.total_tests() == 6);
    REQUIRE(plan.entries[0].attributes.has_value());
    CHECK(plan.entries[0].attributes->at(0) == "female");
}

TEST_CASE("plan_campaign is deterministic") {
    CampaignConfig config;
    config.relations = all_relations();
    config.attributes_per_dimension = 2;
    config.tests_per_attribute = 1;
    auto a = plan_campaign(config);
    auto b = plan_campaign(config);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].mr_id == b.entries[i].mr_id);
        CHECK(a.entries[i].dimension == b.entries[i].dimension);
        CHECK(a.entries[i].test_count() == b.entries[i].test_count());
    }
}

TEST_CASE("degenerate configs are rejected") {
    CampaignConfig config;
    CHECK_THROWS_AS(plan_campaign(config), ConfigError);  // no relations

    config.relations = {"MR1"};
    CHECK_THROWS_AS(plan_campaign(config), ConfigError);  // no attribute source

    config.attributes_per_dimension = 1;
    config.tests_per_attribute = 0;
    CHECK_THROWS_AS(plan_campaign(config), ConfigError);

    config.tests_per_attribute = 1;
    config.repeats = 0;
    CHECK_THROWS_AS(plan_campaign(config), ConfigError);
}
