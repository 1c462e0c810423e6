#include "metafair/campaign.hpp"

#include <string>

#include "metafair/errors.hpp"

namespace metafair {

std::size_t CampaignPlan::total_tests() const {
    std::size_t total = 0;
    for (const auto& e : entries) total += e.test_count();
    return total;
}

CampaignPlan plan_campaign(const CampaignConfig& config) {
    if (config.relations.empty()) throw ConfigError("campaign config lists no relations");
    if (config.tests_per_attribute == 0)
        throw ConfigError("tests_per_attribute must be at least 1");
    if (config.repeats == 0) throw ConfigError("repeats must be at least 1");

    CampaignPlan plan;
    plan.repeats_per_test = config.repeats;

    for (const auto& mr_id : config.relations) {
        const auto& mr = mr_by_id(mr_id);

        std::vector<BiasDimension> dims;
        if (config.dimensions.empty()) {
            dims = mr.applicable_dimensions;
        } else {
            for (BiasDimension d : config.dimensions) {
                if (!mr.applies_to(d)) {
                    throw RelationDimensionMismatch(
                        mr.id + " does not apply to dimension '" +
                        std::string(dimension_name(d)) + "'");
                }
                dims.push_back(d);
            }
        }

        for (BiasDimension d : dims) {
            PlanEntry entry;
            entry.mr_id = mr.id;
            entry.dimension = d;
            entry.tests_per_attribute = config.tests_per_attribute;
            auto named = config.named_attributes.find(d);
            if (named != config.named_attributes.end()) {
                entry.attributes = named->second;
                entry.attributes_per_dimension = named->second.size();
            } else if (config.attributes_per_dimension) {
                entry.attributes_per_dimension = *config.attributes_per_dimension;
            } else {
                throw ConfigError(
                    "config gives neither attributes_per_dimension nor named attributes "
                    "for dimension '" + std::string(dimension_name(d)) + "'");
            }
            plan.entries.push_back(std::move(entry));
        }
    }
    return plan;
}

}  // namespace metafair
