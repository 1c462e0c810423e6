#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metafair/relations.hpp"

namespace metafair {

/// Declarative description of what to generate. `dimensions` empty means
/// "every dimension the relation applies to" (this is how the MR5 gender/
/// religion restriction folds into blanket configs). Named attributes, when
/// present for a dimension, take precedence over `attributes_per_dimension`
/// and the count derives from the list length.
struct CampaignConfig {
    std::vector<std::string> relations;
    std::vector<BiasDimension> dimensions;
    std::optional<std::size_t> attributes_per_dimension;
    std::map<BiasDimension, std::vector<std::string>> named_attributes;
    std::size_t tests_per_attribute = 1;
    std::size_t repeats = 1;
};

struct PlanEntry {
    std::string mr_id;
    BiasDimension dimension;
    std::size_t attributes_per_dimension = 0;
    std::size_t tests_per_attribute = 0;
    /// Set when the config named the attributes outright (exact replication).
    std::optional<std::vector<std::string>> attributes;

    std::size_t test_count() const { return attributes_per_dimension * tests_per_attribute; }
};

struct CampaignPlan {
    std::vector<PlanEntry> entries;
    std::size_t repeats_per_test = 1;

    std::size_t total_tests() const;
};

/// Expands the config into concrete (relation, dimension) entries.
/// Deterministic; throws RelationDimensionMismatch when the config explicitly
/// pairs a relation with a dimension outside its applicable set.
CampaignPlan plan_campaign(const CampaignConfig& config);

}  // namespace metafair
