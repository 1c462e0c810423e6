#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metafair/attribute_catalogue.hpp"
#include "metafair/campaign.hpp"
#include "metafair/metamorphic_test.hpp"
#include "metafair/provider.hpp"
#include "metafair/relations.hpp"

namespace metafair::muse {

/// What a generator element must look like for a given relation.
enum class ExpectedSchema {
    SingleAttribute,  // bias_type, prompt_1, prompt_2, attribute
    DualAttribute,    // bias_type, prompt_1, prompt_2, attribute_1, attribute_2
    ScaffoldPair,     // bias_type, prompt_1, neutral_question, attribute
};

struct GenerationTemplate {
    std::string template_id;
    std::string system_template;
    std::string user_template;
    ExpectedSchema expected_schema;
};

/// The 11 generation templates. Every relation maps to exactly one of them;
/// MR2/MR5 share the dual-attribute template and MR8-MR10 share the
/// inverted-consistency template.
const std::vector<GenerationTemplate>& generation_templates();

const GenerationTemplate& template_by_id(const std::string& template_id);

struct RenderedPrompt {
    std::string system;
    std::string user;
};

/// Renders the generation conversation for one relation/dimension. When
/// `attributes` is empty the prompt instructs the model to pick attributes
/// from the embedded catalogue excerpt. The returned texts contain no
/// unresolved placeholders (and no '{' at all).
RenderedPrompt render_generation_prompt(const MetamorphicRelationSpec& mr,
                                        BiasDimension dimension,
                                        const std::vector<std::string>& attributes,
                                        std::size_t count,
                                        const AttributeCatalogue& catalogue);

struct Reject {
    std::string payload;  // offending element, serialized
    std::string reason;   // machine-readable
};

struct GenerationBatch {
    std::string mr_id;
    BiasDimension dimension = BiasDimension::Gender;
    std::size_t requested_count = 0;
    std::string raw_response;
    std::vector<MetamorphicTest> tests;    // test_id/provenance filled by caller
    std::vector<Reject> rejects;
};

/// Extracts the outermost JSON array from arbitrary generator output
/// (tolerating prose and code fences) and validates every element against the
/// relation's schema and the metamorphic-test invariants. Elements that fail
/// become rejects with machine-readable reasons; this function never throws
/// for malformed elements. Throws NoJsonArrayFound when no parseable array
/// exists anywhere in the text.
GenerationBatch parse_generated_tests(const std::string& raw,
                                      const MetamorphicRelationSpec& mr,
                                      BiasDimension dimension);

struct Shortfall {
    std::string mr_id;
    BiasDimension dimension = BiasDimension::Gender;
    std::size_t requested = 0;
    std::size_t produced = 0;
};

struct GenerationOptions {
    std::size_t retry_budget = 3;  // fruitless generator calls allowed per entry
    std::uint64_t seed = 0;
    std::string created_at;  // provenance timestamp, ISO-8601
};

struct GenerationResult {
    std::vector<MetamorphicTest> tests;     // canonical order, unique test_ids
    std::vector<Shortfall> shortfalls;      // entries that could not be filled
    std::size_t generator_calls = 0;
    std::size_t rejected_elements = 0;
};

/// Runs the generation loop for a whole plan. Per entry, attributes come from
/// the plan (named) or are sampled from the catalogue under the entry seed;
/// the generator is re-asked until the requested count of valid tests is
/// accumulated or the per-entry retry budget is exhausted (a call yielding no
/// new valid test consumes one retry). Partial results are returned with the
/// shortfalls listed.
GenerationResult generate_tests(const CampaignPlan& plan,
                                const AttributeCatalogue& catalogue,
                                provider::Provider& generator,
                                const GenerationOptions& options);

}  // namespace metafair::muse
