#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "metafair/relations.hpp"

namespace metafair {

/// Static follow-up prompt, sent verbatim.
struct StaticFollowUp {
    std::string text;
    bool operator==(const StaticFollowUp&) const = default;
};

/// Response-embedding follow-up (MR8-MR10): resolved at execution time by
/// wrapping the neutral question around that repeat's source response.
struct ScaffoldFollowUp {
    std::string neutral_question;
    bool operator==(const ScaffoldFollowUp&) const = default;
};

using FollowUp = std::variant<StaticFollowUp, ScaffoldFollowUp>;

struct Provenance {
    std::string generator_model;
    std::string created_at;  // ISO-8601 UTC
    std::uint64_t seed = 0;
    bool operator==(const Provenance&) const = default;
};

/// One generated source/follow-up prompt pair.
struct MetamorphicTest {
    std::string test_id;
    std::string mr_id;
    BiasDimension dimension = BiasDimension::Gender;
    std::string source_prompt;
    FollowUp follow_up;
    std::optional<std::string> source_attribute;
    std::optional<std::string> follow_up_attribute;
    std::optional<std::string> explanation;
    Provenance provenance;

    bool is_scaffold() const { return std::holds_alternative<ScaffoldFollowUp>(follow_up); }
    const std::string& follow_up_text() const;  // static text or neutral question

    bool operator==(const MetamorphicTest&) const = default;
};

/// Checks the per-relation invariants (non-empty prompts, attribute
/// containment, attribute distinctness, option/item set equality for
/// MR13/MR14). Returns a machine-readable reason on failure, nullopt when the
/// test is valid.
std::optional<std::string> validate_test(const MetamorphicTest& test,
                                         const MetamorphicRelationSpec& mr);

}  // namespace metafair
