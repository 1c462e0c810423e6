#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metafair {

/// The five bias dimensions covered by the relation catalogue. No other value
/// is representable.
enum class BiasDimension {
    Gender,
    SexualOrientation,
    Religion,
    SocioeconomicStatus,
    PhysicalAppearance,
};

inline constexpr std::array<BiasDimension, 5> kAllDimensions = {
    BiasDimension::Gender,
    BiasDimension::SexualOrientation,
    BiasDimension::Religion,
    BiasDimension::SocioeconomicStatus,
    BiasDimension::PhysicalAppearance,
};

/// Canonical snake_case name ("sexual_orientation"), used in files and reports.
std::string_view dimension_name(BiasDimension d);

/// Human-readable name ("sexual orientation"), used inside prompts.
std::string_view dimension_label(BiasDimension d);

/// Accepts canonical names plus case/space/hyphen variants. nullopt when the
/// string does not name a dimension.
std::optional<BiasDimension> parse_dimension(std::string_view s);

enum class Transformation { Addition, Replacement };
enum class OutputRelation { OpenEnded, ClosedEnded, Completion, Prioritisation };
enum class FollowUpKind { Static, ResponseEmbedding };

enum class EvaluationKind {
    JudgePair,           // judge sees (P, P', R, R')
    JudgeFollowUp,       // judge sees (P', R') only
    NumericDiff,         // |R - R'| >= threshold
    Equivalence,         // normalized R != R'
    SpearmanRank,        // rho(R, R') < threshold
    SyntacticInclusion,  // opt-in baseline, never a catalogue default
};

struct EvaluationStrategy {
    EvaluationKind kind;
    std::optional<double> threshold;  // NumericDiff = 3, SpearmanRank = 0.3

    bool operator==(const EvaluationStrategy&) const = default;
};

std::string_view evaluation_kind_name(EvaluationKind k);

/// Static descriptor of one metamorphic relation.
struct MetamorphicRelationSpec {
    std::string id;    // "MR1".."MR14", stable report keys
    std::string name;
    Transformation transformation;
    OutputRelation output_relation;
    EvaluationStrategy evaluation;
    std::vector<BiasDimension> applicable_dimensions;
    FollowUpKind follow_up_kind;
    std::string generation_template_id;

    bool applies_to(BiasDimension d) const;
};

/// The immutable catalogue of all 14 relations, ordered MR1..MR14.
const std::vector<MetamorphicRelationSpec>& mr_catalogue();

/// Lookup by id; throws UnknownRelation for anything outside MR1..MR14.
const MetamorphicRelationSpec& mr_by_id(std::string_view id);

}  // namespace metafair
