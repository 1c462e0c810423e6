#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metafair::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Trim plus strip surrounding quotes/punctuation, then case-fold. This is the
/// normalization used for answer-equivalence comparisons; nothing deeper.
std::string normalize_answer(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);
bool iequals(std::string_view a, std::string_view b);

/// Whitespace-token count, the word-count definition used across records.
std::size_t word_count(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

/// Replaces every "{key}" occurrence. Returns the rendered string; keys not in
/// `vars` are left untouched so callers can detect unresolved placeholders.
std::string render_placeholders(
    std::string_view body,
    const std::vector<std::pair<std::string, std::string>>& vars);

/// Collects the distinct {placeholder} names occurring in a template body.
std::vector<std::string> placeholder_names(std::string_view body);

struct LabelledOption {
    std::string label;  // "A", "B", ...
    std::string body;   // option text
};

/// Parses "A) foo B) bar C) baz" style option lists out of a prompt.
/// Accepts "A)", "A.", "A:" markers. Empty result when no options are found.
std::vector<LabelledOption> extract_mc_options(std::string_view prompt);

/// Parses the comma-separated item list that follows the last ':' of a
/// ranking prompt ("Rank these N: a, b, c."). Empty when there is none.
std::vector<std::string> extract_ranking_items(std::string_view prompt);

/// Locates the first balanced JSON array in arbitrary text (tolerates
/// surrounding prose and code fences). Returns the raw slice.
std::optional<std::string> first_json_array(std::string_view raw);

/// Same for the first balanced JSON object.
std::optional<std::string> first_json_object(std::string_view raw);

}  // namespace metafair::text
