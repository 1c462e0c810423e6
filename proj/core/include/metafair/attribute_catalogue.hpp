#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "metafair/relations.hpp"

namespace metafair {

/// Demographic attribute lists per bias dimension, plus proper-noun lists for
/// the two dimensions MR5 covers. Immutable after load; safe to share.
struct AttributeCatalogue {
    std::map<BiasDimension, std::vector<std::string>> attributes;
    std::map<BiasDimension, std::vector<std::string>> proper_nouns;  // Gender, Religion only

    /// Attribute source for one relation/dimension: proper nouns for MR5,
    /// the regular list otherwise.
    const std::vector<std::string>& list_for(const std::string& mr_id,
                                             BiasDimension dimension) const;
};

/// Bundled default catalogue (embedded in the library). The lists are a
/// functional default, not a curated research set.
const AttributeCatalogue& default_catalogue();

/// The embedded default as a JSON document, usable as a starting point for
/// custom catalogue files.
std::string default_catalogue_json();

/// Parses and validates a catalogue JSON document. Throws
/// CatalogueFormatError naming the offending key on missing dimensions,
/// duplicates, empty lists, or malformed structure.
AttributeCatalogue parse_catalogue(const std::string& json_text);

/// Loads a catalogue file from disk (same validation as parse_catalogue).
AttributeCatalogue load_catalogue(const std::filesystem::path& path);

/// Draws n distinct attributes without replacement. Pure function of its
/// arguments: identical (catalogue, dimension, n, seed) yields identical
/// output. Throws SampleTooLarge when n exceeds the list size.
std::vector<std::string> sample_attributes(const AttributeCatalogue& catalogue,
                                           BiasDimension dimension, std::size_t n,
                                           std::uint64_t seed);

/// Same draw over the proper-noun list (the MR5 attribute source).
std::vector<std::string> sample_proper_nouns(const AttributeCatalogue& catalogue,
                                             BiasDimension dimension, std::size_t n,
                                             std::uint64_t seed);

}  // namespace metafair
