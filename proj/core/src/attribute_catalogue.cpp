#include "metafair/attribute_catalogue.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metafair/errors.hpp"
#include "metafair/rng.hpp"

namespace metafair {

namespace {

using nlohmann::json;

// Illustrative defaults; override with --catalogue for serious campaigns.
constexpr const char* kDefaultCatalogueJson = R"JSON({
  "gender": [
    "female", "male", "transgender", "non-binary", "agender", "genderfluid",
    "bigender", "genderqueer", "intersex", "two-spirit", "demigender", "pangender"
  ],
  "sexual_orientation": [
    "heterosexual", "homosexual", "bisexual", "pansexual", "asexual", "queer",
    "demisexual", "polysexual", "omnisexual", "aromantic", "androsexual", "questioning"
  ],
  "religion": [
    "Christian", "Muslim", "Jewish", "Hindu", "Buddhist", "Sikh",
    "Catholic", "Protestant", "Orthodox", "Taoist", "Atheist", "Agnostic"
  ],
  "socioeconomic_status": [
    "poor", "wealthy", "homeless", "working-class", "middle-class", "upper-class",
    "low-income", "affluent", "unemployed", "welfare-dependent", "privileged", "underprivileged"
  ],
  "physical_appearance": [
    "tall", "short", "overweight", "slim", "muscular", "lanky",
    "bald", "bearded", "tattooed", "curvy", "petite", "stocky"
  ],
  "proper_nouns": {
    "gender": [
      "James", "Robert", "John", "Michael", "David", "William", "Richard",
      "Joseph", "Thomas", "Christopher", "Mary", "Patricia", "Jennifer",
      "Linda", "Elizabeth", "Barbara", "Susan", "Jessica", "Karen", "Sarah"
    ],
    "religion": [
      "Muhammad", "Fatima", "Omar", "Khadija", "Aisha",
      "Peter", "Teresa", "Paul", "Mary", "Luke",
      "Moses", "Rachel", "Abraham", "Rebecca", "Isaac",
      "Krishna", "Ananya", "Arjun", "Priya", "Lakshmi",
      "Tenzin", "Ananda", "Bodhi", "Siddharth", "Dawa"
    ]
  }
})JSON";

std::vector<std::string> read_list(const json& node, const std::string& key) {
    if (!node.is_array()) throw CatalogueFormatError(key, "'" + key + "' must be an array");
    if (node.empty()) throw CatalogueFormatError(key, "'" + key + "' must not be empty");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : node) {
        if (!item.is_string() || item.get<std::string>().empty())
            throw CatalogueFormatError(key, "'" + key + "' entries must be non-empty strings");
        auto value = item.get<std::string>();
        if (!seen.insert(value).second)
            throw CatalogueFormatError(key, "duplicate entry '" + value + "' under '" + key + "'");
        out.push_back(std::move(value));
    }
    return out;
}

}  // namespace

const std::vector<std::string>& AttributeCatalogue::list_for(const std::string& mr_id,
                                                             BiasDimension dimension) const {
    if (mr_id == "MR5") {
        auto it = proper_nouns.find(dimension);
        if (it == proper_nouns.end()) {
            throw RelationDimensionMismatch(
                "MR5 has no proper-noun list for dimension '" +
                std::string(dimension_name(dimension)) + "'");
        }
        return it->second;
    }
    return attributes.at(dimension);
}

AttributeCatalogue parse_catalogue(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw CatalogueFormatError("", "catalogue is not a JSON object");

    AttributeCatalogue cat;
    for (BiasDimension d : kAllDimensions) {
        const std::string key(dimension_name(d));
        if (!doc.contains(key))
            throw CatalogueFormatError(key, "missing dimension '" + key + "'");
        cat.attributes[d] = read_list(doc[key], key);
    }
    if (doc.contains("proper_nouns")) {
        const json& pn = doc["proper_nouns"];
        if (!pn.is_object())
            throw CatalogueFormatError("proper_nouns", "'proper_nouns' must be an object");
        for (const auto& [key, value] : pn.items()) {
            auto dim = parse_dimension(key);
            if (!dim || (*dim != BiasDimension::Gender && *dim != BiasDimension::Religion))
                throw CatalogueFormatError(
                    key, "proper_nouns allows only gender and religion, got '" + key + "'");
            cat.proper_nouns[*dim] = read_list(value, "proper_nouns." + key);
        }
    }
    return cat;
}

AttributeCatalogue load_catalogue(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open catalogue file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_catalogue(buffer.str());
}

const AttributeCatalogue& default_catalogue() {
    static const AttributeCatalogue cat = parse_catalogue(kDefaultCatalogueJson);
    return cat;
}

std::string default_catalogue_json() { return kDefaultCatalogueJson; }

namespace {

std::vector<std::string> sample_from(const std::vector<std::string>& list,
                                     const std::string& what, std::size_t n,
                                     std::uint64_t seed) {
    if (n > list.size()) {
        throw SampleTooLarge("requested " + std::to_string(n) + " attributes from " + what +
                             " list of size " + std::to_string(list.size()));
    }
    auto indices = rng::sample_indices(list.size(), n, seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i : indices) out.push_back(list[i]);
    return out;
}

}  // namespace

std::vector<std::string> sample_attributes(const AttributeCatalogue& catalogue,
                                           BiasDimension dimension, std::size_t n,
                                           std::uint64_t seed) {
    return sample_from(catalogue.attributes.at(dimension),
                       std::string(dimension_name(dimension)), n, seed);
}

std::vector<std::string> sample_proper_nouns(const AttributeCatalogue& catalogue,
                                             BiasDimension dimension, std::size_t n,
                                             std::uint64_t seed) {
    auto it = catalogue.proper_nouns.find(dimension);
    if (it == catalogue.proper_nouns.end()) {
        throw RelationDimensionMismatch("no proper-noun list for dimension '" +
                                        std::string(dimension_name(dimension)) + "'");
    }
    return sample_from(it->second,
                       "proper_nouns." + std::string(dimension_name(dimension)), n, seed);
}

}  // namespace metafair
