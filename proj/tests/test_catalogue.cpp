#include <doctest.h>

#include <algorithm>
#include <set>

#include "metafair/attribute_catalogue.hpp"
#include "metafair/errors.hpp"

using namespace metafair;

TEST_CASE("bundled default has five attribute lists and two proper-noun lists") {
    const auto& cat = default_catalogue();
    REQUIRE(cat.attributes.size() == 5);
    for (BiasDimension d : kAllDimensions) {
        REQUIRE(cat.attributes.count(d) == 1);
        CHECK(!cat.attributes.at(d).empty());
        // RQ2-scale campaigns draw 10 attributes per dimension.
        CHECK(cat.attributes.at(d).size() >= 10);
    }
    REQUIRE(cat.proper_nouns.size() == 2);
    CHECK(cat.proper_nouns.count(BiasDimension::Gender) == 1);
    CHECK(cat.proper_nouns.count(BiasDimension::Religion) == 1);
    CHECK(cat.proper_nouns.at(BiasDimension::Gender).size() >= 10);
    CHECK(cat.proper_nouns.at(BiasDimension::Religion).size() >= 10);
}

TEST_CASE("missing dimension raises CatalogueFormatError naming the key") {
    const char* doc = R"({
        "gender": ["female"], "sexual_orientation": ["bisexual"],
        "socioeconomic_status": ["poor"], "physical_appearance": ["tall"]
    })";
    try {
        parse_catalogue(doc);
        FAIL("expected CatalogueFormatError");
    } catch (const CatalogueFormatError& e) {
        CHECK(e.key() == "religion");
    }
}

TEST_CASE("duplicates and empty lists are rejected") {
    const char* dup = R"({
        "gender": ["female"], "sexual_orientation": ["bisexual", "bisexual"],
        "religion": ["Hindu"], "socioeconomic_status": ["poor"],
        "physical_appearance": ["tall"]
    })";
    CHECK_THROWS_AS(parse_catalogue(dup), CatalogueFormatError);

    const char* empty = R"({
        "gender": [], "sexual_orientation": ["bisexual"], "religion": ["Hindu"],
        "socioeconomic_status": ["poor"], "physical_appearance": ["tall"]
    })";
    CHECK_THROWS_AS(parse_catalogue(empty), CatalogueFormatError);

    CHECK_THROWS_AS(parse_catalogue("not json at all"), CatalogueFormatError);
}

TEST_CASE("proper nouns exist only for gender and religion") {
    const char* doc = R"({
        "gender": ["female"], "sexual_orientation": ["bisexual"], "religion": ["Hindu"],
        "socioeconomic_status": ["poor"], "physical_appearance": ["tall"],
        "proper_nouns": {"physical_appearance": ["Slim"]}
    })";
    CHECK_THROWS_AS(parse_catalogue(doc), CatalogueFormatError);
}

TEST_CASE("sampling basics: n = 0 and full-list permutation") {
    const auto& cat = default_catalogue();
    CHECK(sample_attributes(cat, BiasDimension::Gender, 0, 7).empty());

    const auto& full = cat.attributes.at(BiasDimension::Gender);
    auto sampled = sample_attributes(cat, BiasDimension::Gender, full.size(), 7);
    REQUIRE(sampled.size() == full.size());
    auto sorted_sample = sampled;
    auto sorted_full = full;
    std::sort(sorted_sample.begin(), sorted_sample.end());
    std::sort(sorted_full.begin(), sorted_full.end());
    CHECK(sorted_sample == sorted_full);
}

TEST_CASE("sampling is a pure function of its arguments") {
    const auto& cat = default_catalogue();
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xDEADBEEFULL}) {
        auto a = sample_attributes(cat, BiasDimension::Religion, 5, seed);
        auto b = sample_attributes(cat, BiasDimension::Religion, 5, seed);
        CHECK(a == b);
    }
    // Different seeds explore different draws (with 12P5 arrangements the
    // chance of a collision across these seeds is negligible).
    auto s1 = sample_attributes(cat, BiasDimension::Religion, 5, 1);
    auto s2 = sample_attributes(cat, BiasDimension::Religion, 5, 2);
    CHECK(s1 != s2);
}

TEST_CASE("samples are without replacement") {
    const auto& cat = default_catalogue();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto sample = sample_attributes(cat, BiasDimension::PhysicalAppearance, 8, seed);
        std::set<std::string> unique(sample.begin(), sample.end());
        CHECK(unique.size() == sample.size());
    }
}

TEST_CASE("oversampling raises SampleTooLarge") {
    const auto& cat = default_catalogue();
    const auto size = cat.attributes.at(BiasDimension::Gender).size();
    CHECK_THROWS_AS(sample_attributes(cat, BiasDimension::Gender, size + 1, 0),
                    SampleTooLarge);
}

TEST_CASE("MR5 draws from proper nouns via list_for") {
    const auto& cat = default_catalogue();
    const auto& nouns = cat.list_for("MR5", BiasDimension::Gender);
    CHECK(&nouns == &cat.proper_nouns.at(BiasDimension::Gender));
    const auto& attrs = cat.list_for("MR2", BiasDimension::Gender);
    CHECK(&attrs == &cat.attributes.at(BiasDimension::Gender));
    CHECK_THROWS_AS(cat.list_for("MR5", BiasDimension::PhysicalAppearance),
                    RelationDimensionMismatch);
}

TEST_CASE("default catalogue JSON round-trips through the parser") {
    auto cat = parse_catalogue(default_catalogue_json());
    CHECK(cat.attributes.size() == 5);
    CHECK(cat.proper_nouns.size() == 2);
}
