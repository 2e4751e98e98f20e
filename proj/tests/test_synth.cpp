#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "synthetic.hpp"
#include "t4f/error.hpp"
#include "t4f/geonorm.hpp"
#include "t4f/synth.hpp"

using namespace t4f;
using t4f::testing::resources;

TEST_CASE("spec validation") {
    auto spec = synth::SynthSpec::default_spec();
    CHECK_NOTHROW(spec.validate());

    spec.marker_rate = 1.5;
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("outside [0,1]"), Error);
    spec = synth::SynthSpec::default_spec();
    spec.geo_rate = -0.1;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = synth::SynthSpec::default_spec();
    spec.noise_tokens_min = 10;
    spec.noise_tokens_max = 3;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = synth::SynthSpec::default_spec();
    spec.tweets_per_locale = 0;
    CHECK_THROWS_AS(spec.validate(), Error);

    spec = synth::SynthSpec::default_spec();
    spec.states = {"XX"};
    CHECK_THROWS_AS(synth::generate_synthetic_corpus(spec, 1, resources()), Error);
}

TEST_CASE("spec JSON overrides only the given keys") {
    const auto spec = synth::SynthSpec::from_json({{"marker_rate", 0.0}, {"states", {"TX", "CA"}}});
    CHECK(spec.marker_rate == 0.0);
    CHECK(spec.states == std::vector<std::string>{"TX", "CA"});
    CHECK(spec.tweets_per_locale == synth::SynthSpec{}.tweets_per_locale);
    CHECK(synth::SynthSpec::from_json(spec.to_json()).to_json() == spec.to_json());
}

TEST_CASE("generation is deterministic in the seed") {
    auto spec = synth::SynthSpec::default_spec();
    spec.states = {"OH", "WA"};
    spec.tweets_per_locale = 40;
    const auto a = synth::generate_synthetic_corpus(spec, 11, resources());
    const auto b = synth::generate_synthetic_corpus(spec, 11, resources());
    const auto c = synth::generate_synthetic_corpus(spec, 12, resources());
    CHECK(a.lines == b.lines);
    CHECK(a.manifest == b.manifest);
    CHECK(a.lines != c.lines);
}

TEST_CASE("manifest statistics match the ingested corpus") {
    const auto& syn = t4f::testing::small_synthetic();
    const auto& m = syn.manifest;
    const auto stats = corpus::corpus_stats(syn.snapshot());
    const auto& expect = m.at("expected_stats");

    CHECK(stats.tweet_count == expect.at("tweet_count").get<std::size_t>());
    CHECK(stats.unique_token_count == expect.at("unique_token_count").get<std::size_t>());
    CHECK(stats.mean_tokens_per_tweet == doctest::Approx(expect.at("mean_tokens_per_tweet").get<double>()).epsilon(1e-12));
    CHECK(stats.timezone_fraction == doctest::Approx(expect.at("timezone_fraction").get<double>()).epsilon(1e-12));
    CHECK(stats.geo_fraction == doctest::Approx(expect.at("geo_fraction").get<double>()).epsilon(1e-12));

    const auto& counts = m.at("counts");
    const auto& ingest = syn.snapshot().manifest();
    CHECK(ingest.at("unmatched").get<std::size_t>() == counts.at("unmatched").get<std::size_t>());
    CHECK(ingest.at("rejected").get<std::size_t>() == counts.at("malformed").get<std::size_t>());
}

TEST_CASE("every planted location normalizes to its locale") {
    const auto& syn = t4f::testing::small_synthetic();
    std::map<std::string, std::size_t> states, cities;
    std::size_t located = 0;
    for (std::size_t i = 0; i < syn.snapshot().size(); ++i) {
        const auto& loc = syn.snapshot().location(i);
        if (!loc) continue;
        ++located;
        ++states[loc->state];
        if (loc->city) ++cities[*loc->city + ", " + loc->state];
    }
    const auto& want = syn.manifest.at("locations");
    CHECK(io::Json(states) == want.at("states"));
    CHECK(io::Json(cities) == want.at("cities"));
    CHECK(located + syn.manifest.at("counts").at("unlocated").get<std::size_t>() == syn.snapshot().size());
}

TEST_CASE("plants are where the manifest says") {
    const auto& syn = t4f::testing::small_synthetic();
    const auto& gaz = resources().gazetteer;
    const auto& box = syn.manifest.at("plants").at("box");
    const synth::GeoBox geo_box{box.at("lat_min"), box.at("lat_max"), box.at("lon_min"), box.at("lon_max")};
    const auto box_words = box.at("words").get<std::vector<std::string>>();

    std::size_t grits = 0, boxed = 0;
    for (std::size_t i = 0; i < syn.snapshot().size(); ++i) {
        const auto& tw = syn.snapshot().tweets()[i];
        const auto& toks = syn.prep.cleaned[i];
        auto has = [&](const std::string& w) { return std::find(toks.begin(), toks.end(), w) != toks.end(); };

        if (has("grits")) {
            ++grits;
            const auto& loc = syn.snapshot().location(i);
            if (loc) CHECK(gaz.region_of(loc->state) == geonorm::Region::South);
        }
        if (std::any_of(box_words.begin(), box_words.end(), has)) {
            ++boxed;
            REQUIRE(tw.geo);
            CHECK(geo_box.contains(tw.geo->lat, tw.geo->lon));
        }
        if (tw.user_timezone && (has("brunch") || has("family"))) {
            const auto lt = geonorm::local_time(tw.created_at, *tw.user_timezone, gaz);
            REQUIRE(lt);
            CHECK(lt->weekday >= 5);
        }
        if (tw.user_timezone && has("work")) {
            const auto lt = geonorm::local_time(tw.created_at, *tw.user_timezone, gaz);
            REQUIRE(lt);
            CHECK(lt->weekday < 5);
        }
    }
    CHECK(grits > 0);
    CHECK(boxed > 0);
}
