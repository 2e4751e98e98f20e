#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "t4f/corpus.hpp"
#include "t4f/error.hpp"
#include "t4f/rng.hpp"

using namespace t4f;
using namespace t4f::corpus;
using io::Json;

namespace {

Json post(const std::string& id, const std::string& text, std::int64_t ts = 1000) {
    return Json{{"id", id}, {"text", text}, {"created_at", ts}};
}

Tweet tweet(const std::string& id, const std::string& text, std::int64_t ts) {
    Tweet t;
    t.id = id;
    t.text = text;
    t.created_at = ts;
    return t;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p);
    for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST_CASE("filter_by_hashtags") {
    std::vector<Json> posts = {post("1", "Pancakes! #breakfast #yum"), post("2", "Pancakes #Breakfast #Lunch"),
                               post("3", "no tags here"), Json{{"text", "missing id"}}};
    auto r = filter_by_hashtags(posts, default_filter());
    REQUIRE(r.tweets.size() == 2);
    CHECK(r.tweets[0].matched_hashtags == std::vector<std::string>{"#breakfast"});
    CHECK(r.tweets[1].matched_hashtags == std::vector<std::string>{"#breakfast", "#lunch"});
    CHECK(r.rejects == 1);
    CHECK(r.unmatched == 1);

    SUBCASE("idempotent") {
        std::vector<Json> again;
        for (const auto& t : r.tweets) again.push_back(to_raw_post(t));
        auto r2 = filter_by_hashtags(again, default_filter());
        CHECK(r2.tweets == r.tweets);
        CHECK(r2.rejects == 0);
    }
}

TEST_CASE("default filter and normalization") {
    CHECK(default_filter() ==
          HashtagSet{"#dinner", "#breakfast", "#lunch", "#brunch", "#snack", "#meal", "#supper"});
    CHECK(normalize_filter({"Dinner", "#LUNCH"}) == HashtagSet{"#dinner", "#lunch"});
    CHECK_THROWS_AS(normalize_filter({}), Error);
}

TEST_CASE("parse_post fields") {
    Json p = {{"id", 42},
              {"text", "x #dinner"},
              {"created_at", "Wed Oct 02 18:00:00 +0000 2013"},
              {"user", {{"location", "Austin, TX"}, {"time_zone", "Central Time (US & Canada)"}}},
              {"coordinates", {{"type", "Point"}, {"coordinates", {-97.7, 30.3}}}}};
    auto t = parse_post(p);
    REQUIRE(t);
    CHECK(t->id == "42");
    CHECK(t->created_at == 1380736800);
    CHECK(t->user_location_raw == "Austin, TX");
    CHECK(t->user_timezone == "Central Time (US & Canada)");
    REQUIRE(t->geo);
    CHECK(t->geo->lat == doctest::Approx(30.3));
    CHECK(t->geo->lon == doctest::Approx(-97.7));

    CHECK(parse_timestamp(Json("2013-10-02T18:00:00Z")) == 1380736800);
    CHECK_FALSE(parse_post(Json{{"id", "1"}, {"text", "x"}}));
    CHECK_FALSE(parse_post(Json{{"id", "1"}, {"text", std::string(561, 'a')}, {"created_at", 1}}));
    Json bad_geo = post("1", "x");
    bad_geo["coordinates"] = Json{{"coordinates", {0.0, 95.0}}};
    CHECK_FALSE(parse_post(bad_geo));

    auto round = parse_post(to_raw_post(*t));
    REQUIRE(round);
    CHECK(*round == *t);
}

TEST_CASE("schema mapping renames fields") {
    auto schema = SchemaMapping::from_json(Json{{"id", "id_str"}, {"user_location", "author.place"}});
    Json p = {{"id_str", "9"}, {"text", "#lunch"}, {"created_at", 5}, {"author", {{"place", "Ohio"}}}};
    auto t = parse_post(p, schema);
    REQUIRE(t);
    CHECK(t->id == "9");
    CHECK(t->user_location_raw == "Ohio");
}

TEST_CASE("ingest_jsonl") {
    testing::TempDir dir("ingest");
    const auto file = dir / "in.jsonl";
    write_lines(file, {post("a", "eggs #breakfast", 20).dump(), post("b", "nothing", 10).dump(),
                       post("c", "soup #LUNCH", 10).dump()});
    auto snap = ingest_jsonl(file, default_filter());
    REQUIRE(snap.size() == 2);
    CHECK(snap.tweets()[0].id == "c");
    CHECK(snap.tweets()[1].id == "a");
    CHECK(snap.manifest()["rejected"] == 0);
    CHECK(snap.manifest()["accepted"] == 2);
    CHECK(snap.manifest()["lines"] == 3);

    SUBCASE("bad lines and duplicates") {
        const auto bad = dir / "bad.jsonl";
        write_lines(bad, {post("a", "eggs #breakfast", 20).dump(), "{not json", post("a", "later #dinner", 30).dump()});
        auto s = ingest_jsonl(bad, default_filter());
        REQUIRE(s.size() == 1);
        CHECK(s.tweets()[0].text == "later #dinner");
        CHECK(s.manifest()["rejected"] == 2);
        CHECK(s.manifest()["duplicates"] == 1);
    }
    SUBCASE("deterministic manifest") {
        CHECK(io::canonical(ingest_jsonl(file, default_filter()).manifest()) == io::canonical(snap.manifest()));
    }
    SUBCASE("unreadable file") { CHECK_THROWS_AS(ingest_jsonl(dir / "missing.jsonl", default_filter()), Error); }
}

TEST_CASE("snapshot ordering and round trip") {
    Rng rng(1);
    std::vector<Tweet> tweets;
    for (int i = 0; i < 300; ++i) {
        auto t = tweet("id" + std::to_string(rng.below(100000)) + "_" + std::to_string(i), "#meal food",
                       static_cast<std::int64_t>(rng.below(50)));
        if (i % 3 == 0) t.user_timezone = "Alaska";
        if (i % 7 == 0) t.geo = Geo{10.5, -20.25};
        if (i % 5 == 0) t.user_location_raw = "Austin, TX";
        t.matched_hashtags = {"#meal"};
        tweets.push_back(t);
    }
    auto snap = CorpusSnapshot::seal(tweets, Json{{"k", 1}});
    for (std::size_t i = 1; i < snap.size(); ++i) {
        const auto& a = snap.tweets()[i - 1];
        const auto& b = snap.tweets()[i];
        CHECK(std::tie(a.created_at, a.id) <= std::tie(b.created_at, b.id));
    }
    auto norm = normalize(snap, testing::resources().gazetteer);
    CHECK(norm.is_normalized());
    CHECK(norm.normalized_count() == 60);

    auto back = CorpusSnapshot::deserialize(norm.serialize());
    CHECK(back.tweets() == norm.tweets());
    CHECK(back.manifest() == norm.manifest());
    CHECK(back.is_normalized());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back.location(i) == norm.location(i));

    std::string corrupt = norm.serialize();
    corrupt[0] = 'X';
    CHECK_THROWS_AS(CorpusSnapshot::deserialize(corrupt), Error);
    CHECK_THROWS_AS(CorpusSnapshot::deserialize(norm.serialize().substr(0, 40)), Error);

    tweets.push_back(tweets.front());
    CHECK_THROWS_AS(CorpusSnapshot::seal(tweets, Json::object()), Error);
}

TEST_CASE("corpus_stats") {
    auto empty = corpus_stats(CorpusSnapshot::seal({}, Json::object()));
    CHECK(empty.tweet_count == 0);
    CHECK(empty.mean_tokens_per_tweet == 0);

    auto a = tweet("1", "one two three #four", 1);
    a.user_timezone = "Alaska";
    auto b = tweet("2", "one two three four five http://x.y @z six", 2);
    b.geo = Geo{1, 2};
    auto s = corpus_stats(CorpusSnapshot::seal({a, b}, Json::object()));
    CHECK(s.tweet_count == 2);
    CHECK(s.mean_tokens_per_tweet == doctest::Approx(5.0));
    CHECK(s.unique_token_count == 7);
    CHECK(s.timezone_fraction == doctest::Approx(0.5));
    CHECK(s.geo_fraction == doctest::Approx(0.5));
    auto j = to_json(s);
    CHECK(j.contains("mean_tokens_per_tweet"));
}
