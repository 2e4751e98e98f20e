#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "t4f/error.hpp"
#include "t4f/rng.hpp"
#include "t4f/text.hpp"

using namespace t4f;
using namespace t4f::text;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize splits words and keeps hashtags") {
    CHECK(tokenize("Make your own pizza night !! Our fav #dinner .") ==
          Tokens{"make", "your", "own", "pizza", "night", "our", "fav", "#dinner"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n").empty());
    CHECK(tokenize("#Brunch @joe http://x.co") == Tokens{"#brunch", "@joe", "http://x.co"});
}

TEST_CASE("tokenize details") {
    CHECK(tokenize("Pancakes! #breakfast #yum") == Tokens{"pancakes", "#breakfast", "#yum"});
    CHECK(tokenize("don't stop") == Tokens{"don't", "stop"});
    CHECK(tokenize("see https://t.co/abc.") == Tokens{"see", "https://t.co/abc"});
    CHECK(tokenize("mac&cheese") == Tokens{"mac", "cheese"});
    CHECK(tokenize("#") == Tokens{});
    CHECK(tokenize("CAFÉ") == Tokens{"café"});
    CHECK(tokenize("@user_1: hi") == Tokens{"@user_1", "hi"});
}

TEST_CASE("fold_case applies NFC") {
    // "e" + combining acute composes to U+00E9.
    CHECK(fold_case("Cafe\xCC\x81") == "caf\xC3\xA9");
    CHECK(fold_case("ABC") == "abc");
}

TEST_CASE("tokenize is a fixed point on re-joined tokens") {
    Rng rng(17);
    const std::vector<std::string> parts = {"Pizza", "#Dinner", "@bob", "http://a.b/c", "!!", "tacos,", "it's",
                                            "NYC.", ":-)", "ümlaut", "#meal!", "x-y", "42", "(lunch)"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        const auto n = rng.below(12);
        for (std::uint64_t i = 0; i < n; ++i) {
            text += parts[rng.below(parts.size())];
            text += rng.bernoulli(0.8) ? " " : "";
        }
        const auto once = tokenize(text);
        std::string joined;
        for (const auto& t : once) joined += t + " ";
        CHECK(tokenize(joined) == once);
    }
}

TEST_CASE("token classes") {
    CHECK(is_url("http://a.b"));
    CHECK(is_url("https://a.b"));
    CHECK(is_url("www.example.com"));
    CHECK_FALSE(is_url("pizza"));
    CHECK(is_mention("@joe"));
    CHECK_FALSE(is_mention("@"));
    CHECK(is_hashtag("#tx"));
    CHECK_FALSE(has_alnum("!!!"));
    CHECK_FALSE(has_alnum(":-)"));
    CHECK(has_alnum("a!"));
}

TEST_CASE("filter_tokens removal rules") {
    const std::vector<std::string> places = {"tx", "texas", "san francisco", "sanfran"};
    LocationLexicon loc(places);
    const WordSet stop = {"the", "a"};
    const WordSet none;

    CHECK(filter_tokens(Tokens{"great", "#tx", "lunch"}, loc, stop, none) == Tokens{"great", "lunch"});
    CHECK(filter_tokens(Tokens{"!!!", ":-)"}, loc, stop, none).empty());
    CHECK(filter_tokens(Tokens{"@user", "http://a.b", "pizza"}, loc, stop, none) == Tokens{"pizza"});
    CHECK(filter_tokens(Tokens{"the", "pizza", "rare"}, loc, stop, WordSet{"rare"}) == Tokens{"pizza"});
    CHECK(filter_tokens(Tokens{"in", "san", "francisco", "#sanfran", "tacos"}, loc, stop, none) ==
          Tokens{"in", "tacos"});
    CHECK(filter_tokens(Tokens{"san", "tacos"}, loc, stop, none) == Tokens{"san", "tacos"});
}

TEST_CASE("filter output avoids every removal set") {
    const auto& res = testing::resources();
    Rng rng(3);
    std::vector<std::string> pool = {"pizza", "the", "#tx", "texas", "@x", "http://q.r", "!!", "grits", "and", "la"};
    for (const auto& w : res.stopwords) {
        pool.push_back(w);
        if (pool.size() > 60) break;
    }
    const WordSet singles = {"grits"};
    for (int trial = 0; trial < 100; ++trial) {
        Tokens toks;
        for (int i = 0; i < 15; ++i) toks.push_back(pool[rng.below(pool.size())]);
        for (const auto& t : filter_tokens(toks, res.locations, res.stopwords, singles)) {
            CHECK_FALSE(res.stopwords.count(t));
            CHECK_FALSE(singles.count(t));
            CHECK_FALSE(res.locations.contains(t));
            CHECK_FALSE(res.locations.contains(t.substr(t[0] == '#' ? 1 : 0)));
            CHECK(has_alnum(t));
        }
    }
}

TEST_CASE("vocabulary modes") {
    const WordSet food = {"pizza"};
    const std::vector<Tokens> docs = {{"pizza", "#dinner", "great"}};
    CHECK(build_vocabulary(docs, VocabMode::Hashtags, food).tokens() == Tokens{"#dinner"});
    CHECK(build_vocabulary(docs, VocabMode::Food, food).tokens() == Tokens{"pizza"});
    CHECK(build_vocabulary(docs, VocabMode::FoodPlusHashtags, food).tokens() == Tokens{"#dinner", "pizza"});
    auto all = build_vocabulary(docs, VocabMode::AllWords, food);
    CHECK(all.tokens() == Tokens{"#dinner", "great", "pizza"});
    for (std::uint32_t i = 0; i < all.size(); ++i) CHECK(all.id(all.token(i)) == i);
    CHECK_FALSE(all.id("sushi").has_value());
    CHECK(all.hash() == build_vocabulary(docs, VocabMode::AllWords, food).hash());
    CHECK(all.hash() != build_vocabulary(docs, VocabMode::Food, food).hash());

    const std::vector<Tokens> no_tags = {{"great"}};
    CHECK_THROWS_WITH_AS(build_vocabulary(no_tags, VocabMode::Hashtags, food), "empty vocabulary", Error);
}

TEST_CASE("vocab mode names round-trip") {
    for (auto m : {VocabMode::AllWords, VocabMode::Hashtags, VocabMode::Food, VocabMode::FoodPlusHashtags})
        CHECK(parse_vocab_mode(to_string(m)) == m);
    CHECK_FALSE(parse_vocab_mode("nope").has_value());
}

TEST_CASE("shipped word lists") {
    const auto& res = testing::resources();
    CHECK(res.food_lexicon.size() == 809);
    CHECK(res.stopwords.size() >= 150);
    for (const auto& w : res.food_lexicon) CHECK(w == fold_case(w));
}
