#include "t4f/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>
#include <set>
#include <unordered_set>

#include "t4f/error.hpp"
#include "t4f/geonorm.hpp"
#include "t4f/rng.hpp"
#include "t4f/tasks.hpp"

namespace t4f::synth {

namespace {

const std::vector<std::string> kMealTags = {"#dinner", "#breakfast", "#lunch", "#brunch", "#snack", "#meal", "#supper"};
const std::vector<std::string> kOtherTags = {"#yum", "#foodie", "#tbt", "#blessed", "#nom"};
const std::vector<std::string> kSharedFood = {"pizza", "tacos", "burger", "salad", "pasta",    "sushi",
                                              "soup",  "steak", "coffee", "chicken", "sandwich", "wine",
                                              "beer",  "cake",  "bacon", "rice",    "waffles"};
const std::vector<std::string> kBoxWords = {"gumbo", "jambalaya", "crawfish", "beignet"};
const std::vector<std::string> kUnlocated = {"", "earth", "the moon", "somewhere over the rainbow", "worldwide",
                                             "wherever the food is"};
constexpr const char* kSouthWord = "grits";

std::string letters(std::size_t index, std::size_t width) {
    std::string s(width, 'a');
    for (std::size_t i = width; i-- > 0; index /= 26) s[i] = static_cast<char>('a' + index % 26);
    return s;
}

std::string iso_time(std::int64_t t) {
    const std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void check_rate(const char* name, double r) {
    if (!(r >= 0 && r <= 1)) throw Error(std::string("rate ") + name + " = " + std::to_string(r) + " outside [0,1]");
}

/// Pronounceable filler words that collide with nothing in the shipped word lists.
std::vector<std::string> make_noise_words(std::size_t n, const Resources& res) {
    static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "gl", "pr", "st", "tr", "sk"};
    static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
    Rng rng(0x6e6f697365ULL);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    while (out.size() < n) {
        std::string w;
        const auto syllables = 2 + rng.below(2);
        for (std::uint64_t s = 0; s < syllables; ++s) {
            w += kOnsets[rng.below(std::size(kOnsets))];
            w += kVowels[rng.below(std::size(kVowels))];
        }
        if (rng.bernoulli(0.5)) w += kOnsets[rng.below(12)];
        if (seen.count(w) || res.stopwords.count(w) || res.food_lexicon.count(w) || res.locations.contains(w)) continue;
        seen.insert(w);
        out.push_back(w);
    }
    return out;
}

struct StateInfo {
    std::string code;
    std::string name;
    std::string tz;
    std::vector<const geonorm::City*> cities;  // among the 15 largest
};

}  // namespace

SynthSpec SynthSpec::from_json(const Json& j) {
    SynthSpec s;
    auto take = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    take("states", s.states);
    take("tweets_per_locale", s.tweets_per_locale);
    take("marker_rate", s.marker_rate);
    take("marker_vocab_per_class", s.marker_vocab_per_class);
    take("noise_vocab", s.noise_vocab);
    take("noise_tokens_min", s.noise_tokens_min);
    take("noise_tokens_max", s.noise_tokens_max);
    take("food_rate", s.food_rate);
    take("south_rate", s.south_rate);
    take("weekpart_rate", s.weekpart_rate);
    take("box_rate", s.box_rate);
    take("city_fraction", s.city_fraction);
    take("timezone_rate", s.timezone_rate);
    take("geo_rate", s.geo_rate);
    take("unlocated_rate", s.unlocated_rate);
    take("unmatched_rate", s.unmatched_rate);
    take("malformed_rate", s.malformed_rate);
    take("label_sets", s.label_sets);
    take("start_time", s.start_time);
    take("span_seconds", s.span_seconds);
    return s;
}

Json SynthSpec::to_json() const {
    return {{"states", states},
            {"tweets_per_locale", tweets_per_locale},
            {"marker_rate", marker_rate},
            {"marker_vocab_per_class", marker_vocab_per_class},
            {"noise_vocab", noise_vocab},
            {"noise_tokens_min", noise_tokens_min},
            {"noise_tokens_max", noise_tokens_max},
            {"food_rate", food_rate},
            {"south_rate", south_rate},
            {"weekpart_rate", weekpart_rate},
            {"box_rate", box_rate},
            {"city_fraction", city_fraction},
            {"timezone_rate", timezone_rate},
            {"geo_rate", geo_rate},
            {"unlocated_rate", unlocated_rate},
            {"unmatched_rate", unmatched_rate},
            {"malformed_rate", malformed_rate},
            {"label_sets", label_sets},
            {"start_time", start_time},
            {"span_seconds", span_seconds}};
}

void SynthSpec::validate() const {
    check_rate("marker_rate", marker_rate);
    check_rate("food_rate", food_rate);
    check_rate("south_rate", south_rate);
    check_rate("weekpart_rate", weekpart_rate);
    check_rate("box_rate", box_rate);
    check_rate("city_fraction", city_fraction);
    check_rate("timezone_rate", timezone_rate);
    check_rate("geo_rate", geo_rate);
    check_rate("unlocated_rate", unlocated_rate);
    check_rate("unmatched_rate", unmatched_rate);
    check_rate("malformed_rate", malformed_rate);
    if (tweets_per_locale == 0) throw Error("tweets_per_locale must be positive");
    if (noise_tokens_min > noise_tokens_max) throw Error("noise_tokens_min exceeds noise_tokens_max");
    if (noise_tokens_max > 0 && noise_vocab == 0) throw Error("noise tokens requested without a noise vocabulary");
    if (marker_rate > 0 && marker_vocab_per_class == 0) throw Error("markers requested without a marker vocabulary");
    if (span_seconds <= 0) throw Error("span_seconds must be positive");
}

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed, const Resources& res) {
    spec.validate();
    const auto& gaz = res.gazetteer;

    // State table with the timezone hint of each code (first row wins for aliases).
    std::map<std::string, StateInfo> info;
    {
        const auto table = io::read_csv(res.data_dir / "states.csv");
        const auto name_col = table.column("name"), code_col = table.column("abbrev"), tz_col = table.column("tz_hint");
        for (const auto& row : table.rows)
            info.try_emplace(row[code_col], StateInfo{row[code_col], row[name_col], row[tz_col], {}});
        const auto& cities = gaz.cities();
        for (std::size_t i = 0; i < std::min<std::size_t>(15, cities.size()); ++i)
            info.at(cities[i].state).cities.push_back(&cities[i]);
    }
    std::vector<std::string> states = spec.states.empty() ? gaz.state_codes() : spec.states;
    for (const auto& s : states)
        if (!gaz.is_state(s)) throw Error("synth: unknown state " + s);

    std::map<std::string, tasks::StateLabelSet> label_sets;
    for (const auto& name : spec.label_sets) label_sets.emplace(name, tasks::StateLabelSet::load_named(res.data_dir, name));

    // Marker vocabularies.
    const std::size_t mk = spec.marker_vocab_per_class;
    auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    std::map<std::string, std::vector<std::string>> state_markers, city_markers;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> class_markers;
    for (const auto& s : gaz.state_codes())
        for (std::size_t j = 0; j < mk; ++j) state_markers[s].push_back("loc" + lower(s) + letters(j, 1) + "mk");
    for (std::size_t i = 0; i < std::min<std::size_t>(15, gaz.cities().size()); ++i) {
        const auto& c = gaz.cities()[i];
        for (std::size_t j = 0; j < mk; ++j) city_markers[c.name + ", " + c.state].push_back("cty" + letters(i, 2) + letters(j, 1) + "mk");
    }
    for (const auto& [name, set] : label_sets)
        for (const auto& cls : set.classes)
            for (std::size_t j = 0; j < mk; ++j)
                class_markers[name][cls].push_back(name.substr(0, 3) + lower(cls) + letters(j, 1) + "mk");

    const auto noise = make_noise_words(spec.noise_vocab, res);
    std::vector<double> noise_cdf(noise.size());
    {
        double acc = 0;
        for (std::size_t k = 0; k < noise.size(); ++k) noise_cdf[k] = acc += 1.0 / static_cast<double>(k + 1);
        for (auto& c : noise_cdf) c /= acc;
    }
    std::vector<std::string> shared_food;
    for (const auto& f : kSharedFood)
        if (res.food_lexicon.count(f)) shared_food.push_back(f);

    Rng rng(seed);
    auto pick = [&](const std::vector<std::string>& v) -> const std::string& { return v[rng.below(v.size())]; };
    auto pick_noise = [&]() -> const std::string& {
        const double u = rng.uniform();
        auto it = std::lower_bound(noise_cdf.begin(), noise_cdf.end(), u);
        return noise[std::min<std::size_t>(it - noise_cdf.begin(), noise.size() - 1)];
    };

    // Location strings are checked against the normalizer so the manifest's expected counts are exact.
    std::size_t location_fallbacks = 0;
    auto state_location = [&](const StateInfo& st, const std::optional<std::string>& tz) {
        const std::vector<std::string> forms = {st.name, st.code, st.name + ", USA", st.code + ", USA"};
        const auto first = rng.below(forms.size());
        for (std::size_t k = 0; k < forms.size(); ++k) {
            const auto& raw = forms[(first + k) % forms.size()];
            auto r = geonorm::normalize_location(raw, tz ? std::optional<std::string_view>(*tz) : std::nullopt, gaz);
            if (r && r->state == st.code && !r->city) return raw;
            ++location_fallbacks;
        }
        throw Error("synth: no location string resolves to " + st.code);
    };
    auto city_location = [&](const geonorm::City& c, const StateInfo& st, const std::optional<std::string>& tz) {
        std::vector<std::string> forms = {c.name + ", " + st.code, c.name, c.name + ", " + st.name};
        for (const auto& nick : c.nicknames) {
            forms.push_back(nick);
            std::string tag = "#";
            for (char ch : nick)
                if (ch != ' ') tag += ch;
            forms.push_back(tag);
        }
        const auto first = rng.below(forms.size());
        for (std::size_t k = 0; k < forms.size(); ++k) {
            const auto& raw = forms[(first + k) % forms.size()];
            auto r = geonorm::normalize_location(raw, tz ? std::optional<std::string_view>(*tz) : std::nullopt, gaz);
            if (r && r->state == st.code && r->city == c.name) return raw;
            ++location_fallbacks;
        }
        throw Error("synth: no location string resolves to " + c.name);
    };

    SynthCorpus out;
    std::size_t matching = 0, unmatched = 0, malformed = 0, with_tz = 0, with_geo = 0, token_total = 0, unlocated = 0;
    std::set<std::string> unique_tokens;
    std::map<std::string, std::size_t> per_state, per_city;
    std::map<std::string, std::size_t> weekpart_counts;
    std::size_t serial = 0;
    auto next_id = [&] { return "s" + std::to_string(seed) + "-" + letters(serial++, 6); };

    for (const auto& code : states) {
        const auto& st = info.at(code);
        const bool south = gaz.region_of(code) == geonorm::Region::South;
        const int offset = gaz.tz_offset(st.tz).value_or(0);
        for (std::size_t n = 0; n < spec.tweets_per_locale; ++n) {
            std::vector<std::string> tokens;  // lowercase word tokens, exactly what cleanup keeps
            const geonorm::City* city = nullptr;
            if (!st.cities.empty() && rng.bernoulli(spec.city_fraction)) city = st.cities[rng.below(st.cities.size())];
            const std::string tz_name = city ? city->tz_hint : st.tz;
            const std::int64_t ts = spec.start_time + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.span_seconds)));
            const auto local = geonorm::local_time_at_offset(ts, gaz.tz_offset(tz_name).value_or(offset));
            const bool weekend = local.weekday >= 5;

            const auto noise_n = spec.noise_tokens_min + rng.below(spec.noise_tokens_max - spec.noise_tokens_min + 1);
            for (std::uint64_t k = 0; k < noise_n; ++k) tokens.push_back(pick_noise());
            if (!shared_food.empty() && rng.bernoulli(spec.food_rate)) tokens.push_back(pick(shared_food));
            if (rng.bernoulli(spec.marker_rate)) tokens.push_back(pick(state_markers.at(code)));
            if (city && rng.bernoulli(spec.marker_rate)) tokens.push_back(pick(city_markers.at(city->name + ", " + city->state)));
            for (const auto& [name, set] : label_sets)
                if (rng.bernoulli(spec.marker_rate)) tokens.push_back(pick(class_markers.at(name).at(set.labels.at(code))));
            if (south && rng.bernoulli(spec.south_rate)) tokens.push_back(kSouthWord);
            if (rng.bernoulli(spec.weekpart_rate)) {
                if (weekend) {
                    const bool brunch = rng.bernoulli(0.6);
                    if (brunch) tokens.push_back("brunch");
                    if (!brunch || rng.bernoulli(0.5)) tokens.push_back("family");
                } else {
                    tokens.push_back("work");
                }
            }
            if (rng.bernoulli(spec.weekpart_rate)) tokens.push_back("dinner");
            const bool boxed = rng.bernoulli(spec.box_rate);
            if (boxed) {
                tokens.push_back(pick(kBoxWords));
                tokens.push_back(pick(kBoxWords));
            }
            // Shuffle body words, then append the collection hashtags.
            for (std::size_t k = tokens.size(); k > 1; --k) std::swap(tokens[k - 1], tokens[rng.below(k)]);
            tokens.push_back(pick(kMealTags));
            if (rng.bernoulli(0.2)) tokens.push_back(pick(kMealTags));
            if (rng.bernoulli(0.2)) tokens.push_back(pick(kOtherTags));

            std::string text;
            for (std::size_t k = 0; k < tokens.size(); ++k) {
                std::string w = tokens[k];
                if (k == 0 && rng.bernoulli(0.3)) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
                if (w[0] == '#' && rng.bernoulli(0.3)) w[1] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[1])));
                text += (k ? " " : "") + w;
                if (rng.bernoulli(0.05)) text += "!";
            }
            if (rng.bernoulli(0.1)) text = "@friend" + std::to_string(rng.below(50)) + " " + text;
            if (rng.bernoulli(0.1)) text += " http://t.co/" + letters(rng.below(1u << 20), 6);

            Json post = {{"id", next_id()}, {"text", text}, {"created_at", iso_time(ts)}};
            Json user = Json::object();
            std::optional<std::string> tz;
            if (rng.bernoulli(spec.timezone_rate)) {
                tz = tz_name;
                user["time_zone"] = tz_name;
                ++with_tz;
            }
            if (rng.bernoulli(spec.unlocated_rate)) {
                const auto& raw = pick(kUnlocated);
                if (geonorm::normalize_location(raw, tz ? std::optional<std::string_view>(*tz) : std::nullopt, gaz))
                    throw Error("synth: unlocated string '" + raw + "' resolves");
                if (!raw.empty()) user["location"] = raw;
                ++unlocated;
            } else if (city) {
                user["location"] = city_location(*city, st, tz);
                ++per_state[code];
                ++per_city[city->name + ", " + city->state];
            } else {
                user["location"] = state_location(st, tz);
                ++per_state[code];
            }
            if (!user.empty()) post["user"] = user;
            if (boxed || rng.bernoulli(spec.geo_rate)) {
                double lat, lon;
                if (boxed) {
                    lat = kPlantBox.lat_min + rng.uniform() * (kPlantBox.lat_max - kPlantBox.lat_min);
                    lon = kPlantBox.lon_min + rng.uniform() * (kPlantBox.lon_max - kPlantBox.lon_min);
                } else {
                    lat = 25.0 + rng.uniform() * 24.0;
                    lon = -124.0 + rng.uniform() * 57.0;
                }
                post["coordinates"] = {{"type", "Point"}, {"coordinates", {lon, lat}}};
                ++with_geo;
            }
            for (auto& t : tokens) {
                for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                unique_tokens.insert(t);
                if (t == "brunch" || t == "family" || t == "work" || t == "dinner") ++weekpart_counts[t];
            }
            token_total += tokens.size();
            ++matching;
            out.lines.push_back(post.dump());

            if (rng.bernoulli(spec.unmatched_rate)) {
                Json other = {{"id", next_id()}, {"text", pick_noise() + " " + pick_noise() + " " + pick(kOtherTags)},
                              {"created_at", iso_time(ts)}};
                out.lines.push_back(other.dump());
                ++unmatched;
            }
            if (rng.bernoulli(spec.malformed_rate)) {
                out.lines.push_back(R"({"id": ")" + next_id() + R"(", "text": "broken #dinner)");
                ++malformed;
            }
        }
    }

    Json markers = {{"state", state_markers}, {"city", city_markers}, {"class", class_markers}};
    Json labels = Json::object();
    for (const auto& [name, set] : label_sets) labels[name] = set.labels;
    std::vector<std::string> south_states;
    for (const auto& s : states)
        if (gaz.region_of(s) == geonorm::Region::South) south_states.push_back(s);
    const double m = static_cast<double>(matching);
    out.manifest = {
        {"generator", "t4f-synth/1"},
        {"seed", seed},
        {"spec", spec.to_json()},
        {"counts",
         {{"lines", out.lines.size()},
          {"matching", matching},
          {"unmatched", unmatched},
          {"malformed", malformed},
          {"with_timezone", with_tz},
          {"with_geo", with_geo},
          {"unlocated", unlocated},
          {"location_fallbacks", location_fallbacks}}},
        {"expected_stats",
         {{"tweet_count", matching},
          {"token_total", token_total},
          {"mean_tokens_per_tweet", m > 0 ? static_cast<double>(token_total) / m : 0.0},
          {"unique_token_count", unique_tokens.size()},
          {"timezone_fraction", m > 0 ? static_cast<double>(with_tz) / m : 0.0},
          {"geo_fraction", m > 0 ? static_cast<double>(with_geo) / m : 0.0}}},
        {"locations", {{"states", per_state}, {"cities", per_city}}},
        {"labels", labels},
        {"markers", markers},
        {"plants",
         {{"south_word", kSouthWord},
          {"south_states", south_states},
          {"weekend_words", {"brunch", "family"}},
          {"weekday_words", {"work"}},
          {"any_day_words", {"dinner"}},
          {"weekpart_counts", weekpart_counts},
          {"box",
           {{"lat_min", kPlantBox.lat_min},
            {"lat_max", kPlantBox.lat_max},
            {"lon_min", kPlantBox.lon_min},
            {"lon_max", kPlantBox.lon_max},
            {"words", kBoxWords}}},
          {"shared_food", shared_food},
          {"noise_words", noise.size()}}},
        {"expected_accuracy",
         {{"signal", spec.marker_rate > 0},
          {"state_locale_min", spec.marker_rate >= 0.3 ? Json(0.9) : Json(nullptr)},
          {"state_characteristics_min", spec.marker_rate >= 0.3 ? Json(0.9) : Json(nullptr)},
          {"random_state_baseline", 1.0 / static_cast<double>(states.size())}}}};
    return out;
}

Json write_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed, const Resources& res,
                            const std::filesystem::path& out, std::filesystem::path manifest_out) {
    auto corpus = generate_synthetic_corpus(spec, seed, res);
    std::string body;
    for (const auto& l : corpus.lines) body += l + "\n";
    io::write_file(out, body);
    corpus.manifest["file"] = {{"path", out.filename().string()}, {"bytes", body.size()}, {"sha256", io::sha256_hex(body)}};
    if (manifest_out.empty()) manifest_out = out.string() + ".manifest.json";
    io::write_file(manifest_out, corpus.manifest.dump(2) + "\n");
    return corpus.manifest;
}

}  // namespace t4f::synth
