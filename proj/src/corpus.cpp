#include "t4f/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "t4f/error.hpp"
#include "t4f/text.hpp"

namespace t4f::corpus {

namespace {

constexpr char kMagic[4] = {'T', '4', 'F', '1'};
constexpr std::uint32_t kFormatVersion = 1;
enum SectionKind : std::uint32_t { kTweets = 1, kLocations = 2, kManifest = 3 };

std::int64_t civil_seconds(int y, unsigned mo, unsigned d, int h, int mi, int s) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok()) return INT64_MIN;
    const auto days_since = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days_since) * 86400 + h * 3600 + mi * 60 + s;
}

std::string pointer_from_dotted(std::string_view dotted) {
    if (!dotted.empty() && dotted.front() == '/') return std::string(dotted);
    std::string out = "/";
    for (char c : dotted) {
        if (c == '.')
            out.push_back('/');
        else if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out.push_back(c);
    }
    return out;
}

const Json* lookup(const Json& post, const std::string& pointer) {
    try {
        const Json::json_pointer ptr(pointer);
        if (!post.contains(ptr)) return nullptr;
        const Json& v = post.at(ptr);
        return v.is_null() ? nullptr : &v;
    } catch (const Json::exception&) {
        return nullptr;
    }
}

// Missing/null/empty -> nullopt (ok). Non-string -> error.
bool optional_string(const Json& post, const std::string& pointer, std::optional<std::string>& out) {
    const Json* v = lookup(post, pointer);
    if (!v) return true;
    if (!v->is_string()) return false;
    auto s = v->get<std::string>();
    if (!s.empty()) out = std::move(s);
    return true;
}

bool parse_geo(const Json& value, std::optional<Geo>& out) {
    const Json* v = &value;
    if (v->is_object() && v->contains("coordinates")) v = &(*v)["coordinates"];
    double lat, lon;
    if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
        lon = (*v)[0].get<double>();
        lat = (*v)[1].get<double>();
    } else if (v->is_object() && v->contains("lat") && v->contains("lon") && (*v)["lat"].is_number() &&
               (*v)["lon"].is_number()) {
        lat = (*v)["lat"].get<double>();
        lon = (*v)["lon"].get<double>();
    } else {
        return false;
    }
    if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90 || lat > 90 || lon < -180 || lon > 180) return false;
    out = Geo{lat, lon};
    return true;
}

bool tweet_less(const Tweet& a, const Tweet& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.id < b.id;
}

}  // namespace

HashtagSet default_filter() {
    return {"#dinner", "#breakfast", "#lunch", "#brunch", "#snack", "#meal", "#supper"};
}

HashtagSet normalize_filter(const std::vector<std::string>& tags) {
    HashtagSet out;
    for (const auto& raw : tags) {
        std::string t = text::fold_case(raw);
        while (!t.empty() && t.front() == ' ') t.erase(t.begin());
        while (!t.empty() && t.back() == ' ') t.pop_back();
        if (t.empty()) continue;
        if (t.front() != '#') t.insert(t.begin(), '#');
        if (t.size() > 1) out.insert(t);
    }
    if (out.empty()) throw Error("hashtag filter is empty");
    return out;
}

SchemaMapping SchemaMapping::from_json(const Json& j) {
    if (!j.is_object()) throw Error("schema mapping must be a JSON object");
    SchemaMapping m;
    auto set = [&](const char* key, std::string& field) {
        if (j.contains(key)) {
            if (!j[key].is_string()) throw Error(std::string("schema mapping: '") + key + "' must be a string");
            field = pointer_from_dotted(j[key].get<std::string>());
        }
    };
    set("id", m.id);
    set("text", m.text);
    set("created_at", m.created_at);
    set("user_location", m.user_location);
    set("user_timezone", m.user_timezone);
    set("coordinates", m.coordinates);
    for (const auto& [k, _] : j.items())
        if (k != "id" && k != "text" && k != "created_at" && k != "user_location" && k != "user_timezone" &&
            k != "coordinates")
            throw Error("schema mapping: unknown field '" + k + "'");
    return m;
}

std::optional<std::int64_t> parse_timestamp(const Json& value) {
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_number_unsigned()) {
        const auto u = value.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
        return static_cast<std::int64_t>(u);
    }
    if (!value.is_string()) return std::nullopt;
    const auto s = value.get<std::string>();
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) && s.size() < 19)
        return std::stoll(s);
    int y, mo, d, h, mi, sec;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &tail) == 7 && tail == 'Z') {
        if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
        const auto t = civil_seconds(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec);
        if (t == INT64_MIN) return std::nullopt;
        return t;
    }
    char wday[4] = {}, mon[4] = {};
    char sign = 0;
    int tzh = 0;
    if (std::sscanf(s.c_str(), "%3s %3s %2d %2d:%2d:%2d %c%4d %4d", wday, mon, &d, &h, &mi, &sec, &sign, &tzh, &y) ==
        9) {
        static constexpr const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
        unsigned m = 0;
        for (unsigned k = 0; k < 12; ++k)
            if (std::string_view(mon) == months[k]) m = k + 1;
        if (m == 0 || (sign != '+' && sign != '-') || h > 23 || mi > 59 || sec > 60) return std::nullopt;
        auto t = civil_seconds(y, m, static_cast<unsigned>(d), h, mi, sec);
        if (t == INT64_MIN) return std::nullopt;
        const int offset = (tzh / 100) * 3600 + (tzh % 100) * 60;
        t -= sign == '+' ? offset : -offset;
        return t;
    }
    return std::nullopt;
}

std::optional<Tweet> parse_post(const Json& post, const SchemaMapping& schema) {
    if (!post.is_object()) return std::nullopt;
    Tweet t;
    const Json* id = lookup(post, schema.id);
    if (!id) return std::nullopt;
    if (id->is_string())
        t.id = id->get<std::string>();
    else if (id->is_number_integer() || id->is_number_unsigned())
        t.id = id->dump();
    else
        return std::nullopt;
    if (t.id.empty()) return std::nullopt;

    const Json* text = lookup(post, schema.text);
    if (!text || !text->is_string()) return std::nullopt;
    t.text = text->get<std::string>();
    if (t.text.size() > kMaxTextBytes) return std::nullopt;

    const Json* created = lookup(post, schema.created_at);
    if (!created) return std::nullopt;
    const auto ts = parse_timestamp(*created);
    if (!ts) return std::nullopt;
    t.created_at = *ts;

    if (!optional_string(post, schema.user_location, t.user_location_raw)) return std::nullopt;
    if (!optional_string(post, schema.user_timezone, t.user_timezone)) return std::nullopt;
    if (const Json* geo = lookup(post, schema.coordinates))
        if (!parse_geo(*geo, t.geo)) return std::nullopt;
    return t;
}

Json to_raw_post(const Tweet& tweet) {
    Json j = {{"id", tweet.id}, {"text", tweet.text}, {"created_at", tweet.created_at}};
    Json user = Json::object();
    if (tweet.user_location_raw) user["location"] = *tweet.user_location_raw;
    if (tweet.user_timezone) user["time_zone"] = *tweet.user_timezone;
    if (!user.empty()) j["user"] = user;
    if (tweet.geo) j["coordinates"] = {{"type", "Point"}, {"coordinates", {tweet.geo->lon, tweet.geo->lat}}};
    return j;
}

FilterResult filter_by_hashtags(std::span<const Json> posts, const HashtagSet& filter, const SchemaMapping& schema) {
    if (filter.empty()) throw Error("hashtag filter is empty");
    FilterResult result;
    for (const auto& post : posts) {
        auto tweet = parse_post(post, schema);
        if (!tweet) {
            ++result.rejects;
            continue;
        }
        std::set<std::string> matched;
        for (auto& tok : text::tokenize(tweet->text))
            if (text::is_hashtag(tok) && filter.count(tok)) matched.insert(std::move(tok));
        if (matched.empty()) {
            ++result.unmatched;
            continue;
        }
        tweet->matched_hashtags.assign(matched.begin(), matched.end());
        result.tweets.push_back(std::move(*tweet));
    }
    return result;
}

CorpusSnapshot CorpusSnapshot::seal(std::vector<Tweet> tweets, Json manifest) {
    std::unordered_set<std::string> ids;
    for (const auto& t : tweets) {
        if (t.id.empty()) throw Error("snapshot: empty tweet id");
        if (!ids.insert(t.id).second) throw Error("snapshot: duplicate tweet id " + t.id);
        if (t.geo && (t.geo->lat < -90 || t.geo->lat > 90 || t.geo->lon < -180 || t.geo->lon > 180))
            throw Error("snapshot: geotag out of range for " + t.id);
    }
    std::sort(tweets.begin(), tweets.end(), tweet_less);
    CorpusSnapshot s;
    s.locations_.assign(tweets.size(), std::nullopt);
    s.tweets_ = std::move(tweets);
    s.manifest_ = std::move(manifest);
    return s;
}

std::size_t CorpusSnapshot::normalized_count() const {
    return static_cast<std::size_t>(
        std::count_if(locations_.begin(), locations_.end(), [](const auto& l) { return l.has_value(); }));
}

CorpusSnapshot CorpusSnapshot::with_locations(std::vector<std::optional<geonorm::NormalizedLocation>> locations) const {
    if (locations.size() != tweets_.size()) throw Error("snapshot: location vector size mismatch");
    CorpusSnapshot s = *this;
    s.locations_ = std::move(locations);
    s.normalized_ = true;
    return s;
}

std::string CorpusSnapshot::serialize() const {
    io::BinaryWriter tw;
    tw.u64(tweets_.size());
    for (const auto& t : tweets_) {
        tw.str(t.id);
        tw.str(t.text);
        tw.i64(t.created_at);
        const std::uint8_t flags = (t.user_location_raw ? 1 : 0) | (t.user_timezone ? 2 : 0) | (t.geo ? 4 : 0);
        tw.u8(flags);
        if (t.user_location_raw) tw.str(*t.user_location_raw);
        if (t.user_timezone) tw.str(*t.user_timezone);
        if (t.geo) {
            tw.f64(t.geo->lat);
            tw.f64(t.geo->lon);
        }
        tw.u32(static_cast<std::uint32_t>(t.matched_hashtags.size()));
        for (const auto& h : t.matched_hashtags) tw.str(h);
    }
    io::BinaryWriter lw;
    lw.u8(normalized_ ? 1 : 0);
    lw.u64(normalized_count());
    for (std::size_t i = 0; i < tweets_.size(); ++i) {
        const auto& loc = locations_[i];
        if (!loc) continue;
        lw.str(tweets_[i].id);
        lw.str(loc->state);
        lw.u8(loc->city ? 1 : 0);
        if (loc->city) lw.str(*loc->city);
        lw.u8(static_cast<std::uint8_t>(loc->region));
    }
    const std::string manifest = io::canonical(manifest_);

    io::BinaryWriter out;
    out.raw(std::string_view(kMagic, 4));
    out.u32(kFormatVersion);
    out.u32(3);
    const std::size_t table_at = out.size();
    const std::size_t header_end = table_at + 3 * (4 + 8 + 8);
    const std::string_view bodies[] = {tw.bytes(), lw.bytes(), manifest};
    const SectionKind kinds[] = {kTweets, kLocations, kManifest};
    std::uint64_t offset = header_end;
    for (int i = 0; i < 3; ++i) {
        out.u32(kinds[i]);
        out.u64(offset);
        out.u64(bodies[i].size());
        offset += bodies[i].size();
    }
    for (const auto& b : bodies) out.raw(b);
    return out.bytes();
}

CorpusSnapshot CorpusSnapshot::deserialize(std::string_view bytes) {
    io::BinaryReader in(bytes);
    if (in.take(4) != std::string_view(kMagic, 4)) throw Error("snapshot: bad magic");
    if (const auto v = in.u32(); v != kFormatVersion) throw Error("snapshot: unsupported version " + std::to_string(v));
    const auto nsec = in.u32();
    std::optional<std::pair<std::uint64_t, std::uint64_t>> sections[4];
    for (std::uint32_t i = 0; i < nsec; ++i) {
        const auto kind = in.u32();
        const auto off = in.u64();
        const auto len = in.u64();
        if (off > bytes.size() || len > bytes.size() - off) throw Error("snapshot: section out of bounds");
        if (kind >= 1 && kind <= 3) sections[kind] = {off, len};
    }
    for (int k = 1; k <= 3; ++k)
        if (!sections[k]) throw Error("snapshot: missing section " + std::to_string(k));
    auto body = [&](int k) { return bytes.substr(sections[k]->first, sections[k]->second); };

    std::vector<Tweet> tweets;
    {
        io::BinaryReader r(body(kTweets));
        const auto n = r.u64();
        tweets.reserve(std::min<std::uint64_t>(n, 1u << 24));
        for (std::uint64_t i = 0; i < n; ++i) {
            Tweet t;
            t.id = r.str();
            t.text = r.str();
            t.created_at = r.i64();
            const auto flags = r.u8();
            if (flags & 1) t.user_location_raw = r.str();
            if (flags & 2) t.user_timezone = r.str();
            if (flags & 4) {
                const double lat = r.f64();
                const double lon = r.f64();
                t.geo = Geo{lat, lon};
            }
            const auto nh = r.u32();
            for (std::uint32_t h = 0; h < nh; ++h) t.matched_hashtags.push_back(r.str());
            tweets.push_back(std::move(t));
        }
    }
    Json manifest = Json::parse(body(kManifest), nullptr, false);
    if (manifest.is_discarded()) throw Error("snapshot: manifest is not valid JSON");
    for (std::size_t i = 1; i < tweets.size(); ++i)
        if (!tweet_less(tweets[i - 1], tweets[i])) throw Error("snapshot: records out of order");

    CorpusSnapshot s = seal(std::move(tweets), std::move(manifest));
    io::BinaryReader r(body(kLocations));
    const bool normalized = r.u8() != 0;
    const auto n = r.u64();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < s.tweets_.size(); ++i) index.emplace(s.tweets_[i].id, i);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto id = r.str();
        geonorm::NormalizedLocation loc;
        loc.state = r.str();
        if (r.u8()) loc.city = r.str();
        const auto region = r.u8();
        if (region > 3) throw Error("snapshot: bad region code");
        loc.region = static_cast<geonorm::Region>(region);
        auto it = index.find(id);
        if (it == index.end()) throw Error("snapshot: location for unknown tweet " + id);
        s.locations_[it->second] = std::move(loc);
    }
    s.normalized_ = normalized;
    return s;
}

void CorpusSnapshot::save(const std::filesystem::path& path) const { io::write_file(path, serialize()); }

CorpusSnapshot CorpusSnapshot::load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }

CorpusSnapshot ingest_jsonl(const std::filesystem::path& path, const HashtagSet& filter, const SchemaMapping& schema) {
    const std::string bytes = io::read_file(path);
    std::vector<Json> posts;
    std::size_t lines = 0;
    std::size_t bad_json = 0;
    std::size_t start = 0;
    while (start < bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string::npos) end = bytes.size();
        std::string_view line(bytes.data() + start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        ++lines;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            ++bad_json;
            continue;
        }
        posts.push_back(std::move(j));
    }
    auto filtered = filter_by_hashtags(posts, filter, schema);

    // Last occurrence of an id wins.
    std::unordered_map<std::string, std::size_t> last;
    for (std::size_t i = 0; i < filtered.tweets.size(); ++i) last[filtered.tweets[i].id] = i;
    std::vector<Tweet> unique;
    unique.reserve(last.size());
    for (std::size_t i = 0; i < filtered.tweets.size(); ++i)
        if (last[filtered.tweets[i].id] == i) unique.push_back(std::move(filtered.tweets[i]));
    const std::size_t duplicates = filtered.tweets.size() - unique.size();

    Json manifest = {
        {"format_version", kFormatVersion},
        {"source", {{"name", path.filename().string()}, {"bytes", bytes.size()}, {"sha256", io::sha256_hex(bytes)}}},
        {"filter", Json(std::vector<std::string>(filter.begin(), filter.end()))},
        {"lines", lines},
        {"accepted", unique.size()},
        {"rejected", bad_json + filtered.rejects + duplicates},
        {"duplicates", duplicates},
        {"unmatched", filtered.unmatched},
    };
    return CorpusSnapshot::seal(std::move(unique), std::move(manifest));
}

CorpusSnapshot normalize(const CorpusSnapshot& snapshot, const geonorm::Gazetteer& gaz) {
    std::vector<std::optional<geonorm::NormalizedLocation>> locs;
    locs.reserve(snapshot.size());
    for (const auto& t : snapshot.tweets()) {
        std::optional<std::string_view> tz;
        if (t.user_timezone) tz = *t.user_timezone;
        locs.push_back(t.user_location_raw ? geonorm::normalize_location(*t.user_location_raw, tz, gaz) : std::nullopt);
    }
    return snapshot.with_locations(std::move(locs));
}

Stats corpus_stats(const CorpusSnapshot& snapshot) {
    Stats s;
    s.tweet_count = snapshot.size();
    if (snapshot.empty()) return s;
    std::unordered_set<std::string> unique;
    std::size_t tokens = 0, tz = 0, geo = 0;
    for (const auto& t : snapshot.tweets()) {
        const auto toks = text::clean(text::tokenize(t.text));
        tokens += toks.size();
        for (const auto& tok : toks) unique.insert(tok);
        if (t.user_timezone) ++tz;
        if (t.geo) ++geo;
    }
    const auto n = static_cast<double>(s.tweet_count);
    s.mean_tokens_per_tweet = static_cast<double>(tokens) / n;
    s.unique_token_count = unique.size();
    s.timezone_fraction = static_cast<double>(tz) / n;
    s.geo_fraction = static_cast<double>(geo) / n;
    return s;
}

Json to_json(const Stats& stats) {
    return {{"tweet_count", stats.tweet_count},
            {"mean_tokens_per_tweet", stats.mean_tokens_per_tweet},
            {"unique_token_count", stats.unique_token_count},
            {"timezone_fraction", stats.timezone_fraction},
            {"geo_fraction", stats.geo_fraction}};
}

}  // namespace t4f::corpus
