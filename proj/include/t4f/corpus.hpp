#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "t4f/geonorm.hpp"
#include "t4f/io.hpp"

namespace t4f::corpus {

using io::Json;

struct Geo {
    double lat = 0;
    double lon = 0;

    bool operator==(const Geo&) const = default;
};

struct Tweet {
    std::string id;
    std::string text;  // at most kMaxTextBytes
    std::int64_t created_at = 0;  // UTC seconds
    std::optional<std::string> user_location_raw;
    std::optional<std::string> user_timezone;
    std::optional<Geo> geo;
    std::vector<std::string> matched_hashtags;  // sorted, lowercase, '#'-prefixed

    bool operator==(const Tweet&) const = default;
};

inline constexpr std::size_t kMaxTextBytes = 560;

using HashtagSet = std::set<std::string>;

/// #dinner #breakfast #lunch #brunch #snack #meal #supper
HashtagSet default_filter();
/// Case-folds entries and adds a missing '#'. Throws on an empty set.
HashtagSet normalize_filter(const std::vector<std::string>& tags);

/// JSON pointers locating each field in a raw post. Defaults follow the
/// input format: id, text, created_at, user.location, user.time_zone, coordinates.
struct SchemaMapping {
    std::string id = "/id";
    std::string text = "/text";
    std::string created_at = "/created_at";
    std::string user_location = "/user/location";
    std::string user_timezone = "/user/time_zone";
    std::string coordinates = "/coordinates";

    /// Reads {"id": "id_str", "user_location": "user.location", ...}; dotted paths.
    static SchemaMapping from_json(const Json& j);
};

/// Accepts integer seconds, "YYYY-MM-DDTHH:MM:SSZ", or "Wed Oct 02 18:00:00 +0000 2013".
std::optional<std::int64_t> parse_timestamp(const Json& value);

/// Decodes one raw post; nullopt when a required field is missing or invalid.
std::optional<Tweet> parse_post(const Json& post, const SchemaMapping& schema = {});

/// Raw-post view of a tweet in the default schema (inverse of parse_post).
Json to_raw_post(const Tweet& tweet);

struct FilterResult {
    std::vector<Tweet> tweets;
    std::size_t rejects = 0;    // malformed posts
    std::size_t unmatched = 0;  // well-formed posts without a filter hashtag
};

/// Emits each well-formed post whose hashtag tokens intersect `filter`, once,
/// with matched_hashtags filled in. Malformed posts are counted, never fatal.
FilterResult filter_by_hashtags(std::span<const Json> posts, const HashtagSet& filter,
                                const SchemaMapping& schema = {});

/// Sealed, immutable corpus. Tweets are ordered by (created_at, id).
class CorpusSnapshot {
public:
    /// Sorts, validates and seals. Throws t4f::Error on duplicate or empty ids or out-of-range geotags.
    static CorpusSnapshot seal(std::vector<Tweet> tweets, Json manifest);

    const std::vector<Tweet>& tweets() const { return tweets_; }
    std::size_t size() const { return tweets_.size(); }
    bool empty() const { return tweets_.empty(); }

    /// Normalized location of tweet `index` (aligned with tweets()).
    const std::optional<geonorm::NormalizedLocation>& location(std::size_t index) const { return locations_.at(index); }
    std::size_t normalized_count() const;
    bool is_normalized() const { return normalized_; }

    const Json& manifest() const { return manifest_; }

    /// Copy of this snapshot with the location map filled; `locations` is aligned with tweets().
    CorpusSnapshot with_locations(std::vector<std::optional<geonorm::NormalizedLocation>> locations) const;

    /// Binary image: magic "T4F1", section table, tweet records, location map, manifest JSON.
    std::string serialize() const;
    static CorpusSnapshot deserialize(std::string_view bytes);
    void save(const std::filesystem::path& path) const;
    static CorpusSnapshot load(const std::filesystem::path& path);

private:
    CorpusSnapshot() = default;

    std::vector<Tweet> tweets_;
    std::vector<std::optional<geonorm::NormalizedLocation>> locations_;
    bool normalized_ = false;
    Json manifest_;
};

using SnapshotPtr = std::shared_ptr<const CorpusSnapshot>;

/// Reads JSONL, filters, drops duplicate ids (last occurrence wins, earlier
/// ones counted as rejects) and seals. Throws if the file cannot be read.
CorpusSnapshot ingest_jsonl(const std::filesystem::path& path, const HashtagSet& filter,
                            const SchemaMapping& schema = {});

/// Runs geonorm::normalize_location over every tweet.
CorpusSnapshot normalize(const CorpusSnapshot& snapshot, const geonorm::Gazetteer& gaz);

struct Stats {
    std::size_t tweet_count = 0;
    double mean_tokens_per_tweet = 0;
    std::size_t unique_token_count = 0;
    double timezone_fraction = 0;
    double geo_fraction = 0;
};

/// Token counts use text::tokenize followed by text::clean.
Stats corpus_stats(const CorpusSnapshot& snapshot);
Json to_json(const Stats& stats);

}  // namespace t4f::corpus
