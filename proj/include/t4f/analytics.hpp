#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "t4f/geonorm.hpp"
#include "t4f/io.hpp"
#include "t4f/pipeline.hpp"
#include "t4f/resources.hpp"
#include "t4f/text.hpp"

namespace t4f::analytics {

using io::Json;

// ---------------------------------------------------------------------------
// Top terms by state

/// tf-idf of one term in one state's pool: tf * ln(51 / df).
struct TermScore {
    std::string term;
    std::string state;
    std::size_t tf = 0;
    std::size_t df = 0;
    double score = 0;
};

struct TermRanking {
    text::VocabMode mode = text::VocabMode::Food;
    /// Highest-scoring term per state with a nonempty pool.
    std::map<std::string, TermScore> top;
    /// States whose pool was empty in this mode.
    std::vector<std::string> omitted;

    /// {state: {term, score, tf, df}}
    Json to_json() const;
};

inline constexpr double kNumStates = 51.0;

/// Pools every located tweet's filtered tokens (restricted to `mode`) into one
/// document per state and ranks terms by tf-idf. Ties go to the lexicographically
/// first term. States of the gazetteer without any such token are listed in
/// `omitted` and logged to stderr.
TermRanking rank_terms_tfidf(const text::PreparedCorpus& prep, text::VocabMode mode, const Resources& res);

/// Same ranking from explicit pools (state -> tokens).
TermRanking rank_terms_tfidf(const std::map<std::string, std::vector<std::string>>& pools, text::VocabMode mode);

// ---------------------------------------------------------------------------
// Temporal histograms

enum class Granularity { Hour, Weekday, Month };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view s);
std::size_t bin_count(Granularity g);

struct HistogramBins {
    Granularity granularity = Granularity::Hour;
    /// hour 0-23, weekday 0 (Monday) - 6, or month index 0 (January) - 11.
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    std::string query;

    Json to_json() const;
};

/// Token-sequence query: the phrase goes through tokenize + clean and matches a
/// tweet when its cleaned tokens contain that sequence contiguously.
class Phrase {
public:
    explicit Phrase(std::string_view raw);

    const std::string& raw() const { return raw_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    bool empty() const { return tokens_.empty(); }
    bool matches(std::span<const std::string> cleaned) const;

private:
    std::string raw_;
    std::vector<std::string> tokens_;
};

/// Counts matching tweets with a known timezone, binned by local time. Throws
/// t4f::Error when the phrase has no tokens after cleanup.
HistogramBins temporal_histogram(const text::PreparedCorpus& prep, std::string_view phrase, Granularity granularity,
                                 const geonorm::Gazetteer& gaz);

// ---------------------------------------------------------------------------
// Geo heatmaps

/// Phrase or topic id; exactly one must be set.
struct HeatQuery {
    std::optional<std::string> phrase;
    std::optional<std::uint32_t> topic;

    Json to_json() const;
};

struct GeoGrid {
    double cell = 1.0;
    /// (lat index, lon index) -> count, counts >= 1.
    std::map<std::pair<int, int>, std::size_t> cells;
    std::size_t total = 0;
    HeatQuery query;

    /// {cell, rows: [[lat_idx, lon_idx, count], ...], total, query}
    Json to_json() const;
};

/// 0.1, 0.25, 0.5 and 1.0 degrees.
bool is_allowed_cell(double cell);

/// Cell index of a coordinate: floor(v / cell), clamped to the world bounds.
std::pair<int, int> cell_index(double lat, double lon, double cell);

/// Bins geotagged tweets matching the query. `topic_of` (top topic per tweet)
/// and `num_topics` are needed for topic queries; an unknown topic id, a
/// disallowed cell size or an ill-formed query throws t4f::Error.
GeoGrid heatmap_bins(const text::PreparedCorpus& prep, const HeatQuery& query, double cell,
                     const std::vector<std::uint32_t>* topic_of = nullptr, std::uint32_t num_topics = 0);

// ---------------------------------------------------------------------------
// Parallel word clouds

enum class CloudColor { Shared, GroupA, GroupB };
std::string_view to_string(CloudColor c);

struct PlacedWord {
    std::string word;
    std::size_t count = 0;
    double font_scale = 0;
    /// Box center and extent.
    double x = 0, y = 0;
    double width = 0, height = 0;
    CloudColor color = CloudColor::Shared;

    bool overlaps(const PlacedWord& other) const;
};

struct CloudLayout {
    std::vector<PlacedWord> words;

    const PlacedWord* find(std::string_view word) const;
};

struct CloudPair {
    CloudLayout a;
    CloudLayout b;

    /// {a: [...], b: [...]}
    Json to_json() const;
};

/// Lays out the `max_words` most frequent words of each group. Words in both
/// top lists are placed first, at identical coordinates in both clouds; the
/// rest settle near the already-placed word they co-occur with most. Throws on
/// an empty group or max_words < 1.
CloudPair parallel_wordclouds(std::span<const std::vector<std::string>> group_a,
                              std::span<const std::vector<std::string>> group_b, std::size_t max_words,
                              std::uint64_t seed = 0);

/// Filtered tokens of timezone-known tweets, split by local day: Monday-Friday
/// into `first`, Saturday and Sunday into `second`.
std::pair<std::vector<std::vector<std::string>>, std::vector<std::vector<std::string>>> split_weekday_weekend(
    const text::PreparedCorpus& prep, const geonorm::Gazetteer& gaz);

}  // namespace t4f::analytics
