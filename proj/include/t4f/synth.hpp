#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "t4f/io.hpp"
#include "t4f/resources.hpp"

namespace t4f::synth {

using io::Json;

/// Latitude/longitude rectangle, half-open on the upper edges.
struct GeoBox {
    double lat_min, lat_max, lon_min, lon_max;

    bool contains(double lat, double lon) const {
        return lat >= lat_min && lat < lat_max && lon >= lon_min && lon < lon_max;
    }
};

/// Knobs of the synthetic corpus. Every rate is a per-tweet probability.
struct SynthSpec {
    std::vector<std::string> states;  // empty: all 51
    std::size_t tweets_per_locale = 1000;
    /// Probability of a locale marker and, independently, of each label-class marker.
    double marker_rate = 0.3;
    std::size_t marker_vocab_per_class = 3;
    std::size_t noise_vocab = 400;
    std::size_t noise_tokens_min = 4;
    std::size_t noise_tokens_max = 9;
    double food_rate = 0.8;       // one shared food word
    double south_rate = 0.1;      // "grits", South only
    double weekpart_rate = 0.15;  // brunch/family on weekends, work on weekdays, dinner on either
    double box_rate = 0.03;       // box words, geotagged inside the box
    double city_fraction = 0.5;   // share of a state's tweets sent from one of its major cities
    double timezone_rate = 0.7;
    double geo_rate = 0.1;
    double unlocated_rate = 0.05;
    double unmatched_rate = 0.02;
    double malformed_rate = 0.005;
    std::vector<std::string> label_sets = {"diabetes"};
    std::int64_t start_time = 1380585600;  // 2013-10-01T00:00:00Z
    std::int64_t span_seconds = 365 * 86400;

    static SynthSpec default_spec() { return {}; }
    /// Defaults overridden by whichever keys `j` carries.
    static SynthSpec from_json(const Json& j);
    Json to_json() const;
    /// Throws t4f::Error("rate ... outside [0,1]") and on inconsistent sizes.
    void validate() const;
};

inline constexpr GeoBox kPlantBox{29.0, 31.0, -92.0, -89.0};

/// Raw JSONL lines plus the manifest describing every planted ground truth.
struct SynthCorpus {
    std::vector<std::string> lines;
    Json manifest;
};

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed, const Resources& res);

/// Writes `out` and `out`.manifest.json (or `manifest_out` when given); returns the manifest.
Json write_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed, const Resources& res,
                            const std::filesystem::path& out, std::filesystem::path manifest_out = {});

}  // namespace t4f::synth
