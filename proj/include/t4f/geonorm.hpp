#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "t4f/io.hpp"

namespace t4f::geonorm {

enum class Region { Midwest, West, Northeast, South };

std::string_view to_string(Region r);
std::optional<Region> parse_region(std::string_view s);

struct NormalizedLocation {
    std::string state;  // USPS code
    std::optional<std::string> city;
    Region region = Region::South;

    bool operator==(const NormalizedLocation&) const = default;
};

/// Weekday is 0 = Monday ... 6 = Sunday.
struct LocalTime {
    int hour = 0;
    int weekday = 0;
    int month = 1;

    bool operator==(const LocalTime&) const = default;
};

struct City {
    std::string name;
    std::string state;
    std::vector<std::string> nicknames;
    std::string tz_hint;
};

/// One possible reading of a matched place phrase.
struct Reading {
    enum class Kind { State, City } kind;
    std::string state;
    std::string city;  // empty for state readings
    std::optional<int> tz_offset;
};

/// Place-name tables loaded from states.csv, cities.csv, regions.csv and
/// timezones.csv. Immutable after construction.
class Gazetteer {
public:
    static Gazetteer load(const std::filesystem::path& data_dir);
    static Gazetteer from_tables(const io::CsvTable& states, const io::CsvTable& cities, const io::CsvTable& regions,
                                 const io::CsvTable& timezones);

    std::optional<int> tz_offset(std::string_view tz_name) const;
    bool is_state(std::string_view code) const { return state_regions_.count(std::string(code)) > 0; }
    /// Throws t4f::Error("unknown state") for codes outside the 51-entry table.
    Region region_of(std::string_view code) const;
    const std::string& state_name(std::string_view code) const;
    /// The 51 codes in lexicographic order.
    const std::vector<std::string>& state_codes() const { return codes_; }
    /// Cities in file order (the file lists them by population rank).
    const std::vector<City>& cities() const { return cities_; }

    /// Readings for a normalized place key, or nullptr.
    const std::vector<Reading>* readings(const std::string& key) const;
    std::size_t max_key_words() const { return max_key_words_; }

    /// Every key plus the space-free form of multi-word keys, for the text location filter.
    std::vector<std::string> location_phrases() const;

private:
    void add_key(const std::string& key, Reading reading);

    std::map<std::string, Region> state_regions_;
    std::map<std::string, std::string> state_names_;
    std::vector<std::string> codes_;
    std::vector<City> cities_;
    std::unordered_map<std::string, int> tz_offsets_;
    std::unordered_map<std::string, std::vector<Reading>> keys_;
    std::size_t max_key_words_ = 0;
};

/// Lowercases, drops '.', apostrophes and '#', and splits on anything that is not a letter or digit.
std::vector<std::string> place_tokens(std::string_view raw);

std::optional<NormalizedLocation> normalize_location(std::string_view raw, std::optional<std::string_view> timezone,
                                                     const Gazetteer& gaz);

Region region_of(std::string_view state, const Gazetteer& gaz);

std::optional<LocalTime> local_time(std::int64_t created_at, std::string_view timezone, const Gazetteer& gaz);
/// Local time for a known offset in minutes.
LocalTime local_time_at_offset(std::int64_t created_at, int offset_minutes);

}  // namespace t4f::geonorm
