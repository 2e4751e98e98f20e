#include "t4f/geonorm.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "t4f/error.hpp"
#include "t4f/text.hpp"

namespace t4f::geonorm {

std::string_view to_string(Region r) {
    switch (r) {
        case Region::Midwest: return "Midwest";
        case Region::West: return "West";
        case Region::Northeast: return "Northeast";
        case Region::South: return "South";
    }
    return "South";
}

std::optional<Region> parse_region(std::string_view s) {
    for (Region r : {Region::Midwest, Region::West, Region::Northeast, Region::South})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

std::vector<std::string> place_tokens(std::string_view raw) {
    const std::string folded = text::fold_case(raw);
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < folded.size(); ++i) {
        const auto c = static_cast<unsigned char>(folded[i]);
        if (c == '.' || c == '\'' || c == '#') continue;
        // U+2019 right single quotation mark
        if (c == 0xE2 && i + 2 < folded.size() && static_cast<unsigned char>(folded[i + 1]) == 0x80 &&
            static_cast<unsigned char>(folded[i + 2]) == 0x99) {
            i += 2;
            continue;
        }
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

static std::string join_key(const std::vector<std::string>& toks) {
    std::string key;
    for (const auto& t : toks) {
        if (!key.empty()) key.push_back(' ');
        key += t;
    }
    return key;
}

void Gazetteer::add_key(const std::string& key, Reading reading) {
    if (key.empty()) return;
    auto& list = keys_[key];
    const bool dup = std::any_of(list.begin(), list.end(), [&](const Reading& r) {
        return r.kind == reading.kind && r.state == reading.state && r.city == reading.city;
    });
    if (!dup) list.push_back(std::move(reading));
    max_key_words_ = std::max(max_key_words_, static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1);
}

Gazetteer Gazetteer::from_tables(const io::CsvTable& states, const io::CsvTable& cities, const io::CsvTable& regions,
                                 const io::CsvTable& timezones) {
    Gazetteer g;
    {
        const auto name = timezones.column("name");
        const auto off = timezones.column("offset_minutes");
        for (const auto& row : timezones.rows) {
            int minutes = 0;
            try {
                minutes = std::stoi(row[off]);
            } catch (const std::exception&) {
                throw Error("timezones.csv: bad offset for " + row[name]);
            }
            if (minutes < -720 || minutes > 840) throw Error("timezones.csv: offset out of range for " + row[name]);
            g.tz_offsets_[row[name]] = minutes;
        }
    }
    auto tz_of = [&](const std::string& hint) -> std::optional<int> {
        if (hint.empty()) return std::nullopt;
        if (auto it = g.tz_offsets_.find(hint); it != g.tz_offsets_.end()) return it->second;
        throw Error("gazetteer: unknown timezone hint '" + hint + "'");
    };
    {
        const auto st = regions.column("state");
        const auto rg = regions.column("region");
        for (const auto& row : regions.rows) {
            const auto r = parse_region(row[rg]);
            if (!r) throw Error("regions.csv: unknown region '" + row[rg] + "'");
            g.state_regions_[row[st]] = *r;
        }
    }
    {
        const auto name = states.column("name");
        const auto abbrev = states.column("abbrev");
        std::optional<std::size_t> tz;
        if (std::find(states.header.begin(), states.header.end(), "tz_hint") != states.header.end())
            tz = states.column("tz_hint");
        for (const auto& row : states.rows) {
            const std::string& code = row[abbrev];
            if (!g.state_regions_.count(code)) throw Error("gazetteer: state " + code + " has no region");
            if (!g.state_names_.count(code)) g.state_names_[code] = row[name];
            Reading r{Reading::Kind::State, code, "", tz ? tz_of(row[*tz]) : std::nullopt};
            g.add_key(join_key(place_tokens(row[name])), r);
            g.add_key(join_key(place_tokens(code)), r);
        }
    }
    for (const auto& [code, region] : g.state_regions_)
        if (!g.state_names_.count(code)) throw Error("gazetteer: region entry for unknown state " + code);
    for (const auto& [code, name] : g.state_names_) g.codes_.push_back(code);
    if (g.codes_.size() != 51) throw Error("gazetteer: expected 51 states, got " + std::to_string(g.codes_.size()));
    {
        const auto name = cities.column("name");
        const auto nick = cities.column("nicknames");
        const auto st = cities.column("state");
        const auto tz = cities.column("tz_hint");
        for (const auto& row : cities.rows) {
            if (!g.state_regions_.count(row[st])) throw Error("cities.csv: unknown state " + row[st]);
            City c{row[name], row[st], {}, row[tz]};
            Reading r{Reading::Kind::City, c.state, c.name, tz_of(c.tz_hint)};
            g.add_key(join_key(place_tokens(c.name)), r);
            std::string_view rest = row[nick];
            while (!rest.empty()) {
                const auto bar = rest.find('|');
                const auto part = rest.substr(0, bar);
                if (!part.empty()) {
                    c.nicknames.emplace_back(part);
                    g.add_key(join_key(place_tokens(part)), r);
                }
                if (bar == std::string_view::npos) break;
                rest.remove_prefix(bar + 1);
            }
            g.cities_.push_back(std::move(c));
        }
    }
    return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& data_dir) {
    return from_tables(io::read_csv(data_dir / "states.csv"), io::read_csv(data_dir / "cities.csv"),
                       io::read_csv(data_dir / "regions.csv"), io::read_csv(data_dir / "timezones.csv"));
}

std::optional<int> Gazetteer::tz_offset(std::string_view tz_name) const {
    if (auto it = tz_offsets_.find(std::string(tz_name)); it != tz_offsets_.end()) return it->second;
    return std::nullopt;
}

Region Gazetteer::region_of(std::string_view code) const {
    if (auto it = state_regions_.find(std::string(code)); it != state_regions_.end()) return it->second;
    throw Error("unknown state");
}

const std::string& Gazetteer::state_name(std::string_view code) const {
    if (auto it = state_names_.find(std::string(code)); it != state_names_.end()) return it->second;
    throw Error("unknown state");
}

const std::vector<Reading>* Gazetteer::readings(const std::string& key) const {
    if (auto it = keys_.find(key); it != keys_.end()) return &it->second;
    return nullptr;
}

std::vector<std::string> Gazetteer::location_phrases() const {
    std::set<std::string> out;
    for (const auto& [key, _] : keys_) {
        out.insert(key);
        if (key.find(' ') != std::string::npos) {
            std::string squashed;
            for (char c : key)
                if (c != ' ') squashed.push_back(c);
            out.insert(squashed);
        }
    }
    return {out.begin(), out.end()};
}

namespace {

std::size_t distinct_states(const std::vector<const Reading*>& rs) {
    std::set<std::string_view> s;
    for (const auto* r : rs) s.insert(r->state);
    return s.size();
}

}  // namespace

std::optional<NormalizedLocation> normalize_location(std::string_view raw, std::optional<std::string_view> timezone,
                                                     const Gazetteer& gaz) {
    const auto toks = place_tokens(raw);
    if (toks.empty()) return std::nullopt;
    std::optional<int> user_offset;
    if (timezone) user_offset = gaz.tz_offset(*timezone);

    // Resolved matches, left to right, longest phrase first at each position.
    std::vector<std::vector<const Reading*>> matches;
    for (std::size_t i = 0; i < toks.size();) {
        std::size_t best_len = 0;
        const std::vector<Reading>* best = nullptr;
        std::string key;
        for (std::size_t len = 1; len <= gaz.max_key_words() && i + len <= toks.size(); ++len) {
            if (len > 1) key.push_back(' ');
            key += toks[i + len - 1];
            if (const auto* rs = gaz.readings(key)) {
                best = rs;
                best_len = len;
            }
        }
        if (!best) {
            ++i;
            continue;
        }
        i += best_len;
        std::vector<const Reading*> kept;
        for (const auto& r : *best) kept.push_back(&r);
        if (distinct_states(kept) > 1) {
            if (!user_offset) continue;
            std::vector<const Reading*> filtered;
            for (const auto* r : kept)
                if (r->tz_offset && *r->tz_offset == *user_offset) filtered.push_back(r);
            if (filtered.empty() || distinct_states(filtered) != 1) continue;
            kept = std::move(filtered);
        }
        matches.push_back(std::move(kept));
    }

    std::optional<std::string> state;
    for (const auto& m : matches) {
        for (const auto* r : m)
            if (r->kind == Reading::Kind::State) {
                state = r->state;
                break;
            }
        if (state) break;
    }
    if (!state) {
        for (const auto& m : matches)
            if (!m.empty()) {
                state = m.front()->state;
                break;
            }
    }
    if (!state) return std::nullopt;

    NormalizedLocation loc;
    loc.state = *state;
    loc.region = gaz.region_of(loc.state);
    for (const auto& m : matches) {
        for (const auto* r : m)
            if (r->kind == Reading::Kind::City && r->state == loc.state) {
                loc.city = r->city;
                break;
            }
        if (loc.city) break;
    }
    return loc;
}

Region region_of(std::string_view state, const Gazetteer& gaz) { return gaz.region_of(state); }

LocalTime local_time_at_offset(std::int64_t created_at, int offset_minutes) {
    using namespace std::chrono;
    const std::int64_t local = created_at + static_cast<std::int64_t>(offset_minutes) * 60;
    std::int64_t day = local / 86400;
    std::int64_t secs = local % 86400;
    if (secs < 0) {
        secs += 86400;
        --day;
    }
    const sys_days d{days{day}};
    const year_month_day ymd{d};
    const weekday wd{d};
    LocalTime lt;
    lt.hour = static_cast<int>(secs / 3600);
    lt.weekday = static_cast<int>(wd.iso_encoding()) - 1;
    lt.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    return lt;
}

std::optional<LocalTime> local_time(std::int64_t created_at, std::string_view timezone, const Gazetteer& gaz) {
    const auto off = gaz.tz_offset(timezone);
    if (!off) return std::nullopt;
    return local_time_at_offset(created_at, *off);
}

}  // namespace t4f::geonorm
