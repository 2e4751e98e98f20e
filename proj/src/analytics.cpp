#include "t4f/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <set>
#include <unordered_map>

#include "t4f/error.hpp"
#include "t4f/rng.hpp"

namespace t4f::analytics {

// ---------------------------------------------------------------------------
// tf-idf

Json TermRanking::to_json() const {
    Json out = Json::object();
    for (const auto& [state, t] : top)
        out[state] = {{"term", t.term}, {"score", t.score}, {"tf", t.tf}, {"df", t.df}};
    return out;
}

TermRanking rank_terms_tfidf(const std::map<std::string, std::vector<std::string>>& pools, text::VocabMode mode) {
    TermRanking out;
    out.mode = mode;

    std::map<std::string, std::map<std::string, std::size_t>> tf;
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& [state, pool] : pools) {
        if (pool.empty()) {
            out.omitted.push_back(state);
            continue;
        }
        auto& counts = tf[state];
        for (const auto& t : pool) ++counts[t];
        for (const auto& [term, n] : counts) ++df[term];
    }

    for (const auto& [state, counts] : tf) {
        TermScore best;
        bool have = false;
        // std::map iterates terms lexicographically, so a strict > keeps the first of tied terms.
        for (const auto& [term, n] : counts) {
            const std::size_t d = df.at(term);
            const double score = static_cast<double>(n) * std::log(kNumStates / static_cast<double>(d));
            if (!have || score > best.score) {
                best = {term, state, n, d, score};
                have = true;
            }
        }
        out.top.emplace(state, std::move(best));
    }
    return out;
}

TermRanking rank_terms_tfidf(const text::PreparedCorpus& prep, text::VocabMode mode, const Resources& res) {
    const auto& snap = *prep.snapshot;
    if (!snap.is_normalized()) throw Error("snapshot has not been normalized");

    std::map<std::string, std::vector<std::string>> pools;
    for (const auto& code : res.gazetteer.state_codes()) pools[code];
    for (std::size_t i = 0; i < snap.size(); ++i) {
        const auto& loc = snap.location(i);
        if (!loc) continue;
        auto& pool = pools[loc->state];
        for (const auto& t : prep.filtered[i])
            if (text::in_mode(t, mode, res.food_lexicon)) pool.push_back(t);
    }

    auto out = rank_terms_tfidf(pools, mode);
    if (!out.omitted.empty()) {
        std::cerr << "warning: no " << text::to_string(mode) << " terms for";
        for (const auto& s : out.omitted) std::cerr << ' ' << s;
        std::cerr << '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Histograms

std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::Hour: return "hour";
        case Granularity::Weekday: return "weekday";
        case Granularity::Month: return "month";
    }
    return "hour";
}

std::optional<Granularity> parse_granularity(std::string_view s) {
    if (s == "hour") return Granularity::Hour;
    if (s == "weekday" || s == "day") return Granularity::Weekday;
    if (s == "month") return Granularity::Month;
    return std::nullopt;
}

std::size_t bin_count(Granularity g) {
    switch (g) {
        case Granularity::Hour: return 24;
        case Granularity::Weekday: return 7;
        case Granularity::Month: return 12;
    }
    return 24;
}

Json HistogramBins::to_json() const {
    return {{"granularity", to_string(granularity)}, {"bins", counts}, {"total", total}, {"query", query}};
}

Phrase::Phrase(std::string_view raw) : raw_(raw) {
    const auto toks = text::tokenize(raw);
    tokens_ = text::clean(toks);
}

bool Phrase::matches(std::span<const std::string> cleaned) const {
    if (tokens_.empty() || cleaned.size() < tokens_.size()) return false;
    return std::search(cleaned.begin(), cleaned.end(), tokens_.begin(), tokens_.end()) != cleaned.end();
}

HistogramBins temporal_histogram(const text::PreparedCorpus& prep, std::string_view phrase, Granularity granularity,
                                 const geonorm::Gazetteer& gaz) {
    const Phrase query(phrase);
    if (query.empty()) throw Error("phrase has no tokens after cleanup");

    HistogramBins out;
    out.granularity = granularity;
    out.counts.assign(bin_count(granularity), 0);
    out.query = std::string(phrase);

    const auto& tweets = prep.snapshot->tweets();
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        const auto& tz = tweets[i].user_timezone;
        if (!tz) continue;
        const auto lt = geonorm::local_time(tweets[i].created_at, *tz, gaz);
        if (!lt || !query.matches(prep.cleaned[i])) continue;
        const int bin = granularity == Granularity::Hour      ? lt->hour
                        : granularity == Granularity::Weekday ? lt->weekday
                                                              : lt->month - 1;
        ++out.counts[static_cast<std::size_t>(bin)];
        ++out.total;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Heatmaps

Json HeatQuery::to_json() const {
    Json out = Json::object();
    if (phrase) out["phrase"] = *phrase;
    if (topic) out["topic"] = *topic;
    return out;
}

Json GeoGrid::to_json() const {
    Json rows = Json::array();
    for (const auto& [idx, n] : cells) rows.push_back({idx.first, idx.second, n});
    return {{"cell", cell}, {"rows", std::move(rows)}, {"total", total}, {"query", query.to_json()}};
}

bool is_allowed_cell(double cell) { return cell == 0.1 || cell == 0.25 || cell == 0.5 || cell == 1.0; }

namespace {

// Guards against 40.7 / 0.1 landing just under an integer.
constexpr double kIndexSlack = 1e-9;

int bounded_index(double v, double cell, double lo, double hi) {
    const int i = static_cast<int>(std::floor(v / cell + kIndexSlack));
    const int min_i = static_cast<int>(std::floor(lo / cell + kIndexSlack));
    const int max_i = static_cast<int>(std::ceil(hi / cell - kIndexSlack)) - 1;
    return std::clamp(i, min_i, max_i);
}

}  // namespace

std::pair<int, int> cell_index(double lat, double lon, double cell) {
    return {bounded_index(lat, cell, -90.0, 90.0), bounded_index(lon, cell, -180.0, 180.0)};
}

GeoGrid heatmap_bins(const text::PreparedCorpus& prep, const HeatQuery& query, double cell,
                     const std::vector<std::uint32_t>* topic_of, std::uint32_t num_topics) {
    if (!is_allowed_cell(cell)) throw Error("cell size must be one of 0.1, 0.25, 0.5, 1.0");
    if (query.phrase.has_value() == query.topic.has_value()) throw Error("heatmap query needs exactly one of phrase or topic");

    std::optional<Phrase> phrase;
    if (query.phrase) {
        phrase.emplace(*query.phrase);
        if (phrase->empty()) throw Error("phrase has no tokens after cleanup");
    } else {
        if (!topic_of || num_topics == 0) throw Error("topic query without a topic model");
        if (*query.topic >= num_topics) throw Error("unknown topic id " + std::to_string(*query.topic));
        if (topic_of->size() != prep.snapshot->size()) throw Error("topic assignments do not match the snapshot");
    }

    GeoGrid out;
    out.cell = cell;
    out.query = query;
    const auto& tweets = prep.snapshot->tweets();
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        if (!tweets[i].geo) continue;
        const bool hit = phrase ? phrase->matches(prep.cleaned[i]) : (*topic_of)[i] == *query.topic;
        if (!hit) continue;
        ++out.cells[cell_index(tweets[i].geo->lat, tweets[i].geo->lon, cell)];
        ++out.total;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Word clouds

std::string_view to_string(CloudColor c) {
    switch (c) {
        case CloudColor::Shared: return "shared";
        case CloudColor::GroupA: return "group_a";
        case CloudColor::GroupB: return "group_b";
    }
    return "shared";
}

bool PlacedWord::overlaps(const PlacedWord& o) const {
    return std::abs(x - o.x) * 2 < width + o.width && std::abs(y - o.y) * 2 < height + o.height;
}

const PlacedWord* CloudLayout::find(std::string_view word) const {
    for (const auto& w : words)
        if (w.word == word) return &w;
    return nullptr;
}

Json CloudPair::to_json() const {
    auto side = [](const CloudLayout& c) {
        Json out = Json::array();
        for (const auto& w : c.words)
            out.push_back({{"word", w.word},
                           {"count", w.count},
                           {"font_scale", w.font_scale},
                           {"x", w.x},
                           {"y", w.y},
                           {"width", w.width},
                           {"height", w.height},
                           {"color", to_string(w.color)}});
        return out;
    };
    return {{"a", side(a)}, {"b", side(b)}};
}

namespace {

constexpr double kLineHeight = 40.0;
constexpr double kCharWidth = 0.6 * kLineHeight;
constexpr double kPadding = 2.0;
constexpr double kSpiralGrowth = 4.0;  // radius gained per radian

struct GroupCounts {
    std::vector<std::pair<std::string, std::size_t>> top;  // count desc, word asc
    std::map<std::string, std::size_t> rank;
    std::size_t max_count = 0;
};

GroupCounts top_words(std::span<const std::vector<std::string>> docs, std::size_t max_words) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& d : docs)
        for (const auto& t : d) ++counts[t];
    GroupCounts g;
    g.top.assign(counts.begin(), counts.end());
    std::sort(g.top.begin(), g.top.end(), [](const auto& l, const auto& r) {
        return l.second != r.second ? l.second > r.second : l.first < r.first;
    });
    if (g.top.size() > max_words) g.top.resize(max_words);
    for (std::size_t i = 0; i < g.top.size(); ++i) g.rank[g.top[i].first] = i;
    g.max_count = g.top.empty() ? 0 : g.top.front().second;
    return g;
}

PlacedWord sized(const std::string& word, std::size_t count, std::size_t max_count, CloudColor color) {
    PlacedWord w;
    w.word = word;
    w.count = count;
    w.font_scale = std::sqrt(static_cast<double>(count) / static_cast<double>(max_count));
    w.width = w.font_scale * kCharWidth * static_cast<double>(word.size()) + 2 * kPadding;
    w.height = w.font_scale * kLineHeight + 2 * kPadding;
    w.color = color;
    return w;
}

/// Walks an Archimedean spiral from (cx, cy) and leaves `w` at the first spot free of `placed`.
void place_on_spiral(PlacedWord& w, double cx, double cy, double start_angle, const std::vector<PlacedWord>& placed) {
    for (double t = 0;; ) {
        const double r = kSpiralGrowth * t;
        w.x = cx + r * std::cos(start_angle + t);
        w.y = cy + r * std::sin(start_angle + t);
        if (std::none_of(placed.begin(), placed.end(), [&](const PlacedWord& p) { return w.overlaps(p); })) return;
        t += std::min(0.5, 1.0 / (r + 1.0));
    }
}

/// Number of documents containing both words, for every pair of `words`.
std::map<std::pair<std::string, std::string>, std::size_t> cooccurrence(std::span<const std::vector<std::string>> docs,
                                                                      const std::map<std::string, std::size_t>& words) {
    std::map<std::pair<std::string, std::string>, std::size_t> out;
    for (const auto& d : docs) {
        std::set<std::string> present;
        for (const auto& t : d)
            if (words.count(t)) present.insert(t);
        for (auto i = present.begin(); i != present.end(); ++i)
            for (auto j = std::next(i); j != present.end(); ++j) ++out[{*i, *j}];
    }
    return out;
}

void place_group_words(CloudLayout& cloud, const GroupCounts& g, const std::set<std::string>& shared,
                       std::span<const std::vector<std::string>> docs, CloudColor color, double start_angle) {
    const auto co = cooccurrence(docs, g.rank);
    auto co_count = [&](const std::string& a, const std::string& b) {
        const auto it = co.find(a < b ? std::pair{a, b} : std::pair{b, a});
        return it == co.end() ? std::size_t{0} : it->second;
    };
    for (const auto& [word, count] : g.top) {
        if (shared.count(word)) continue;
        const PlacedWord* anchor = nullptr;
        std::size_t best = 0;
        for (const auto& p : cloud.words) {
            const auto c = co_count(word, p.word);
            if (c > best) {
                best = c;
                anchor = &p;
            }
        }
        auto w = sized(word, count, g.max_count, color);
        place_on_spiral(w, anchor ? anchor->x : 0.0, anchor ? anchor->y : 0.0, start_angle, cloud.words);
        cloud.words.push_back(std::move(w));
    }
}

}  // namespace

CloudPair parallel_wordclouds(std::span<const std::vector<std::string>> group_a,
                              std::span<const std::vector<std::string>> group_b, std::size_t max_words,
                              std::uint64_t seed) {
    if (max_words < 1) throw Error("max_words must be at least 1");
    if (group_a.empty() || group_b.empty()) throw Error("word clouds need two nonempty groups");

    const auto ga = top_words(group_a, max_words);
    const auto gb = top_words(group_b, max_words);
    if (ga.top.empty() || gb.top.empty()) throw Error("word clouds need words in both groups");

    Rng rng(seed);
    const double start_angle = 2 * std::numbers::pi * rng.uniform();

    // Shared words ordered by combined count, then word.
    std::vector<std::pair<std::string, std::size_t>> shared_order;
    std::set<std::string> shared;
    for (const auto& [word, count] : ga.top)
        if (const auto it = gb.rank.find(word); it != gb.rank.end()) {
            shared_order.emplace_back(word, count + gb.top[it->second].second);
            shared.insert(word);
        }
    std::sort(shared_order.begin(), shared_order.end(), [](const auto& l, const auto& r) {
        return l.second != r.second ? l.second > r.second : l.first < r.first;
    });

    CloudPair out;
    std::vector<PlacedWord> union_boxes;
    for (const auto& [word, combined] : shared_order) {
        auto wa = sized(word, ga.top[ga.rank.at(word)].second, ga.max_count, CloudColor::Shared);
        auto wb = sized(word, gb.top[gb.rank.at(word)].second, gb.max_count, CloudColor::Shared);
        PlacedWord box = wa;
        box.width = std::max(wa.width, wb.width);
        box.height = std::max(wa.height, wb.height);
        place_on_spiral(box, 0.0, 0.0, start_angle, union_boxes);
        wa.x = wb.x = box.x;
        wa.y = wb.y = box.y;
        union_boxes.push_back(box);
        out.a.words.push_back(std::move(wa));
        out.b.words.push_back(std::move(wb));
    }

    place_group_words(out.a, ga, shared, group_a, CloudColor::GroupA, start_angle);
    place_group_words(out.b, gb, shared, group_b, CloudColor::GroupB, start_angle);
    return out;
}

std::pair<std::vector<std::vector<std::string>>, std::vector<std::vector<std::string>>> split_weekday_weekend(
    const text::PreparedCorpus& prep, const geonorm::Gazetteer& gaz) {
    std::pair<std::vector<std::vector<std::string>>, std::vector<std::vector<std::string>>> out;
    const auto& tweets = prep.snapshot->tweets();
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        if (!tweets[i].user_timezone) continue;
        const auto lt = geonorm::local_time(tweets[i].created_at, *tweets[i].user_timezone, gaz);
        if (!lt) continue;
        (lt->weekday >= 5 ? out.second : out.first).push_back(prep.filtered[i]);
    }
    return out;
}

}  // namespace t4f::analytics
