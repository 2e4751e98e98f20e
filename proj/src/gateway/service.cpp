#include <charconv>

#include "t4f/analytics.hpp"
#include "t4f/error.hpp"
#include "t4f/gateway.hpp"

namespace t4f::gateway {

ServiceState ServiceState::build(std::shared_ptr<const Resources> res, corpus::CorpusSnapshot snapshot,
                                 std::optional<topics::TopicModel> model,
                                 const std::optional<std::filesystem::path>& runs_dir) {
    if (!snapshot.is_normalized()) snapshot = corpus::normalize(snapshot, res->gazetteer);
    ServiceState s;
    s.resources = res;
    s.prep = text::prepare(std::make_shared<const corpus::CorpusSnapshot>(std::move(snapshot)), *res);
    if (model) {
        s.topic_of = topics::infer_top_topics(*model, s.prep.filtered, 20, model->seed());
        s.model = std::move(model);
    }
    if (runs_dir) {
        if (!std::filesystem::is_directory(*runs_dir)) throw Error("runs directory not found: " + runs_dir->string());
        for (const auto& entry : std::filesystem::directory_iterator(*runs_dir)) {
            if (entry.path().extension() != ".json") continue;
            try {
                s.runs[entry.path().stem().string()] = Json::parse(io::read_file(entry.path()));
            } catch (const Json::exception& e) {
                throw Error("run file " + entry.path().string() + " is not valid JSON: " + e.what());
            }
        }
    }
    return s;
}

Json run_index(const std::map<std::string, Json>& runs) {
    Json out = Json::array();
    for (const auto& [id, r] : runs)
        out.push_back({{"id", id},
                       {"task", r.value("task", "")},
                       {"accuracy", r.value("accuracy", Json(nullptr))},
                       {"baseline", r.value("baseline", Json(nullptr))},
                       {"p_value", r.value("p_value", Json(nullptr))}});
    return out;
}

Json topic_words_json(const topics::TopicModel& model, std::uint32_t topic, std::size_t n) {
    Json words = Json::array();
    for (const auto& wc : topics::top_words(model, topic, n)) words.push_back({{"word", wc.word}, {"count", wc.count}});
    return {{"topic", topic}, {"words", std::move(words)}};
}

namespace {

struct BadRequest {
    std::string message;
};

Response json_response(int status, const Json& body) {
    Response r{status, io::canonical(body)};
    if (r.body.size() > kMaxBodyBytes) r = {413, io::canonical(Json{{"error", "response exceeds 10 MB"}})};
    return r;
}

Response error(int status, const std::string& message) { return {status, io::canonical(Json{{"error", message}})}; }

std::optional<std::string> param(const Params& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

template <class T>
T parse_number(const std::string& key, const std::string& text, T lo, T hi) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || value < lo || value > hi)
        throw BadRequest{"invalid " + key + ": '" + text + "'"};
    return value;
}

template <class T>
T number_param(const Params& params, const std::string& key, T fallback, T lo, T hi) {
    const auto v = param(params, key);
    return v ? parse_number<T>(key, *v, lo, hi) : fallback;
}

std::string required(const Params& params, const std::string& key) {
    auto v = param(params, key);
    if (!v || v->empty()) throw BadRequest{"missing parameter " + key};
    return *v;
}

/// Splits "/api/a/b" into {"a", "b"}; empty segments are dropped.
std::vector<std::string_view> segments(std::string_view path) {
    std::vector<std::string_view> out;
    while (!path.empty()) {
        const auto slash = path.find('/');
        const auto part = path.substr(0, slash);
        if (!part.empty()) out.push_back(part);
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return out;
}

}  // namespace

Response Service::handle(std::string_view path, const Params& params) const {
    const auto& s = *state_;
    const auto& res = *s.resources;
    const auto parts = segments(path);
    if (parts.size() < 2 || parts[0] != "api") return error(404, "not found");
    const auto& what = parts[1];

    try {
        if (what == "stats" && parts.size() == 2) return json_response(200, corpus::to_json(corpus::corpus_stats(*s.prep.snapshot)));

        if (what == "terms" && parts.size() == 3 && parts[2] == "top") {
            const auto vocab = param(params, "vocab").value_or("food");
            const auto mode = text::parse_vocab_mode(vocab);
            if (!mode) throw BadRequest{"unknown vocab '" + vocab + "'"};
            return json_response(200, analytics::rank_terms_tfidf(s.prep, *mode, res).to_json());
        }

        if (what == "histogram" && parts.size() == 2) {
            const auto phrase = required(params, "phrase");
            const auto g_name = param(params, "granularity").value_or("hour");
            const auto g = analytics::parse_granularity(g_name);
            if (!g) throw BadRequest{"unknown granularity '" + g_name + "'"};
            return json_response(200, analytics::temporal_histogram(s.prep, phrase, *g, res.gazetteer).to_json());
        }

        if (what == "heatmap" && parts.size() == 2) {
            analytics::HeatQuery q;
            q.phrase = param(params, "phrase");
            if (const auto t = param(params, "topic"))
                q.topic = parse_number<std::uint32_t>("topic", *t, 0, UINT32_MAX);
            if (q.phrase.has_value() == q.topic.has_value()) throw BadRequest{"give exactly one of phrase or topic"};
            const double cell = number_param<double>(params, "cell", 1.0, 0.0, 360.0);
            if (!analytics::is_allowed_cell(cell)) throw BadRequest{"cell must be one of 0.1, 0.25, 0.5, 1.0"};
            if (q.topic && !s.model) throw BadRequest{"no topic model loaded"};
            const auto k = s.model ? s.model->num_topics() : 0u;
            return json_response(200, analytics::heatmap_bins(s.prep, q, cell, s.model ? &s.topic_of : nullptr, k).to_json());
        }

        if (what == "wordclouds" && parts.size() == 2) {
            const auto split = param(params, "split").value_or("weekday_weekend");
            if (split != "weekday_weekend") throw BadRequest{"unknown split '" + split + "'"};
            const auto max_words = number_param<std::size_t>(params, "max_words", 50, 1, 1000);
            const auto seed = number_param<std::uint64_t>(params, "seed", 0, 0, UINT64_MAX);
            const auto [a, b] = analytics::split_weekday_weekend(s.prep, res.gazetteer);
            return json_response(200, analytics::parallel_wordclouds(a, b, max_words, seed).to_json());
        }

        if (what == "topics" && parts.size() == 4 && parts[3] == "top_words") {
            if (!s.model) return error(404, "no topic model loaded");
            const auto id = parse_number<std::uint32_t>("topic id", std::string(parts[2]), 0, UINT32_MAX);
            if (id >= s.model->num_topics()) return error(404, "unknown topic " + std::to_string(id));
            const auto n = number_param<std::size_t>(params, "n", 20, 1, 10000);
            return json_response(200, topic_words_json(*s.model, id, n));
        }

        if (what == "runs" && parts.size() == 2) return json_response(200, run_index(s.runs));
        if (what == "runs" && parts.size() == 3) {
            const auto it = s.runs.find(std::string(parts[2]));
            if (it == s.runs.end()) return error(404, "unknown run " + std::string(parts[2]));
            return json_response(200, it->second);
        }
    } catch (const BadRequest& e) {
        return error(400, e.message);
    } catch (const Error& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
    return error(404, "not found");
}

}  // namespace t4f::gateway
