#include "t4f/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "parallel.hpp"
#include "t4f/error.hpp"
#include "t4f/rng.hpp"

namespace t4f::tasks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Json features_json(const std::vector<learn::FeatureDescriptor>& fs) {
    Json out = Json::array();
    for (const auto& f : fs) out.push_back({{"id", f.id}, {"name", f.name}, {"weight", f.weight}});
    return out;
}

std::size_t prefix_size(std::size_t n, double fraction) {
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

void finish_scores(TaskResult& r) {
    std::size_t correct = 0, base = 0;
    for (const auto& p : r.per_instance) {
        correct += p.gold == p.predicted;
        base += p.gold == p.baseline;
    }
    const double n = static_cast<double>(r.per_instance.size());
    r.correct = correct;
    r.accuracy = static_cast<double>(correct) / n;
    r.baseline = static_cast<double>(base) / n;
}

void attach_p_value(TaskResult& r, const TaskConfig& config) {
    if (config.bootstrap_iterations == 0 || r.per_instance.size() < 2) return;
    std::vector<std::string> gold, pred, base;
    for (const auto& p : r.per_instance) {
        gold.push_back(p.gold);
        pred.push_back(p.predicted);
        base.push_back(p.baseline);
    }
    r.p_value = bootstrap_significance(gold, pred, base, config.bootstrap_iterations, config.seed);
}

std::vector<std::size_t> located_tweets(const corpus::CorpusSnapshot& snap) {
    if (!snap.is_normalized()) throw Error("snapshot has not been normalized");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < snap.size(); ++i)
        if (snap.location(i)) out.push_back(i);
    if (out.empty()) throw Error("no tweets with a normalized location");
    return out;
}

struct Locale {
    std::string label;
    std::vector<std::size_t> members;  // chronological
};

std::vector<Locale> collect_locales(const corpus::CorpusSnapshot& snap, LocaleLevel level,
                                    const geonorm::Gazetteer& gaz) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    std::vector<std::string> expected;
    std::map<std::pair<std::string, std::string>, std::string> city_label;
    switch (level) {
        case LocaleLevel::State51:
            expected = gaz.state_codes();
            break;
        case LocaleLevel::Region4:
            for (auto r : {geonorm::Region::Midwest, geonorm::Region::Northeast, geonorm::Region::South,
                           geonorm::Region::West})
                expected.emplace_back(geonorm::to_string(r));
            break;
        case LocaleLevel::City15: {
            const auto& cities = gaz.cities();
            if (cities.size() < 15) throw Error("city table lists fewer than 15 cities");
            for (std::size_t i = 0; i < 15; ++i) {
                const auto label = cities[i].name + ", " + cities[i].state;
                city_label[{cities[i].name, cities[i].state}] = label;
                expected.push_back(label);
            }
            break;
        }
    }
    for (const auto& e : expected) by_label[e];
    for (std::size_t i = 0; i < snap.size(); ++i) {
        const auto& loc = snap.location(i);
        if (!loc) continue;
        switch (level) {
            case LocaleLevel::State51:
                by_label[loc->state].push_back(i);
                break;
            case LocaleLevel::Region4:
                by_label[std::string(geonorm::to_string(loc->region))].push_back(i);
                break;
            case LocaleLevel::City15:
                if (loc->city) {
                    auto it = city_label.find({*loc->city, loc->state});
                    if (it != city_label.end()) by_label[it->second].push_back(i);
                }
                break;
        }
    }
    std::vector<std::string> short_of;
    std::vector<Locale> out;
    for (auto& [label, members] : by_label) {
        if (members.size() < kMinLocaleTweets) short_of.push_back(label + " (" + std::to_string(members.size()) + ")");
        out.push_back({label, std::move(members)});
    }
    if (!short_of.empty()) {
        std::string msg = "locales below the minimum of " + std::to_string(kMinLocaleTweets) + " tweets:";
        for (const auto& s : short_of) msg += " " + s;
        throw Error(msg);
    }
    return out;
}

TaskResult evaluate_locales(const corpus::CorpusSnapshot& snap, const FeatureContext& ctx,
                            const std::vector<Locale>& locales, LocaleLevel level, const TaskConfig& config,
                            double train_fraction, double test_fraction) {
    const auto start = Clock::now();
    std::vector<learn::SparseVector> train, test;
    std::vector<std::string> labels;
    Json audit_rows = Json::array();
    bool chronological = true;
    auto time_of = [&](std::size_t i) { return snap.tweets()[i].created_at; };
    for (const auto& loc : locales) {
        const std::size_t n = loc.members.size();
        const std::size_t n_train = n * 4 / 5;
        std::span<const std::size_t> all(loc.members);
        auto train_side = all.subspan(0, n_train);
        auto test_side = all.subspan(n_train);
        train_side = train_side.subspan(0, prefix_size(train_side.size(), train_fraction));
        test_side = test_side.subspan(0, prefix_size(test_side.size(), test_fraction));
        train.push_back(learn::featurize_group(ctx.docs, train_side, *ctx.space, ctx.topics()));
        test.push_back(learn::featurize_group(ctx.docs, test_side, *ctx.space, ctx.topics()));
        labels.push_back(loc.label);
        std::int64_t max_train = time_of(train_side.front()), min_test = time_of(test_side.front());
        for (auto i : train_side) max_train = std::max(max_train, time_of(i));
        for (auto i : test_side) min_test = std::min(min_test, time_of(i));
        audit_rows.push_back({{"locale", loc.label}, {"train", train_side.size()}, {"test", test_side.size()},
                              {"max_train_time", max_train}, {"min_test_time", min_test}});
        chronological = chronological && max_train <= min_test;
    }
    std::vector<const learn::SparseVector*> xs;
    for (const auto& v : train) xs.push_back(&v);
    auto model = learn::train_ovr_svm(xs, labels, labels, config.svm, ctx.space->hash());

    TaskResult r;
    r.task = "locale/" + std::string(to_string(level));
    r.config = config.to_json();
    r.config["train_fraction"] = train_fraction;
    r.config["test_fraction"] = test_fraction;
    for (std::size_t i = 0; i < locales.size(); ++i)
        r.per_instance.push_back({labels[i], labels[i], model.predict(test[i]), model.classes.front()});
    finish_scores(r);
    attach_p_value(r, config);
    for (std::size_t c = 0; c < model.classes.size(); ++c)
        r.top_features[model.classes[c]] =
            learn::top_weighted_features(model.models[c], learn::WeightSign::Positive, config.top_k, *ctx.space);
    r.audit = {{"chronological", chronological}, {"locales", audit_rows}};
    r.runtime_seconds = seconds_since(start);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

StateLabelSet StateLabelSet::load(const std::filesystem::path& csv, std::string name) {
    const auto table = io::read_csv(csv);
    if (table.header.size() < 3) throw Error(csv.string() + ": expected columns state,label,<value>");
    const auto state_col = table.column("state"), label_col = table.column("label");
    const std::size_t value_col = 2;
    StateLabelSet set;
    set.name = std::move(name);
    set.value_column = table.header[value_col];
    std::vector<std::pair<double, std::string>> values;
    for (const auto& row : table.rows) {
        if (row.size() <= value_col) throw Error(csv.string() + ": short row");
        const auto& state = row[state_col];
        if (!set.labels.emplace(state, row[label_col]).second) throw Error(csv.string() + ": duplicate state " + state);
        try {
            values.emplace_back(std::stod(row[value_col]), row[label_col]);
        } catch (const std::exception&) {
            throw Error(csv.string() + ": bad value for " + state);
        }
    }
    if (set.labels.size() != 51) throw Error(csv.string() + ": expected 51 states, found " + std::to_string(set.labels.size()));
    std::map<std::string, std::size_t> sizes;
    for (const auto& [_, l] : set.labels) ++sizes[l];
    if (sizes.size() != 2) throw Error(csv.string() + ": labels must be binary");
    for (const auto& [l, n] : sizes) {
        if (n != 25 && n != 26) throw Error(csv.string() + ": class '" + l + "' has " + std::to_string(n) + " states");
        set.classes.push_back(l);
    }
    std::sort(values.begin(), values.end());
    set.median = values[values.size() / 2].first;
    // The label of every state above the median must differ from that of every state at or below it.
    std::set<std::string> above, rest;
    for (const auto& [v, l] : values) (v > set.median ? above : rest).insert(l);
    if (above.size() != 1 || rest.size() != 1 || *above.begin() == *rest.begin())
        throw Error(csv.string() + ": labels are not a median split of " + set.value_column);
    return set;
}

StateLabelSet StateLabelSet::load_named(const std::filesystem::path& data_dir, const std::string& name) {
    if (name != "overweight" && name != "diabetes" && name != "political")
        throw Error("unknown label dataset '" + name + "'");
    return load(data_dir / ("labels_" + name + ".csv"), name);
}

std::string StateLabelSet::majority_class() const {
    std::map<std::string, std::size_t> sizes;
    for (const auto& [_, l] : labels) ++sizes[l];
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [l, n] : sizes)
        if (n > best_n) best = l, best_n = n;
    return best;
}

double StateLabelSet::majority_baseline() const {
    const auto m = majority_class();
    std::size_t n = 0;
    for (const auto& [_, l] : labels) n += l == m;
    return static_cast<double>(n) / static_cast<double>(labels.size());
}

void TaskConfig::validate() const {
    auto frac_ok = [](double f) { return f > 0 && f <= 1; };
    if (!frac_ok(train_fraction) || !frac_ok(test_fraction)) throw Error("fractions must lie in (0, 1]");
    if (use_lda && (lda.num_topics == 0 || lda.iterations == 0)) throw Error("lda needs at least one topic and one sweep");
    if (!(svm.C > 0)) throw Error("svm C must be positive");
    if (top_k == 0) throw Error("top_k must be positive");
}

Json TaskConfig::to_json() const {
    Json j = {{"feature_mode", std::string(text::to_string(feature_mode))},
              {"use_lda", use_lda},
              {"svm", {{"C", svm.C}, {"tolerance", svm.tolerance}, {"max_epochs", svm.max_epochs}}},
              {"train_fraction", train_fraction},
              {"test_fraction", test_fraction},
              {"seed", seed},
              {"bootstrap_iterations", bootstrap_iterations},
              {"top_k", top_k}};
    if (use_lda)
        j["lda"] = {{"num_topics", lda.num_topics},
                    {"alpha", lda.effective_alpha()},
                    {"beta", lda.beta},
                    {"iterations", lda.iterations},
                    {"seed", lda.seed},
                    {"fold_in_iterations", fold_in_iterations}};
    return j;
}

std::string_view to_string(LocaleLevel level) {
    switch (level) {
        case LocaleLevel::City15: return "city";
        case LocaleLevel::State51: return "state";
        case LocaleLevel::Region4: return "region";
    }
    return "?";
}

std::optional<LocaleLevel> parse_locale_level(std::string_view s) {
    if (s == "city" || s == "city15") return LocaleLevel::City15;
    if (s == "state" || s == "state51") return LocaleLevel::State51;
    if (s == "region" || s == "region4") return LocaleLevel::Region4;
    return std::nullopt;
}

Json TaskResult::to_json() const {
    Json instances = Json::array();
    for (const auto& p : per_instance)
        instances.push_back(
            {{"instance", p.instance}, {"gold", p.gold}, {"predicted", p.predicted}, {"baseline", p.baseline}});
    Json features = Json::object();
    for (const auto& [cls, fs] : top_features) features[cls] = features_json(fs);
    return {{"task", task},
            {"config", config},
            {"accuracy", accuracy},
            {"baseline", baseline},
            {"correct", correct},
            {"instances", per_instance.size()},
            {"p_value", p_value ? Json(*p_value) : Json(nullptr)},
            {"per_instance", instances},
            {"top_features", features},
            {"runtime_seconds", runtime_seconds},
            {"audit", audit}};
}

FeatureContext build_features(const text::PreparedCorpus& prep, std::span<const std::size_t> participants,
                              const TaskConfig& config, const text::WordSet& food_lexicon) {
    config.validate();
    FeatureContext ctx;
    ctx.docs.reserve(prep.filtered.size());
    for (const auto& doc : prep.filtered) ctx.docs.push_back(text::restrict_to_mode(doc, config.feature_mode, food_lexicon));

    std::vector<std::vector<std::string>> selected;
    selected.reserve(participants.size());
    for (auto i : participants) selected.push_back(ctx.docs[i]);
    ctx.vocab = std::make_shared<const text::Vocabulary>(
        text::build_vocabulary(selected, config.feature_mode, food_lexicon));

    std::vector<std::string> topic_names;
    std::uint32_t num_topics = 0;
    if (config.use_lda) {
        ctx.model.emplace(topics::train_lda(selected, config.lda));
        num_topics = ctx.model->num_topics();
        for (std::uint32_t k = 0; k < num_topics; ++k) {
            std::string name;
            for (const auto& wc : topics::top_words(*ctx.model, k, 3)) name += (name.empty() ? "" : ", ") + wc.word;
            topic_names.push_back(std::move(name));
        }
        ctx.topic_of.assign(ctx.docs.size(), 0);
        const auto& model = *ctx.model;
        detail::parallel_for(participants.size(), [&](std::size_t j) {
            const auto i = participants[j];
            ctx.topic_of[i] = topics::infer_top_topic(model, ctx.docs[i], config.fold_in_iterations,
                                                      mix_seed(config.lda.seed, i));
        });
    }
    ctx.space = std::make_shared<const learn::FeatureSpace>(ctx.vocab, num_topics, std::move(topic_names));
    return ctx;
}

std::map<std::string, std::vector<std::size_t>> group_by_state(const corpus::CorpusSnapshot& snapshot) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < snapshot.size(); ++i)
        if (const auto& loc = snapshot.location(i)) groups[loc->state].push_back(i);
    return groups;
}

TaskResult run_state_characteristic_task(const text::PreparedCorpus& prep, const StateLabelSet& labels,
                                         const TaskConfig& config, const Resources& res) {
    const auto start = Clock::now();
    config.validate();
    const auto& snap = *prep.snapshot;
    const auto participants = located_tweets(snap);
    auto groups = group_by_state(snap);

    const auto& states = res.gazetteer.state_codes();
    std::string missing;
    for (const auto& s : states) {
        if (groups[s].empty()) missing += (missing.empty() ? "" : ", ") + s;
        if (!labels.labels.count(s)) throw Error("label set '" + labels.name + "' has no entry for " + s);
    }
    if (!missing.empty()) throw Error("states without tweets: " + missing);

    const auto ctx = build_features(prep, participants, config, res.food_lexicon);
    std::vector<learn::SparseVector> vectors;
    vectors.reserve(states.size());
    for (const auto& s : states) vectors.push_back(learn::featurize_group(ctx.docs, groups[s], *ctx.space, ctx.topics()));

    // The positive class is the first label in lexicographic order.
    const auto& positive = labels.classes.front();
    const auto& negative = labels.classes.back();
    auto y_of = [&](const std::string& state) { return labels.labels.at(state) == positive ? 1 : -1; };

    const std::size_t n = states.size();
    std::vector<std::string> predicted(n);
    std::vector<Json> folds(n);
    detail::parallel_for(n, [&](std::size_t held) {
        learn::TrainingSet set;
        std::vector<std::string> pool;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == held) continue;
            set.add(vectors[j], y_of(states[j]));
            pool.push_back(states[j]);
        }
        const bool leaked = std::find(pool.begin(), pool.end(), states[held]) != pool.end();
        auto model = learn::train_binary_svm(set, config.svm, nullptr, ctx.space->hash());
        predicted[held] = model.predict(vectors[held]) == 1 ? positive : negative;
        folds[held] = {{"held_out", states[held]}, {"training_states", pool.size()}, {"held_out_in_training", leaked}};
    });

    TaskResult r;
    r.task = "state-chars/" + labels.name;
    r.config = config.to_json();
    r.config["dataset"] = labels.name;
    const auto majority = labels.majority_class();
    for (std::size_t i = 0; i < n; ++i)
        r.per_instance.push_back({states[i], labels.labels.at(states[i]), predicted[i], majority});
    finish_scores(r);
    attach_p_value(r, config);

    bool audit_ok = folds.size() == 51;
    for (const auto& f : folds) audit_ok = audit_ok && !f["held_out_in_training"].get<bool>() && f["training_states"] == 50;
    r.audit = {{"folds", folds.size()}, {"passed", audit_ok}, {"detail", folds}};

    learn::TrainingSet all;
    for (std::size_t j = 0; j < n; ++j) all.add(vectors[j], y_of(states[j]));
    auto full = learn::train_binary_svm(all, config.svm, nullptr, ctx.space->hash());
    r.top_features[positive] = learn::top_weighted_features(full, learn::WeightSign::Positive, config.top_k, *ctx.space);
    r.top_features[negative] = learn::top_weighted_features(full, learn::WeightSign::Negative, config.top_k, *ctx.space);
    r.runtime_seconds = seconds_since(start);
    return r;
}

TaskResult run_locale_task(const text::PreparedCorpus& prep, LocaleLevel level, const TaskConfig& config,
                           const Resources& res) {
    const auto start = Clock::now();
    config.validate();
    const auto& snap = *prep.snapshot;
    const auto participants = located_tweets(snap);
    const auto locales = collect_locales(snap, level, res.gazetteer);
    const auto ctx = build_features(prep, participants, config, res.food_lexicon);
    auto r = evaluate_locales(snap, ctx, locales, level, config, config.train_fraction, config.test_fraction);
    r.runtime_seconds = seconds_since(start);
    return r;
}

double bootstrap_significance(std::span<const std::string> gold, std::span<const std::string> model_preds,
                              std::span<const std::string> baseline_preds, std::uint32_t iterations,
                              std::uint64_t seed) {
    const std::size_t n = gold.size();
    if (model_preds.size() != n || baseline_preds.size() != n) throw Error("bootstrap: sequences differ in length");
    if (n < 2) throw Error("bootstrap: need at least two instances");
    if (iterations == 0) throw Error("bootstrap: iterations must be positive");
    std::vector<int> model_ok(n), base_ok(n);
    for (std::size_t i = 0; i < n; ++i) {
        model_ok[i] = gold[i] == model_preds[i];
        base_ok[i] = gold[i] == baseline_preds[i];
    }
    Rng rng(seed);
    std::uint32_t not_better = 0;
    for (std::uint32_t it = 0; it < iterations; ++it) {
        long diff = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto i = rng.below(n);
            diff += model_ok[i] - base_ok[i];
        }
        not_better += diff <= 0;
    }
    return static_cast<double>(not_better) / iterations;
}

Json LearningCurve::to_json() const { return {{"fractions", fractions}, {"accuracy", accuracy}}; }

LearningCurve learning_curve(const text::PreparedCorpus& prep, LocaleLevel level, const TaskConfig& config,
                             std::span<const double> fractions, const Resources& res) {
    if (fractions.empty()) throw Error("learning curve: no fractions given");
    for (double f : fractions)
        if (!(f > 0 && f <= 1)) throw Error("fractions must lie in (0, 1]");
    config.validate();
    const auto& snap = *prep.snapshot;
    const auto participants = located_tweets(snap);
    const auto locales = collect_locales(snap, level, res.gazetteer);
    const auto ctx = build_features(prep, participants, config, res.food_lexicon);
    TaskConfig quiet = config;
    quiet.bootstrap_iterations = 0;

    LearningCurve curve;
    curve.fractions.assign(fractions.begin(), fractions.end());
    const std::size_t m = fractions.size();
    curve.accuracy.assign(m, std::vector<double>(m, 0.0));
    detail::parallel_for(m * m, [&](std::size_t cell) {
        const auto i = cell / m, j = cell % m;
        curve.accuracy[i][j] = evaluate_locales(snap, ctx, locales, level, quiet, fractions[i], fractions[j]).accuracy;
    });
    return curve;
}

}  // namespace t4f::tasks
