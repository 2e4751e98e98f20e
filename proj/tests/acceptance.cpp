// Acceptance run: one PASS/FAIL line per criterion, with wall time.
// Exits 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "gateway_contract.hpp"
#include "oracles.hpp"
#include "planted.hpp"
#include "t4f/learn.hpp"
#include "t4f/rng.hpp"

using namespace t4f;
using t4f::testing::resources;

namespace {

/// Collects failed expectations and a short summary for one criterion.
class Verdict {
public:
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
    }
    template <class T>
    void note(const std::string& key, const T& value) {
        summary_ << (summary_.tellp() > 0 ? " " : "") << key << "=" << value;
    }
    bool passed() const { return failures_ == 0; }
    std::string text() const {
        if (passed()) return summary_.str();
        return summary_.str() + (summary_.tellp() > 0 ? " | " : "") + std::to_string(failures_) +
               " failed: " + notes_.str();
    }

private:
    int failures_ = 0;
    mutable std::ostringstream summary_, notes_;
};

struct Criterion {
    std::string name;
    double budget_seconds;  // 0: no time limit
    std::function<void(Verdict&)> run;
};

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

tasks::TaskConfig default_task_config() { return {}; }

// ---------------------------------------------------------------- baselines

void baseline_arithmetic(Verdict& v) {
    const auto& res = resources();
    for (const char* name : {"overweight", "diabetes", "political"}) {
        const auto labels = tasks::StateLabelSet::load_named(res.data_dir, name);
        const double b = labels.majority_baseline();
        v.expect(labels.labels.size() == 51, std::string(name) + " has " + std::to_string(labels.labels.size()) + " states");
        v.expect(b == 26.0 / 51.0, std::string(name) + " majority " + fixed(b, 6));
        v.expect(std::abs(b * 100 - 50.98) <= 0.01, std::string(name) + " majority % " + fixed(b * 100));
    }
    v.note("majority", fixed(26.0 / 51.0 * 100, 2) + "%");

    // A minimal corpus that satisfies every locale level, so the reported random baselines can be read off.
    auto spec = synth::SynthSpec::default_spec();
    spec.tweets_per_locale = 100;
    const auto& syn = *t4f::testing::synthetic(spec, 11);
    auto config = default_task_config();
    config.bootstrap_iterations = 0;
    struct Want {
        tasks::LocaleLevel level;
        double exact;
        double percent;
    };
    for (const auto& w : {Want{tasks::LocaleLevel::State51, 1.0 / 51.0, 1.96}, Want{tasks::LocaleLevel::City15, 1.0 / 15.0, 6.67},
                          Want{tasks::LocaleLevel::Region4, 0.25, 25.0}}) {
        const auto r = tasks::run_locale_task(syn.prep, w.level, config, res);
        const std::string level(tasks::to_string(w.level));
        v.expect(r.baseline == w.exact, level + " baseline " + fixed(r.baseline, 6));
        v.expect(std::abs(r.baseline * 100 - w.percent) < 0.005 + 1e-12, level + " baseline % " + fixed(r.baseline * 100));
        v.note(level, fixed(r.baseline * 100, 2) + "%");
    }
}

// ------------------------------------------------------ planted-signal recovery

struct PlantedRuns {
    tasks::TaskResult locale, chars, null_locale, null_chars;
};

const PlantedRuns& planted_runs() {
    static const PlantedRuns runs = [] {
        const auto& res = resources();
        const auto config = default_task_config();
        const auto labels = tasks::StateLabelSet::load_named(res.data_dir, "diabetes");
        const auto& syn = t4f::testing::default_synthetic();

        auto null_spec = synth::SynthSpec::default_spec();
        null_spec.marker_rate = 0;
        null_spec.south_rate = 0;
        const auto& null_syn = *t4f::testing::synthetic(null_spec, 7);

        return PlantedRuns{tasks::run_locale_task(syn.prep, tasks::LocaleLevel::State51, config, res),
                           tasks::run_state_characteristic_task(syn.prep, labels, config, res),
                           tasks::run_locale_task(null_syn.prep, tasks::LocaleLevel::State51, config, res),
                           tasks::run_state_characteristic_task(null_syn.prep, labels, config, res)};
    }();
    return runs;
}

void planted_recovery(Verdict& v) {
    const auto& r = planted_runs();
    v.expect(r.locale.accuracy >= 0.9, "state locale accuracy " + fixed(r.locale.accuracy));
    v.expect(r.chars.accuracy >= 0.9, "diabetes LOOCV accuracy " + fixed(r.chars.accuracy));
    v.expect(std::abs(r.null_locale.accuracy - 1.0 / 51.0) <= 0.10,
             "null locale accuracy " + fixed(r.null_locale.accuracy) + " vs 1/51");
    v.expect(std::abs(r.null_chars.accuracy - 26.0 / 51.0) <= 0.10,
             "null diabetes accuracy " + fixed(r.null_chars.accuracy) + " vs 26/51");
    v.note("locale", fixed(r.locale.accuracy));
    v.note("diabetes", fixed(r.chars.accuracy));
    v.note("null_locale", fixed(r.null_locale.accuracy));
    v.note("null_diabetes", fixed(r.null_chars.accuracy));
}

// ------------------------------------------------------------- LDA recovery

void lda_recovery(Verdict& v) {
    const auto planted = t4f::testing::planted_topic_corpus(200, 12, 42);
    const auto total = planted.total_tokens();
    topics::LdaParams p;
    p.num_topics = 2;
    p.iterations = 200;
    p.seed = 9;
    std::uint32_t sweeps = 0;
    bool conserved = true;
    const auto m = topics::train_lda(planted.docs, p, [&](std::uint32_t, const topics::TopicModel& model) {
        ++sweeps;
        std::uint64_t sum = 0;
        for (std::uint32_t k = 0; k < model.num_topics(); ++k) {
            std::uint64_t col = 0;
            for (std::uint32_t w = 0; w < model.vocab().size(); ++w) col += model.word_topic(w, k);
            conserved = conserved && col == model.topic_total(k);
            sum += col;
        }
        conserved = conserved && sum == total;
    });
    const double purity = t4f::testing::matched_purity(m, planted);
    v.expect(sweeps == 200, "observed " + std::to_string(sweeps) + " sweeps");
    v.expect(conserved, "count conservation broke during a sweep");
    v.expect(purity >= 0.9, "matched purity " + fixed(purity));
    v.note("purity", fixed(purity, 3));

    p.num_topics = 1;
    p.iterations = 20;
    const auto one = topics::train_lda(planted.docs, p);
    v.expect(one.topic_total(0) == total, "K=1 topic 0 holds " + std::to_string(one.topic_total(0)) + " of " +
                                              std::to_string(total) + " tokens");
    v.note("k1_tokens", std::to_string(one.topic_total(0)) + "/" + std::to_string(total));
}

// --------------------------------------------------------------- SVM oracle

learn::SparseVector dense(const std::vector<double>& values) {
    std::map<std::uint32_t, double> m;
    for (std::uint32_t i = 0; i < values.size(); ++i) m[i] = values[i];
    return learn::SparseVector::from_map(m, static_cast<std::uint32_t>(values.size()));
}

void svm_oracle(Verdict& v) {
    double worst = 0;
    for (std::uint64_t seed = 101; seed <= 110; ++seed) {
        Rng rng(seed);
        oracle::Matrix x;
        std::vector<int> y;
        do {
            x.assign(6, std::vector<double>(3));
            y.assign(6, 0);
            for (std::size_t i = 0; i < 6; ++i) {
                for (auto& f : x[i]) f = rng.uniform() * 4.0 - 2.0;
                y[i] = rng.bernoulli(0.5) ? 1 : -1;
            }
        } while (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 1) == 6);

        std::vector<learn::SparseVector> rows;
        for (const auto& r : x) rows.push_back(dense(r));
        learn::TrainingSet set;
        for (std::size_t i = 0; i < rows.size(); ++i) set.add(rows[i], y[i]);
        const auto model = learn::train_binary_svm(set);
        const double gap = learn::primal_objective(model, set) - oracle::svm_optimum_by_enumeration(x, y, 1.0);
        v.expect(gap >= -1e-9 && gap <= 1e-4, "seed " + std::to_string(seed) + " objective gap " + std::to_string(gap));
        worst = std::max(worst, std::abs(gap));
    }
    v.note("max_gap", worst);

    const auto pos = dense({1.0}), neg = dense({-1.0});
    learn::TrainingSet two;
    two.add(pos, 1);
    two.add(neg, -1);
    const auto m = learn::train_binary_svm(two);
    v.expect(std::abs(m.weights[0] - 1.0) <= 1e-6, "two-point w " + std::to_string(m.weights[0]));
    v.expect(std::abs(m.bias) <= 1e-6, "two-point b " + std::to_string(m.bias));
    v.note("two_point_w", fixed(m.weights[0], 7));
    v.note("b", fixed(m.bias, 7));
}

// ------------------------------------------------------- protocol invariants

text::PreparedCorpus prepare_tweets(std::vector<corpus::Tweet> tweets) {
    const auto& res = resources();
    auto raw = corpus::CorpusSnapshot::seal(std::move(tweets), io::Json::object());
    auto snap = std::make_shared<const corpus::CorpusSnapshot>(corpus::normalize(raw, res.gazetteer));
    return text::prepare(std::move(snap), res);
}

void protocol_invariants(Verdict& v) {
    const auto& res = resources();

    // LOOCV audit on the planted diabetes run.
    const auto& audit = planted_runs().chars.audit;
    std::set<std::string> held;
    bool leak = false;
    for (const auto& fold : audit.at("detail")) {
        leak = leak || fold.at("held_out_in_training").get<bool>() || fold.at("training_states").get<std::size_t>() != 50;
        held.insert(fold.at("held_out").get<std::string>());
    }
    v.expect(audit.at("passed").get<bool>() && !leak, "LOOCV audit reports a leak");
    v.expect(held.size() == 51 && audit.at("folds").get<std::size_t>() == 51,
             "LOOCV covered " + std::to_string(held.size()) + " states");
    v.note("loocv_folds", held.size());

    // Chronological split per locale, at every level.
    const auto& syn = t4f::testing::default_synthetic();
    auto config = default_task_config();
    config.bootstrap_iterations = 0;
    std::size_t locales = 0;
    for (auto level : {tasks::LocaleLevel::State51, tasks::LocaleLevel::City15, tasks::LocaleLevel::Region4}) {
        const auto r = tasks::run_locale_task(syn.prep, level, config, res);
        for (const auto& split : r.audit.at("locales")) {
            ++locales;
            v.expect(split.at("max_train_time").get<std::int64_t>() <= split.at("min_test_time").get<std::int64_t>(),
                     "time leak in " + split.at("locale").get<std::string>());
        }
    }
    v.note("chronological_locales", locales);

    // Duplicating every tweet: each group's scaled vector is unchanged on the shared vocabulary.
    const auto& small = t4f::testing::small_synthetic();
    std::vector<corpus::Tweet> doubled = small.snapshot().tweets();
    for (const auto& t : small.snapshot().tweets()) {
        auto copy = t;
        copy.id += "-dup";
        doubled.push_back(std::move(copy));
    }
    const auto prep2 = prepare_tweets(std::move(doubled));
    const auto groups1 = tasks::group_by_state(*small.prep.snapshot);
    const auto groups2 = tasks::group_by_state(*prep2.snapshot);
    std::vector<std::size_t> all1, all2;
    for (const auto& [s, idx] : groups1) all1.insert(all1.end(), idx.begin(), idx.end());
    for (const auto& [s, idx] : groups2) all2.insert(all2.end(), idx.begin(), idx.end());
    const tasks::TaskConfig feat_config;
    const auto ctx1 = tasks::build_features(small.prep, all1, feat_config, res.food_lexicon);
    const auto ctx2 = tasks::build_features(prep2, all2, feat_config, res.food_lexicon);
    std::size_t compared = 0;
    for (const auto& [state, idx] : groups1) {
        const auto a = learn::featurize_group(ctx1.docs, idx, *ctx1.space);
        const auto b = learn::featurize_group(ctx2.docs, groups2.at(state), *ctx2.space);
        for (const auto& [id, value] : a.entries()) {
            const auto other = ctx2.vocab->id(ctx1.vocab->token(id));
            const double got = other ? b.value(*other) : -1.0;
            v.expect(std::abs(got - value) <= 1e-12 * std::max(1.0, std::abs(value)),
                     state + "/" + ctx1.vocab->token(id) + " changed under duplication");
            ++compared;
        }
    }
    v.note("dup_features", compared);
}

// ------------------------------------------------------ bootstrap calibration

void bootstrap_calibration(Verdict& v) {
    const std::vector<std::string> gold = {"a", "b", "a", "b", "a", "a", "b", "b", "a", "b"};
    std::vector<std::string> wrong;
    for (const auto& g : gold) wrong.push_back(g == "a" ? "b" : "a");
    auto partial = gold;
    partial[0] = wrong[0];
    auto other = gold;
    for (std::size_t i = 3; i < 7; ++i) other[i] = wrong[i];

    const double same = tasks::bootstrap_significance(gold, partial, partial, 10000, 1);
    const double dominated = tasks::bootstrap_significance(gold, gold, wrong, 10000, 1);
    const double p1 = tasks::bootstrap_significance(gold, partial, other, 10000, 42);
    const double p2 = tasks::bootstrap_significance(gold, partial, other, 10000, 42);
    v.expect(same == 1.0, "identical predictions p=" + std::to_string(same));
    v.expect(dominated == 0.0, "strict dominance p=" + std::to_string(dominated));
    v.expect(p1 == p2, "repeat with fixed seed differs");
    const double exact = oracle::exact_bootstrap_p(gold.size(), 4, 1);
    v.expect(std::abs(p1 - exact) <= 4 * std::sqrt(exact * (1 - exact) / 10000) + 1e-4,
             "p=" + std::to_string(p1) + " exact=" + std::to_string(exact));
    v.note("identical", same);
    v.note("dominance", dominated);
    v.note("seeded_p", p1);
    v.note("exact_p", fixed(exact));
}

// ---------------------------------------------- tf-idf and query conservation

text::PreparedCorpus random_subcorpus(std::size_t n, std::uint64_t seed) {
    const auto& all = t4f::testing::default_synthetic().snapshot().tweets();
    Rng rng(seed);
    std::set<std::size_t> picked;
    while (picked.size() < n) picked.insert(rng.below(all.size()));
    std::vector<corpus::Tweet> tweets;
    for (auto i : picked) tweets.push_back(all[i]);
    return prepare_tweets(std::move(tweets));
}

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) return true;
    return false;
}

void tfidf_and_conservation(Verdict& v) {
    const auto& res = resources();
    std::size_t states_checked = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto prep = random_subcorpus(150 * seed + 100, 500 + seed);
        for (auto mode : {text::VocabMode::Food, text::VocabMode::AllWords, text::VocabMode::Hashtags}) {
            std::map<std::string, std::vector<std::string>> pools;
            for (std::size_t i = 0; i < prep.snapshot->size(); ++i) {
                const auto& loc = prep.snapshot->location(i);
                if (!loc) continue;
                for (const auto& t : prep.filtered[i])
                    if (text::in_mode(t, mode, res.food_lexicon)) pools[loc->state].push_back(t);
            }
            const auto expected = oracle::naive_top_terms(pools, 51.0);
            const auto got = analytics::rank_terms_tfidf(prep, mode, res);
            v.expect(got.top.size() == expected.size(), "ranked state count differs");
            for (const auto& [state, want] : expected) {
                const auto it = got.top.find(state);
                const bool same = it != got.top.end() && it->second.term == want.term &&
                                  it->second.score == want.score && it->second.tf == want.tf && it->second.df == want.df;
                v.expect(same, "tf-idf mismatch for " + state);
                ++states_checked;
            }
        }
    }
    v.note("tfidf_states", states_checked);

    const auto& syn = t4f::testing::default_synthetic();
    const auto& gaz = res.gazetteer;
    const auto& tweets = syn.snapshot().tweets();
    Rng rng(2718);
    std::vector<std::string> phrases = {"zzqx never seen", "brunch", "work", "grits"};
    while (phrases.size() < 100) {
        const auto& toks = syn.prep.cleaned[rng.below(syn.prep.cleaned.size())];
        if (toks.empty()) continue;
        const auto len = 1 + rng.below(std::min<std::size_t>(3, toks.size()));
        const auto start = rng.below(toks.size() - len + 1);
        std::string p;
        for (std::size_t k = 0; k < len; ++k) p += (k ? " " : "") + toks[start + k];
        phrases.push_back(p);
    }
    const analytics::Granularity grans[] = {analytics::Granularity::Hour, analytics::Granularity::Weekday,
                                            analytics::Granularity::Month};
    const double cells[] = {0.1, 0.25, 0.5, 1.0};
    std::size_t matched = 0;
    for (std::size_t p = 0; p < phrases.size(); ++p) {
        const auto needle = text::clean(text::tokenize(phrases[p]));
        std::size_t tz = 0, geo = 0;
        for (std::size_t i = 0; i < tweets.size(); ++i) {
            if (!contains_sequence(syn.prep.cleaned[i], needle)) continue;
            tz += tweets[i].user_timezone && gaz.tz_offset(*tweets[i].user_timezone);
            geo += tweets[i].geo.has_value();
        }
        const auto h = analytics::temporal_histogram(syn.prep, phrases[p], grans[p % 3], gaz);
        std::size_t bins = 0;
        for (auto n : h.counts) bins += n;
        v.expect(bins == h.total && h.total == tz, "histogram for '" + phrases[p] + "' sums to " +
                                                       std::to_string(bins) + ", expected " + std::to_string(tz));
        const auto g = analytics::heatmap_bins(syn.prep, analytics::HeatQuery{phrases[p], std::nullopt}, cells[p % 4]);
        std::size_t cells_sum = 0;
        for (const auto& [idx, n] : g.cells) cells_sum += n;
        v.expect(cells_sum == g.total && g.total == geo, "heatmap for '" + phrases[p] + "' sums to " +
                                                             std::to_string(cells_sum) + ", expected " + std::to_string(geo));
        matched += tz;
    }
    v.note("phrases", phrases.size());
    v.note("histogram_matches", matched);
}

// ------------------------------------------------------------ word clouds

void wordcloud_layout(Verdict& v) {
    const auto& docs = t4f::testing::default_synthetic().prep.filtered;
    Rng rng(31337);
    std::size_t placed = 0, shared = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<std::string>> a, b;
        const auto na = 20 + rng.below(400), nb = 20 + rng.below(400);
        for (std::uint64_t i = 0; i < na; ++i) a.push_back(docs[rng.below(docs.size())]);
        for (std::uint64_t i = 0; i < nb; ++i) b.push_back(docs[rng.below(docs.size())]);
        const auto pair = analytics::parallel_wordclouds(a, b, 5 + rng.below(60), static_cast<std::uint64_t>(trial));
        const std::string tag = "trial " + std::to_string(trial) + ": ";
        for (const auto* cloud : {&pair.a, &pair.b}) {
            placed += cloud->words.size();
            for (std::size_t i = 0; i < cloud->words.size(); ++i)
                for (std::size_t j = i + 1; j < cloud->words.size(); ++j)
                    v.expect(!cloud->words[i].overlaps(cloud->words[j]),
                             tag + cloud->words[i].word + " overlaps " + cloud->words[j].word);
        }
        for (const auto& w : pair.a.words) {
            const auto* twin = pair.b.find(w.word);
            if (!twin) continue;
            ++shared;
            v.expect(twin->x == w.x && twin->y == w.y, tag + "shared word " + w.word + " moved");
        }
    }
    v.note("pairs", 20);
    v.note("words", placed);
    v.note("shared", shared);
}

// ---------------------------------------------------------- gateway contract

void gateway_contract(Verdict& v) {
    using namespace t4f::testing;
    const auto& f = fixture();
    std::set<std::string> covered;
    std::size_t bad_requests = 0, requests = 0;
    for (const auto& req : recorded_requests()) {
        const auto path = req.at("path").get<std::string>();
        const auto params = to_params(req.at("params"));
        const int want = req.at("status");
        const auto r = f.service->handle(path, params);
        ++requests;
        const std::string tag = path + " " + req.at("params").dump();
        v.expect(r.status == want, tag + " status " + std::to_string(r.status));
        if (want == 200) {
            v.expect(r.body == library_body(*f.state, path, params), tag + " body differs from the library call");
            covered.insert(path.substr(0, path.find('/', 5)));
        } else {
            bad_requests += want == 400;
            v.expect(io::Json::parse(r.body).contains("error"), tag + " error body");
        }
    }
    v.expect(covered.size() == 7, "covered " + std::to_string(covered.size()) + " of 7 endpoint groups");
    v.expect(bad_requests > 0, "no invalid-parameter requests recorded");
    v.note("requests", requests);
    v.note("endpoints", covered.size());
    v.note("rejected_400", bad_requests);
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"baseline-arithmetic", 1.0, baseline_arithmetic},
        {"planted-signal-recovery", 120.0, planted_recovery},
        {"lda-recovery", 30.0, lda_recovery},
        {"svm-oracle", 0, svm_oracle},
        {"protocol-invariants", 0, protocol_invariants},
        {"bootstrap-calibration", 0, bootstrap_calibration},
        {"tfidf-and-conservation", 0, tfidf_and_conservation},
        {"wordcloud-layout", 0, wordcloud_layout},
        {"gateway-contract", 0, gateway_contract},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(v);
        } catch (const std::exception& e) {
            v.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0)
            v.expect(secs < c.budget_seconds, "took " + fixed(secs, 2) + "s, budget " + fixed(c.budget_seconds, 0) + "s");
        failed += !v.passed();
        std::cout << (v.passed() ? "PASS" : "FAIL") << "  " << c.name << "  " << fixed(secs, 2) << "s  " << v.text()
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
