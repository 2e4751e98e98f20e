#include "t4f/topics.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <set>

#include "t4f/error.hpp"
#include "t4f/rng.hpp"

namespace t4f::topics {

namespace {

constexpr char kMagic[4] = {'T', '4', 'F', 'L'};
constexpr std::uint32_t kVersion = 1;

// Draws from unnormalized weights held in `cumulative` (prefix sums).
std::uint32_t draw(const std::vector<double>& cumulative, Rng& rng) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) return static_cast<std::uint32_t>(cumulative.size() - 1);
    return static_cast<std::uint32_t>(it - cumulative.begin());
}

}  // namespace

TopicModel::TopicModel(std::uint32_t num_topics, double alpha, double beta, std::uint64_t seed, text::Vocabulary vocab)
    : num_topics_(num_topics), alpha_(alpha), beta_(beta), seed_(seed), vocab_(std::move(vocab)) {
    if (num_topics_ < 1) throw Error("lda: number of topics must be >= 1");
    if (!(alpha_ > 0) || !(beta_ > 0)) throw Error("lda: priors must be positive");
    word_topic_.assign(vocab_.size() * num_topics_, 0);
    topic_totals_.assign(num_topics_, 0);
}

std::uint64_t TopicModel::total_tokens() const {
    return std::accumulate(topic_totals_.begin(), topic_totals_.end(), std::uint64_t{0});
}

std::vector<double> TopicModel::word_distribution(std::uint32_t topic) const {
    if (topic >= num_topics_) throw Error("topic out of range");
    const double denom = static_cast<double>(topic_totals_[topic]) + static_cast<double>(vocab_.size()) * beta_;
    std::vector<double> p(vocab_.size());
    for (std::uint32_t w = 0; w < vocab_.size(); ++w) p[w] = (word_topic(w, topic) + beta_) / denom;
    return p;
}

std::uint32_t TopicModel::largest_topic() const {
    return static_cast<std::uint32_t>(std::max_element(topic_totals_.begin(), topic_totals_.end()) -
                                      topic_totals_.begin());
}

/// Holds the per-token assignment state during training.
class GibbsSampler {
public:
    GibbsSampler(TopicModel& model, std::vector<std::vector<std::uint32_t>> docs, std::uint64_t seed)
        : model_(model), docs_(std::move(docs)), rng_(seed) {
        const auto K = model_.num_topics_;
        assignments_.resize(docs_.size());
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            assignments_[d].resize(docs_[d].size());
            for (std::size_t i = 0; i < docs_[d].size(); ++i) {
                const auto k = static_cast<std::uint32_t>(rng_.below(K));
                assignments_[d][i] = k;
                ++model_.word_topic_[static_cast<std::size_t>(docs_[d][i]) * K + k];
                ++model_.topic_totals_[k];
            }
        }
    }

    void sweep() {
        const auto K = model_.num_topics_;
        const double alpha = model_.alpha_;
        const double beta = model_.beta_;
        const double vbeta = static_cast<double>(model_.vocab_.size()) * beta;
        std::vector<std::uint32_t> doc_topic(K);
        std::vector<double> cumulative(K);
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            const auto& words = docs_[d];
            auto& z = assignments_[d];
            std::fill(doc_topic.begin(), doc_topic.end(), 0);
            for (auto k : z) ++doc_topic[k];
            for (std::size_t i = 0; i < words.size(); ++i) {
                const std::size_t row = static_cast<std::size_t>(words[i]) * K;
                const auto old = z[i];
                --doc_topic[old];
                --model_.word_topic_[row + old];
                --model_.topic_totals_[old];
                double acc = 0;
                for (std::uint32_t k = 0; k < K; ++k) {
                    acc += (doc_topic[k] + alpha) * (model_.word_topic_[row + k] + beta) /
                           (static_cast<double>(model_.topic_totals_[k]) + vbeta);
                    cumulative[k] = acc;
                }
                const auto fresh = draw(cumulative, rng_);
                z[i] = fresh;
                ++doc_topic[fresh];
                ++model_.word_topic_[row + fresh];
                ++model_.topic_totals_[fresh];
            }
        }
    }

private:
    TopicModel& model_;
    std::vector<std::vector<std::uint32_t>> docs_;
    std::vector<std::vector<std::uint32_t>> assignments_;
    Rng rng_;
};

TopicModel train_lda(std::span<const std::vector<std::string>> docs, const LdaParams& params,
                     const SweepObserver& observer) {
    if (params.num_topics < 1) throw Error("lda: number of topics must be >= 1");
    if (params.iterations < 1) throw Error("lda: iterations must be >= 1");
    std::set<std::string> words;
    std::size_t total = 0;
    for (const auto& d : docs) {
        words.insert(d.begin(), d.end());
        total += d.size();
    }
    if (total == 0) throw Error("lda: no documents with tokens");
    if (params.num_topics > total)
        std::clog << "warning: lda: " << params.num_topics << " topics exceed the " << total << " training tokens\n";

    TopicModel model(params.num_topics, params.effective_alpha(), params.beta, params.seed,
                     text::Vocabulary(text::VocabMode::AllWords, {words.begin(), words.end()}));
    std::vector<std::vector<std::uint32_t>> ids;
    ids.reserve(docs.size());
    for (const auto& d : docs) {
        if (d.empty()) continue;
        std::vector<std::uint32_t> row;
        row.reserve(d.size());
        for (const auto& w : d) row.push_back(*model.vocab().id(w));
        ids.push_back(std::move(row));
    }
    GibbsSampler sampler(model, std::move(ids), params.seed);
    for (std::uint32_t it = 0; it < params.iterations; ++it) {
        sampler.sweep();
        if (observer) observer(it, model);
    }
    return model;
}

std::uint32_t infer_top_topic(const TopicModel& model, std::span<const std::string> doc,
                              std::uint32_t fold_in_iterations, std::uint64_t seed) {
    std::vector<std::uint32_t> words;
    for (const auto& w : doc)
        if (auto id = model.vocab().id(w)) words.push_back(*id);
    if (words.empty()) return model.largest_topic();

    const auto K = model.num_topics();
    const double alpha = model.alpha();
    const double beta = model.beta();
    const double vbeta = static_cast<double>(model.vocab().size()) * beta;
    Rng rng(seed);
    std::vector<std::uint32_t> z(words.size());
    std::vector<std::uint32_t> doc_topic(K, 0);
    for (auto& k : z) {
        k = static_cast<std::uint32_t>(rng.below(K));
        ++doc_topic[k];
    }
    std::vector<double> cumulative(K);
    for (std::uint32_t it = 0; it < fold_in_iterations; ++it) {
        for (std::size_t i = 0; i < words.size(); ++i) {
            --doc_topic[z[i]];
            double acc = 0;
            for (std::uint32_t k = 0; k < K; ++k) {
                acc += (doc_topic[k] + alpha) * (model.word_topic(words[i], k) + beta) /
                       (static_cast<double>(model.topic_total(k)) + vbeta);
                cumulative[k] = acc;
            }
            z[i] = draw(cumulative, rng);
            ++doc_topic[z[i]];
        }
    }
    return static_cast<std::uint32_t>(std::max_element(doc_topic.begin(), doc_topic.end()) - doc_topic.begin());
}

std::vector<std::uint32_t> infer_top_topics(const TopicModel& model, std::span<const std::vector<std::string>> docs,
                                            std::uint32_t fold_in_iterations, std::uint64_t seed) {
    std::vector<std::uint32_t> out;
    out.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        out.push_back(infer_top_topic(model, docs[i], fold_in_iterations, mix_seed(seed, i)));
    return out;
}

std::vector<WordCount> top_words(const TopicModel& model, std::uint32_t topic, std::size_t n) {
    if (topic >= model.num_topics()) throw Error("topic out of range");
    std::vector<WordCount> all;
    for (std::uint32_t w = 0; w < model.vocab().size(); ++w)
        if (const auto c = model.word_topic(w, topic); c > 0) all.push_back({model.vocab().token(w), c});
    const auto keep = std::min(n, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      [](const WordCount& a, const WordCount& b) {
                          return a.count != b.count ? a.count > b.count : a.word < b.word;
                      });
    all.resize(keep);
    return all;
}

std::string TopicModel::serialize() const {
    io::BinaryWriter w;
    w.raw(std::string_view(kMagic, 4));
    w.u32(kVersion);
    w.u32(num_topics_);
    w.f64(alpha_);
    w.f64(beta_);
    w.u64(seed_);
    w.str(vocab_.hash());
    w.u8(static_cast<std::uint8_t>(vocab_.mode()));
    w.u32(static_cast<std::uint32_t>(vocab_.size()));
    for (const auto& t : vocab_.tokens()) w.str(t);
    for (auto c : word_topic_) w.u32(c);
    for (auto c : topic_totals_) w.u64(c);
    return w.bytes();
}

TopicModel TopicModel::deserialize(std::string_view bytes) {
    io::BinaryReader r(bytes);
    if (r.take(4) != std::string_view(kMagic, 4)) throw Error("topic model: bad magic");
    if (r.u32() != kVersion) throw Error("topic model: unsupported version");
    const auto K = r.u32();
    const double alpha = r.f64();
    const double beta = r.f64();
    const auto seed = r.u64();
    const auto hash = r.str();
    const auto mode = r.u8();
    if (mode > 3) throw Error("topic model: bad vocabulary mode");
    const auto V = r.u32();
    std::vector<std::string> tokens;
    tokens.reserve(V);
    for (std::uint32_t i = 0; i < V; ++i) tokens.push_back(r.str());
    TopicModel m(K, alpha, beta, seed, text::Vocabulary(static_cast<text::VocabMode>(mode), std::move(tokens)));
    if (m.vocab_.hash() != hash) throw Error("topic model: vocabulary hash mismatch");
    for (auto& c : m.word_topic_) c = r.u32();
    for (auto& c : m.topic_totals_) c = r.u64();
    for (std::uint32_t k = 0; k < K; ++k) {
        std::uint64_t sum = 0;
        for (std::uint32_t w = 0; w < V; ++w) sum += m.word_topic(w, k);
        if (sum != m.topic_totals_[k]) throw Error("topic model: counts do not sum to topic totals");
    }
    return m;
}

void TopicModel::save(const std::filesystem::path& path) const { io::write_file(path, serialize()); }

TopicModel TopicModel::load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }

io::Json TopicModel::summary_json(std::size_t n) const {
    io::Json topics = io::Json::array();
    for (std::uint32_t k = 0; k < num_topics_; ++k) {
        io::Json words = io::Json::array();
        for (const auto& wc : top_words(*this, k, n)) words.push_back({{"word", wc.word}, {"count", wc.count}});
        topics.push_back({{"id", k}, {"total", topic_totals_[k]}, {"top_words", words}});
    }
    return {{"num_topics", num_topics_}, {"alpha", alpha_},       {"beta", beta_},
            {"seed", seed_},             {"vocab_hash", vocab_.hash()}, {"topics", topics}};
}

}  // namespace t4f::topics
