#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "t4f/io.hpp"
#include "t4f/text.hpp"

namespace t4f::topics {

struct LdaParams {
    std::uint32_t num_topics = 200;
    /// Per-topic document prior; <= 0 means 5 / num_topics.
    double alpha = 0;
    double beta = 0.01;
    std::uint32_t iterations = 1000;
    std::uint64_t seed = 0;

    double effective_alpha() const { return alpha > 0 ? alpha : 5.0 / num_topics; }
};

struct WordCount {
    std::string word;
    std::uint32_t count = 0;

    bool operator==(const WordCount&) const = default;
};

/// Word-topic counts of a trained model. Immutable once returned by train_lda.
class TopicModel {
public:
    TopicModel(std::uint32_t num_topics, double alpha, double beta, std::uint64_t seed, text::Vocabulary vocab);

    std::uint32_t num_topics() const { return num_topics_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    std::uint64_t seed() const { return seed_; }
    const text::Vocabulary& vocab() const { return vocab_; }

    std::uint32_t word_topic(std::uint32_t word, std::uint32_t topic) const {
        return word_topic_[static_cast<std::size_t>(word) * num_topics_ + topic];
    }
    std::uint64_t topic_total(std::uint32_t topic) const { return topic_totals_[topic]; }
    const std::vector<std::uint32_t>& word_topic_counts() const { return word_topic_; }
    const std::vector<std::uint64_t>& topic_totals() const { return topic_totals_; }
    std::uint64_t total_tokens() const;

    /// Smoothed p(word | topic) over the vocabulary.
    std::vector<double> word_distribution(std::uint32_t topic) const;
    /// Topic with the most tokens; ties go to the lowest id.
    std::uint32_t largest_topic() const;

    std::string serialize() const;
    static TopicModel deserialize(std::string_view bytes);
    void save(const std::filesystem::path& path) const;
    static TopicModel load(const std::filesystem::path& path);

    /// Sidecar for human labeling: top `n` words per topic.
    io::Json summary_json(std::size_t n = 20) const;

private:
    friend class GibbsSampler;

    std::uint32_t num_topics_;
    double alpha_;
    double beta_;
    std::uint64_t seed_;
    text::Vocabulary vocab_;
    std::vector<std::uint32_t> word_topic_;  // |V| x K, row-major by word
    std::vector<std::uint64_t> topic_totals_;
};

/// Called after each full sweep with the zero-based sweep index.
using SweepObserver = std::function<void(std::uint32_t sweep, const TopicModel&)>;

/// Collapsed Gibbs sampling. Empty documents are skipped; throws if none remain.
TopicModel train_lda(std::span<const std::vector<std::string>> docs, const LdaParams& params,
                     const SweepObserver& observer = {});

struct TopicAssignment {
    std::string tweet_id;
    std::uint32_t topic = 0;
};

/// Fold-in Gibbs with frozen word-topic counts; returns argmax_k (n_dk + alpha),
/// ties to the lowest id. A document without in-vocabulary tokens gets the largest topic.
std::uint32_t infer_top_topic(const TopicModel& model, std::span<const std::string> doc,
                              std::uint32_t fold_in_iterations = 20, std::uint64_t seed = 0);

/// infer_top_topic over many documents; document i uses a seed derived from (seed, i).
std::vector<std::uint32_t> infer_top_topics(const TopicModel& model, std::span<const std::vector<std::string>> docs,
                                            std::uint32_t fold_in_iterations = 20, std::uint64_t seed = 0);

/// Highest-count words of `topic` (nonzero counts only), ties in lexicographic order.
std::vector<WordCount> top_words(const TopicModel& model, std::uint32_t topic, std::size_t n);

}  // namespace t4f::topics
