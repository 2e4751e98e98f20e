#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "t4f/corpus.hpp"
#include "t4f/io.hpp"
#include "t4f/learn.hpp"
#include "t4f/pipeline.hpp"
#include "t4f/resources.hpp"
#include "t4f/text.hpp"
#include "t4f/topics.hpp"

namespace t4f::tasks {

using io::Json;

/// Binary state labels read from labels_<name>.csv (state,label,<value column>).
struct StateLabelSet {
    std::string name;
    std::map<std::string, std::string> labels;  // state code -> label
    std::vector<std::string> classes;            // the two labels, lexicographic
    /// Median of the value column, the threshold the labels were cut at.
    double median = 0;
    std::string value_column;

    /// Validates 51 entries, two classes with 25/26 members, and labels consistent with the median.
    static StateLabelSet load(const std::filesystem::path& csv, std::string name);
    /// labels_<name>.csv under data_dir; name is overweight, diabetes or political.
    static StateLabelSet load_named(const std::filesystem::path& data_dir, const std::string& name);

    /// Larger class; a tie goes to the lexicographically first label.
    std::string majority_class() const;
    double majority_baseline() const;
};

struct TaskConfig {
    text::VocabMode feature_mode = text::VocabMode::AllWords;
    bool use_lda = false;
    topics::LdaParams lda;
    std::uint32_t fold_in_iterations = 20;
    learn::SvmOptions svm;
    double train_fraction = 1.0;
    double test_fraction = 1.0;
    std::uint64_t seed = 42;
    std::uint32_t bootstrap_iterations = 10000;
    std::size_t top_k = 20;

    /// Throws t4f::Error when a fraction is outside (0, 1] or a count is zero.
    void validate() const;
    Json to_json() const;
};

enum class LocaleLevel { City15, State51, Region4 };

std::string_view to_string(LocaleLevel level);
/// Accepts city, state, region (and city15, state51, region4).
std::optional<LocaleLevel> parse_locale_level(std::string_view s);

struct InstanceResult {
    std::string instance;
    std::string gold;
    std::string predicted;
    std::string baseline;
};

struct TaskResult {
    std::string task;
    Json config;
    double accuracy = 0;
    double baseline = 0;
    std::size_t correct = 0;
    std::vector<InstanceResult> per_instance;
    std::optional<double> p_value;
    std::map<std::string, std::vector<learn::FeatureDescriptor>> top_features;
    double runtime_seconds = 0;
    /// Protocol audit (LOOCV folds or chronological split bounds).
    Json audit;

    Json to_json() const;
};

/// Vocabulary, feature space and optional topic assignments shared by all folds of a task.
struct FeatureContext {
    /// Filtered tokens restricted to the feature mode, aligned with the snapshot.
    std::vector<std::vector<std::string>> docs;
    std::shared_ptr<const text::Vocabulary> vocab;
    std::shared_ptr<const learn::FeatureSpace> space;
    std::optional<topics::TopicModel> model;
    /// Top topic per tweet; empty without LDA.
    std::vector<std::uint32_t> topic_of;

    const std::vector<std::uint32_t>* topics() const { return topic_of.empty() ? nullptr : &topic_of; }
};

/// Builds the vocabulary (and the LDA model when enabled) over the tweets in `participants`.
FeatureContext build_features(const text::PreparedCorpus& prep, std::span<const std::size_t> participants,
                              const TaskConfig& config, const text::WordSet& food_lexicon);

/// Tweet indices grouped by state code, for tweets with a normalized location.
std::map<std::string, std::vector<std::size_t>> group_by_state(const corpus::CorpusSnapshot& snapshot);

/// Leave-one-state-out evaluation of a binary state label. Throws listing any state without tweets.
TaskResult run_state_characteristic_task(const text::PreparedCorpus& prep, const StateLabelSet& labels,
                                         const TaskConfig& config, const Resources& res);

/// Per-locale chronological 80/20 split; one pooled instance per locale on each side.
TaskResult run_locale_task(const text::PreparedCorpus& prep, LocaleLevel level, const TaskConfig& config,
                           const Resources& res);

/// Minimum tweets a locale needs to take part in the locale task.
inline constexpr std::size_t kMinLocaleTweets = 5;

/// One-tailed paired bootstrap: fraction of resamples in which the baseline is
/// at least as accurate as the model.
double bootstrap_significance(std::span<const std::string> gold, std::span<const std::string> model_preds,
                              std::span<const std::string> baseline_preds, std::uint32_t iterations = 10000,
                              std::uint64_t seed = 0);

struct LearningCurve {
    std::vector<double> fractions;
    /// accuracy[i][j]: train fraction i, test fraction j.
    std::vector<std::vector<double>> accuracy;

    Json to_json() const;
};

LearningCurve learning_curve(const text::PreparedCorpus& prep, LocaleLevel level, const TaskConfig& config,
                             std::span<const double> fractions, const Resources& res);

}  // namespace t4f::tasks
