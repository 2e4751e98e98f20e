#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "t4f/io.hpp"
#include "t4f/text.hpp"

namespace t4f::learn {

/// Sparse instance: (feature id, value) pairs sorted by id, zeros never stored.
class SparseVector {
public:
    using Entry = std::pair<std::uint32_t, double>;

    SparseVector() = default;
    explicit SparseVector(std::uint32_t dimension) : dimension_(dimension) {}
    /// Drops zeros; throws if an id is >= dimension.
    static SparseVector from_map(const std::map<std::uint32_t, double>& values, std::uint32_t dimension);

    std::uint32_t dimension() const { return dimension_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t nonzeros() const { return entries_.size(); }
    double value(std::uint32_t id) const;
    double squared_norm() const;
    double dot(std::span<const double> dense) const;

    bool operator==(const SparseVector&) const = default;

private:
    std::uint32_t dimension_ = 0;
    std::vector<Entry> entries_;
};

/// Word features occupy ids [0, |V|); topic k is feature |V| + k.
class FeatureSpace {
public:
    FeatureSpace(std::shared_ptr<const text::Vocabulary> vocab, std::uint32_t num_topics,
                 std::vector<std::string> topic_names = {});

    const text::Vocabulary& vocab() const { return *vocab_; }
    std::uint32_t num_topics() const { return num_topics_; }
    std::uint32_t dimension() const { return static_cast<std::uint32_t>(vocab_->size()) + num_topics_; }
    std::uint32_t topic_feature(std::uint32_t topic) const { return static_cast<std::uint32_t>(vocab_->size()) + topic; }
    bool is_topic(std::uint32_t id) const { return id >= vocab_->size(); }
    /// Word, or "TOPIC_<k>" followed by its name in parentheses when one is known.
    std::string name(std::uint32_t id) const;
    const std::string& hash() const { return hash_; }

private:
    std::shared_ptr<const text::Vocabulary> vocab_;
    std::uint32_t num_topics_;
    std::vector<std::string> topic_names_;
    std::string hash_;
};

/// Sums word counts over the member tweets, adds one count per tweet to the
/// feature of its top topic (when `topic_of` is given), then divides every value
/// by the number of tweets. Out-of-vocabulary words are ignored.
SparseVector featurize_group(std::span<const std::vector<std::string>> docs, std::span<const std::size_t> members,
                             const FeatureSpace& space, const std::vector<std::uint32_t>* topic_of = nullptr);
/// Convenience form: every document is a member.
SparseVector featurize_group(std::span<const std::vector<std::string>> docs, const FeatureSpace& space,
                             const std::vector<std::uint32_t>* topic_of = nullptr);

struct LinearModel {
    std::vector<double> weights;  // one per feature
    double bias = 0;
    double C = 1;
    std::string feature_space_hash;

    double decision(const SparseVector& x) const { return x.dot(weights) + bias; }
    /// +1 when decision >= 0.
    int predict(const SparseVector& x) const { return decision(x) >= 0 ? 1 : -1; }
};

struct SvmOptions {
    double C = 1.0;
    /// Stop once the largest projected-gradient violation of an epoch is below this.
    double tolerance = 1e-4;
    std::uint32_t max_epochs = 1000;
};

struct SvmReport {
    std::vector<double> dual;  // one per instance
    std::uint32_t epochs = 0;
    double max_violation = 0;
    bool converged = false;
};

/// Instances by reference plus labels in {-1, +1}.
struct TrainingSet {
    std::vector<const SparseVector*> x;
    std::vector<int> y;

    void add(const SparseVector& v, int label) {
        x.push_back(&v);
        y.push_back(label);
    }
    std::size_t size() const { return x.size(); }
};

/// L2-regularized hinge-loss SVM by dual coordinate descent with sequential
/// sweeps; the bias is an extra always-1 feature and is regularized with w.
LinearModel train_binary_svm(const TrainingSet& data, const SvmOptions& options = {}, SvmReport* report = nullptr,
                             std::string feature_space_hash = {});

/// 1/2 (|w|^2 + b^2) + C * sum hinge, the quantity train_binary_svm minimizes.
double primal_objective(const LinearModel& model, const TrainingSet& data);

struct MultiClassModel {
    std::vector<std::string> classes;
    std::vector<LinearModel> models;  // models[i] separates classes[i] from the rest

    std::vector<double> decisions(const SparseVector& x) const;
    /// Index into `classes` of the largest decision value; ties to the first class.
    std::size_t predict_index(const SparseVector& x) const;
    const std::string& predict(const SparseVector& x) const { return classes[predict_index(x)]; }
};

/// One-vs-rest over `classes` (in the given order). Throws if fewer than two
/// classes are given, a label is not listed, or a class has no instances.
MultiClassModel train_ovr_svm(std::span<const SparseVector* const> xs, std::span<const std::string> labels,
                              std::vector<std::string> classes, const SvmOptions& options = {},
                              std::string feature_space_hash = {});
/// Classes are the distinct labels in lexicographic order.
MultiClassModel train_ovr_svm(std::span<const SparseVector* const> xs, std::span<const std::string> labels,
                              const SvmOptions& options = {}, std::string feature_space_hash = {});

enum class WeightSign { Positive, Negative };

struct FeatureDescriptor {
    std::uint32_t id = 0;
    std::string name;
    double weight = 0;
};

/// Up to k features with the largest positive (or most negative) weights, by |weight|
/// descending, ties by id. Zero weights are never listed.
std::vector<FeatureDescriptor> top_weighted_features(const LinearModel& model, WeightSign sign, std::size_t k,
                                                     const FeatureSpace& space);

io::Json to_json(const LinearModel& model);
io::Json to_json(const MultiClassModel& model);

}  // namespace t4f::learn
