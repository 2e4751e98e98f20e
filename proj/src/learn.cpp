#include "t4f/learn.hpp"

#include <algorithm>
#include <cmath>

#include "t4f/error.hpp"

namespace t4f::learn {

SparseVector SparseVector::from_map(const std::map<std::uint32_t, double>& values, std::uint32_t dimension) {
    SparseVector v(dimension);
    v.entries_.reserve(values.size());
    for (const auto& [id, val] : values) {
        if (id >= dimension) throw Error("sparse vector: feature id " + std::to_string(id) + " out of range");
        if (val != 0) v.entries_.emplace_back(id, val);
    }
    return v;
}

double SparseVector::value(std::uint32_t id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const Entry& e, std::uint32_t key) { return e.first < key; });
    return it != entries_.end() && it->first == id ? it->second : 0.0;
}

double SparseVector::squared_norm() const {
    double s = 0;
    for (const auto& [_, v] : entries_) s += v * v;
    return s;
}

double SparseVector::dot(std::span<const double> dense) const {
    double s = 0;
    for (const auto& [id, v] : entries_) s += v * dense[id];
    return s;
}

FeatureSpace::FeatureSpace(std::shared_ptr<const text::Vocabulary> vocab, std::uint32_t num_topics,
                           std::vector<std::string> topic_names)
    : vocab_(std::move(vocab)), num_topics_(num_topics), topic_names_(std::move(topic_names)) {
    if (!vocab_) throw Error("feature space: missing vocabulary");
    hash_ = io::sha256_hex(vocab_->hash() + "/topics=" + std::to_string(num_topics_));
}

std::string FeatureSpace::name(std::uint32_t id) const {
    if (id < vocab_->size()) return vocab_->token(id);
    const auto k = id - static_cast<std::uint32_t>(vocab_->size());
    if (k >= num_topics_) throw Error("feature space: id out of range");
    std::string out = "TOPIC_" + std::to_string(k);
    if (k < topic_names_.size() && !topic_names_[k].empty()) out += " (" + topic_names_[k] + ")";
    return out;
}

SparseVector featurize_group(std::span<const std::vector<std::string>> docs, std::span<const std::size_t> members,
                             const FeatureSpace& space, const std::vector<std::uint32_t>* topic_of) {
    if (members.empty()) throw Error("empty group");
    std::map<std::uint32_t, double> counts;
    for (const auto m : members) {
        for (const auto& tok : docs[m])
            if (auto id = space.vocab().id(tok)) counts[*id] += 1;
        if (topic_of && space.num_topics() > 0) {
            const auto k = (*topic_of)[m];
            if (k >= space.num_topics()) throw Error("featurize: topic id out of range");
            counts[space.topic_feature(k)] += 1;
        }
    }
    const double n = static_cast<double>(members.size());
    for (auto& [_, v] : counts) v /= n;
    return SparseVector::from_map(counts, space.dimension());
}

SparseVector featurize_group(std::span<const std::vector<std::string>> docs, const FeatureSpace& space,
                             const std::vector<std::uint32_t>* topic_of) {
    std::vector<std::size_t> all(docs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return featurize_group(docs, all, space, topic_of);
}

LinearModel train_binary_svm(const TrainingSet& data, const SvmOptions& options, SvmReport* report,
                             std::string feature_space_hash) {
    const std::size_t n = data.size();
    if (n == 0 || data.y.size() != n) throw Error("svm: empty or inconsistent training set");
    if (!(options.C > 0)) throw Error("svm: C must be positive");
    bool pos = false, neg = false;
    std::uint32_t dim = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (data.y[i] == 1)
            pos = true;
        else if (data.y[i] == -1)
            neg = true;
        else
            throw Error("svm: labels must be -1 or +1");
        if (i == 0)
            dim = data.x[i]->dimension();
        else if (data.x[i]->dimension() != dim)
            throw Error("svm: instances have different dimensions");
    }
    if (!pos || !neg) throw Error("degenerate labels");

    const double C = options.C;
    std::vector<double> w(dim, 0.0);
    double b = 0;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) qd[i] = data.x[i]->squared_norm() + 1.0;

    SvmReport rep;
    for (std::uint32_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        double max_violation = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const SparseVector& x = *data.x[i];
            const double y = data.y[i];
            const double g = y * (x.dot(w) + b) - 1.0;
            double pg = g;
            if (alpha[i] == 0)
                pg = std::min(g, 0.0);
            else if (alpha[i] == C)
                pg = std::max(g, 0.0);
            max_violation = std::max(max_violation, std::fabs(pg));
            if (pg == 0) continue;
            const double old = alpha[i];
            alpha[i] = std::clamp(old - g / qd[i], 0.0, C);
            const double step = (alpha[i] - old) * y;
            if (step == 0) continue;
            for (const auto& [id, v] : x.entries()) w[id] += step * v;
            b += step;
        }
        rep.epochs = epoch + 1;
        rep.max_violation = max_violation;
        if (max_violation < options.tolerance) {
            rep.converged = true;
            break;
        }
    }
    rep.dual = std::move(alpha);
    if (report) *report = std::move(rep);
    return LinearModel{std::move(w), b, C, std::move(feature_space_hash)};
}

double primal_objective(const LinearModel& model, const TrainingSet& data) {
    double reg = model.bias * model.bias;
    for (double v : model.weights) reg += v * v;
    double loss = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        loss += std::max(0.0, 1.0 - data.y[i] * model.decision(*data.x[i]));
    return 0.5 * reg + model.C * loss;
}

std::vector<double> MultiClassModel::decisions(const SparseVector& x) const {
    std::vector<double> out;
    out.reserve(models.size());
    for (const auto& m : models) out.push_back(m.decision(x));
    return out;
}

std::size_t MultiClassModel::predict_index(const SparseVector& x) const {
    std::size_t best = 0;
    double best_value = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double d = models[i].decision(x);
        if (i == 0 || d > best_value) {
            best = i;
            best_value = d;
        }
    }
    return best;
}

MultiClassModel train_ovr_svm(std::span<const SparseVector* const> xs, std::span<const std::string> labels,
                              std::vector<std::string> classes, const SvmOptions& options,
                              std::string feature_space_hash) {
    if (xs.size() != labels.size()) throw Error("svm: instance/label count mismatch");
    if (classes.size() < 2) throw Error("svm: one-vs-rest needs at least two classes");
    std::map<std::string, std::size_t> count;
    for (const auto& c : classes) count[c] = 0;
    if (count.size() != classes.size()) throw Error("svm: duplicate class");
    for (const auto& l : labels) {
        auto it = count.find(l);
        if (it == count.end()) throw Error("svm: label '" + l + "' is not a listed class");
        ++it->second;
    }
    for (const auto& [c, k] : count)
        if (k == 0) throw Error("svm: class '" + c + "' has no instances");

    MultiClassModel model;
    model.classes = std::move(classes);
    for (const auto& c : model.classes) {
        TrainingSet set;
        for (std::size_t i = 0; i < xs.size(); ++i) set.add(*xs[i], labels[i] == c ? 1 : -1);
        model.models.push_back(train_binary_svm(set, options, nullptr, feature_space_hash));
    }
    return model;
}

MultiClassModel train_ovr_svm(std::span<const SparseVector* const> xs, std::span<const std::string> labels,
                              const SvmOptions& options, std::string feature_space_hash) {
    std::vector<std::string> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return train_ovr_svm(xs, labels, std::move(classes), options, std::move(feature_space_hash));
}

std::vector<FeatureDescriptor> top_weighted_features(const LinearModel& model, WeightSign sign, std::size_t k,
                                                     const FeatureSpace& space) {
    std::vector<FeatureDescriptor> picked;
    for (std::uint32_t id = 0; id < model.weights.size(); ++id) {
        const double w = model.weights[id];
        if ((sign == WeightSign::Positive && w > 0) || (sign == WeightSign::Negative && w < 0))
            picked.push_back({id, {}, w});
    }
    std::sort(picked.begin(), picked.end(), [](const FeatureDescriptor& a, const FeatureDescriptor& b) {
        const double fa = std::fabs(a.weight), fb = std::fabs(b.weight);
        return fa != fb ? fa > fb : a.id < b.id;
    });
    if (picked.size() > k) picked.resize(k);
    for (auto& f : picked) f.name = space.name(f.id);
    return picked;
}

io::Json to_json(const LinearModel& model) {
    io::Json weights = io::Json::array();
    for (std::uint32_t id = 0; id < model.weights.size(); ++id)
        if (model.weights[id] != 0) weights.push_back({id, model.weights[id]});
    return {{"weights", weights},
            {"bias", model.bias},
            {"C", model.C},
            {"dimension", model.weights.size()},
            {"feature_space_hash", model.feature_space_hash}};
}

io::Json to_json(const MultiClassModel& model) {
    io::Json models = io::Json::array();
    for (std::size_t i = 0; i < model.models.size(); ++i) {
        auto j = to_json(model.models[i]);
        j.erase("C");
        j.erase("feature_space_hash");
        j["class"] = model.classes[i];
        models.push_back(std::move(j));
    }
    return {{"classes", model.classes},
            {"models", models},
            {"C", model.models.empty() ? 0.0 : model.models.front().C},
            {"feature_space_hash", model.models.empty() ? "" : model.models.front().feature_space_hash}};
}

}  // namespace t4f::learn
