#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fixtures.hpp"
#include "t4f/corpus.hpp"
#include "t4f/pipeline.hpp"
#include "t4f/synth.hpp"

namespace t4f::testing {

/// A generated corpus taken through ingest, normalize and prepare, with the
/// generator's manifest as the oracle.
struct SyntheticCorpus {
    io::Json manifest;
    text::PreparedCorpus prep;

    const corpus::CorpusSnapshot& snapshot() const { return *prep.snapshot; }
};

inline std::shared_ptr<const SyntheticCorpus> build_synthetic(const synth::SynthSpec& spec, std::uint64_t seed) {
    const auto& res = resources();
    TempDir dir("synth");
    const auto path = dir / "corpus.jsonl";
    auto out = std::make_shared<SyntheticCorpus>();
    out->manifest = synth::write_synthetic_corpus(spec, seed, res, path);
    auto raw = corpus::ingest_jsonl(path, corpus::default_filter());
    auto snap = std::make_shared<const corpus::CorpusSnapshot>(corpus::normalize(raw, res.gazetteer));
    out->prep = text::prepare(std::move(snap), res);
    return out;
}

/// Cached per (spec, seed) for the lifetime of the test process.
inline std::shared_ptr<const SyntheticCorpus> synthetic(const synth::SynthSpec& spec, std::uint64_t seed) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const SyntheticCorpus>> cache;
    const std::string key = spec.to_json().dump() + "#" + std::to_string(seed);
    std::lock_guard lock(mu);
    auto& slot = cache[key];
    if (!slot) slot = build_synthetic(spec, seed);
    return slot;
}

/// The default spec at seed 7.
inline const SyntheticCorpus& default_synthetic() {
    static const auto c = synthetic(synth::SynthSpec::default_spec(), 7);
    return *c;
}

/// A small corpus (6 states x 150 tweets) for tests that only need some realistic data.
inline const SyntheticCorpus& small_synthetic() {
    static const auto c = [] {
        auto spec = synth::SynthSpec::default_spec();
        spec.states = {"CA", "LA", "MA", "MN", "NY", "TX"};
        spec.tweets_per_locale = 150;
        return synthetic(spec, 3);
    }();
    return *c;
}

}  // namespace t4f::testing
