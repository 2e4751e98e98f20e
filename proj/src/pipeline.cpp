#include "t4f/pipeline.hpp"

#include <unordered_map>

namespace t4f::text {

PreparedCorpus prepare(corpus::SnapshotPtr snapshot, const Resources& res) {
    PreparedCorpus p;
    p.snapshot = std::move(snapshot);
    const auto& tweets = p.snapshot->tweets();
    p.cleaned.reserve(tweets.size());
    p.filtered.reserve(tweets.size());
    const WordSet none;
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& t : tweets) {
        auto toks = tokenize(t.text);
        auto filtered = filter_tokens(toks, res.locations, res.stopwords, none);
        for (const auto& tok : filtered) ++freq[tok];
        p.cleaned.push_back(clean(toks));
        p.filtered.push_back(std::move(filtered));
    }
    for (const auto& [tok, n] : freq)
        if (n == 1) p.singletons.insert(tok);
    if (!p.singletons.empty()) {
        for (auto& doc : p.filtered) std::erase_if(doc, [&](const std::string& t) { return p.singletons.count(t) > 0; });
    }
    return p;
}

}  // namespace t4f::text
