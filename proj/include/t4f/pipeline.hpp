#pragma once

#include <string>
#include <vector>

#include "t4f/corpus.hpp"
#include "t4f/resources.hpp"
#include "t4f/text.hpp"

namespace t4f::text {

/// Per-tweet token lists for one snapshot, aligned with snapshot->tweets().
struct PreparedCorpus {
    corpus::SnapshotPtr snapshot;
    /// tokenize + clean; used for phrase queries and statistics.
    std::vector<std::vector<std::string>> cleaned;
    /// filter_tokens output (locations, stopwords and singletons removed); feature input.
    std::vector<std::vector<std::string>> filtered;
    WordSet singletons;
};

/// Singletons are counted corpus-wide after the location and stopword rules.
PreparedCorpus prepare(corpus::SnapshotPtr snapshot, const Resources& res);

}  // namespace t4f::text
