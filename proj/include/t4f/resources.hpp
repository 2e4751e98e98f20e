#pragma once

#include <filesystem>

#include "t4f/geonorm.hpp"
#include "t4f/text.hpp"

namespace t4f {

/// Data files shared by the pipeline: gazetteer tables, stopwords, food lexicon.
struct Resources {
    std::filesystem::path data_dir;
    geonorm::Gazetteer gazetteer;
    text::WordSet stopwords;
    text::WordSet food_lexicon;
    text::LocationLexicon locations;

    static Resources load(const std::filesystem::path& data_dir);
    /// $T4F_DATA_DIR if set, else the data/ directory of the source tree.
    static std::filesystem::path default_data_dir();
};

}  // namespace t4f
