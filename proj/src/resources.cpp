#include "t4f/resources.hpp"

#include <cstdlib>

#include "t4f/io.hpp"

#ifndef T4F_DEFAULT_DATA_DIR
#define T4F_DEFAULT_DATA_DIR "data"
#endif

namespace t4f {

std::filesystem::path Resources::default_data_dir() {
    if (const char* env = std::getenv("T4F_DATA_DIR"); env && *env) return env;
    return T4F_DEFAULT_DATA_DIR;
}

Resources Resources::load(const std::filesystem::path& data_dir) {
    Resources r;
    r.data_dir = data_dir;
    r.gazetteer = geonorm::Gazetteer::load(data_dir);
    for (auto& w : io::read_word_list(data_dir / "stopwords.txt")) r.stopwords.insert(text::fold_case(w));
    for (auto& w : io::read_word_list(data_dir / "food_lexicon.txt")) r.food_lexicon.insert(text::fold_case(w));
    const auto phrases = r.gazetteer.location_phrases();
    r.locations = text::LocationLexicon(phrases);
    return r;
}

}  // namespace t4f
