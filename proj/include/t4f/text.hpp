#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace t4f::text {

using WordSet = std::unordered_set<std::string>;

/// NFC-normalizes and lowercases UTF-8 text. ASCII input takes a fast path.
std::string fold_case(std::string_view s);

/// Rule tokenizer: whitespace and punctuation splitting with `#tag`, `@user`
/// and URL protection. Output is lowercased; punctuation-only runs are dropped.
std::vector<std::string> tokenize(std::string_view text);

bool is_url(std::string_view token);
bool is_mention(std::string_view token);
bool is_hashtag(std::string_view token);
/// ASCII letters/digits, or any non-ASCII byte (letters outside ASCII are not classified further).
bool has_alnum(std::string_view token);

/// Standard cleanup: drops URLs, @-usernames and tokens without alphanumerics.
std::vector<std::string> clean(std::span<const std::string> tokens);

/// Place names, abbreviations and nicknames, stored as space-separated token
/// phrases. Matching ignores a leading '#', so "#tx" and "#sanfran" hit too.
class LocationLexicon {
public:
    LocationLexicon() = default;
    explicit LocationLexicon(std::span<const std::string> phrases);

    /// Length in tokens of the longest phrase starting at `pos`, or 0.
    std::size_t match_length(std::span<const std::string> tokens, std::size_t pos) const;
    bool contains(std::string_view phrase) const { return phrases_.count(std::string(phrase)) > 0; }
    std::size_t size() const { return phrases_.size(); }

private:
    std::unordered_set<std::string> phrases_;
    std::size_t max_words_ = 0;
};

/// Removes, in order: location phrases (and their hashtag forms), tokens
/// without alphanumerics, URLs, @-usernames, stopwords and corpus singletons.
std::vector<std::string> filter_tokens(std::span<const std::string> tokens, const LocationLexicon& locations,
                                       const WordSet& stopwords, const WordSet& singletons);

enum class VocabMode { AllWords, Hashtags, Food, FoodPlusHashtags };

std::string_view to_string(VocabMode mode);
/// Accepts all_words, hashtags, food, food_hashtags (also "all", "food+hashtags").
std::optional<VocabMode> parse_vocab_mode(std::string_view s);

bool in_mode(std::string_view token, VocabMode mode, const WordSet& food_lexicon);
/// Keeps only the tokens admitted by `mode`, preserving order.
std::vector<std::string> restrict_to_mode(std::span<const std::string> tokens, VocabMode mode,
                                          const WordSet& food_lexicon);

/// Dense token <-> id bijection; ids follow lexicographic token order.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(VocabMode mode, std::vector<std::string> sorted_unique_tokens);

    VocabMode mode() const { return mode_; }
    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    std::optional<std::uint32_t> id(std::string_view token) const;
    const std::string& token(std::uint32_t id) const { return tokens_.at(id); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    /// SHA-256 over mode and tokens; identifies a feature space.
    std::string hash() const;

private:
    VocabMode mode_ = VocabMode::AllWords;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::uint32_t> id_of_;
};

/// Builds the vocabulary of `mode` over filtered token lists. Throws on an empty result.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, VocabMode mode,
                            const WordSet& food_lexicon);

}  // namespace t4f::text
