#include "t4f/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <set>

#include "t4f/error.hpp"
#include "t4f/io.hpp"

namespace t4f::text {

namespace {

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_word_byte(unsigned char c) { return is_ascii_alnum(c) || c >= 0x80; }

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const char a = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
        if (a != prefix[i]) return false;
    }
    return true;
}

bool url_prefix(std::string_view s) {
    return starts_with_ci(s, "http://") || starts_with_ci(s, "https://") || starts_with_ci(s, "www.");
}

}  // namespace

std::string fold_case(std::string_view s) {
    const bool ascii = std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (ascii) {
        std::string out(s);
        for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    }
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    if (U_SUCCESS(status)) {
        icu::UnicodeString normalized = nfc->normalize(u, status);
        if (U_SUCCESS(status)) u = normalized;
    }
    u.toLower(icu::Locale::getRoot());
    std::string out;
    u.toUTF8String(out);
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    const std::size_t n = text.size();
    std::size_t i = 0;
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    while (i < n) {
        const unsigned char c = byte(i);
        if (is_space(c)) {
            ++i;
            continue;
        }
        const bool at_chunk_start = i == 0 || is_space(byte(i - 1));
        if (at_chunk_start && url_prefix(text.substr(i))) {
            std::size_t j = i;
            while (j < n && !is_space(byte(j))) ++j;
            std::string_view url = text.substr(i, j - i);
            while (!url.empty() && std::string_view(".,!?;:)\"'").find(url.back()) != std::string_view::npos)
                url.remove_suffix(1);
            out.push_back(fold_case(url));
            i = j;
            continue;
        }
        if ((c == '#' || c == '@') && i + 1 < n && (is_word_byte(byte(i + 1)) || byte(i + 1) == '_')) {
            std::size_t j = i + 1;
            while (j < n && (is_word_byte(byte(j)) || byte(j) == '_')) ++j;
            out.push_back(std::string(1, static_cast<char>(c)) + fold_case(text.substr(i + 1, j - i - 1)));
            i = j;
            continue;
        }
        if (is_word_byte(c)) {
            std::size_t j = i;
            while (j < n) {
                if (is_word_byte(byte(j))) {
                    ++j;
                } else if (byte(j) == '\'' && j + 1 < n && is_ascii_alnum(byte(j + 1))) {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push_back(fold_case(text.substr(i, j - i)));
            i = j;
            continue;
        }
        ++i;  // punctuation
    }
    return out;
}

bool is_url(std::string_view token) { return url_prefix(token); }
bool is_mention(std::string_view token) { return token.size() > 1 && token.front() == '@'; }
bool is_hashtag(std::string_view token) { return token.size() > 1 && token.front() == '#'; }

bool has_alnum(std::string_view token) {
    return std::any_of(token.begin(), token.end(), [](char c) { return is_word_byte(static_cast<unsigned char>(c)); });
}

std::vector<std::string> clean(std::span<const std::string> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (has_alnum(t) && !is_url(t) && !is_mention(t)) out.push_back(t);
    return out;
}

static std::string_view strip_hash(std::string_view t) {
    if (!t.empty() && t.front() == '#') t.remove_prefix(1);
    return t;
}

LocationLexicon::LocationLexicon(std::span<const std::string> phrases) {
    for (const auto& p : phrases) {
        if (p.empty()) continue;
        phrases_.insert(p);
        const auto words = static_cast<std::size_t>(std::count(p.begin(), p.end(), ' ')) + 1;
        max_words_ = std::max(max_words_, words);
    }
}

std::size_t LocationLexicon::match_length(std::span<const std::string> tokens, std::size_t pos) const {
    std::size_t best = 0;
    std::string key;
    for (std::size_t len = 1; len <= max_words_ && pos + len <= tokens.size(); ++len) {
        if (len > 1) key.push_back(' ');
        key.append(strip_hash(tokens[pos + len - 1]));
        if (phrases_.count(key)) best = len;
    }
    return best;
}

std::vector<std::string> filter_tokens(std::span<const std::string> tokens, const LocationLexicon& locations,
                                       const WordSet& stopwords, const WordSet& singletons) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size();) {
        if (const auto len = locations.match_length(tokens, i); len > 0) {
            i += len;
            continue;
        }
        const auto& t = tokens[i++];
        if (!has_alnum(t) || is_url(t) || is_mention(t)) continue;
        if (stopwords.count(t) || singletons.count(t)) continue;
        out.push_back(t);
    }
    return out;
}

std::string_view to_string(VocabMode mode) {
    switch (mode) {
        case VocabMode::AllWords: return "all_words";
        case VocabMode::Hashtags: return "hashtags";
        case VocabMode::Food: return "food";
        case VocabMode::FoodPlusHashtags: return "food_hashtags";
    }
    return "all_words";
}

std::optional<VocabMode> parse_vocab_mode(std::string_view s) {
    if (s == "all_words" || s == "all") return VocabMode::AllWords;
    if (s == "hashtags") return VocabMode::Hashtags;
    if (s == "food") return VocabMode::Food;
    if (s == "food_hashtags" || s == "food+hashtags") return VocabMode::FoodPlusHashtags;
    return std::nullopt;
}

bool in_mode(std::string_view token, VocabMode mode, const WordSet& food_lexicon) {
    switch (mode) {
        case VocabMode::AllWords: return true;
        case VocabMode::Hashtags: return is_hashtag(token);
        case VocabMode::Food: return food_lexicon.count(std::string(token)) > 0;
        case VocabMode::FoodPlusHashtags: return is_hashtag(token) || food_lexicon.count(std::string(token)) > 0;
    }
    return false;
}

std::vector<std::string> restrict_to_mode(std::span<const std::string> tokens, VocabMode mode,
                                          const WordSet& food_lexicon) {
    if (mode == VocabMode::AllWords) return {tokens.begin(), tokens.end()};
    std::vector<std::string> out;
    for (const auto& t : tokens)
        if (in_mode(t, mode, food_lexicon)) out.push_back(t);
    return out;
}

Vocabulary::Vocabulary(VocabMode mode, std::vector<std::string> sorted_unique_tokens)
    : mode_(mode), tokens_(std::move(sorted_unique_tokens)) {
    id_of_.reserve(tokens_.size());
    for (std::uint32_t i = 0; i < tokens_.size(); ++i) {
        if (i > 0 && !(tokens_[i - 1] < tokens_[i])) throw Error("vocabulary tokens must be sorted and unique");
        id_of_.emplace(tokens_[i], i);
    }
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view token) const {
    if (auto it = id_of_.find(std::string(token)); it != id_of_.end()) return it->second;
    return std::nullopt;
}

std::string Vocabulary::hash() const {
    std::string blob(to_string(mode_));
    for (const auto& t : tokens_) {
        blob.push_back('\n');
        blob.append(t);
    }
    return io::sha256_hex(blob);
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, VocabMode mode,
                            const WordSet& food_lexicon) {
    std::set<std::string> seen;
    for (const auto& doc : docs)
        for (const auto& t : doc)
            if (in_mode(t, mode, food_lexicon)) seen.insert(t);
    if (seen.empty()) throw Error("empty vocabulary");
    return Vocabulary(mode, std::vector<std::string>(seen.begin(), seen.end()));
}

}  // namespace t4f::text
