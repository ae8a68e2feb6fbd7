#pragma once

#include "misinfo/corpus.hpp"
#include "misinfo/labels.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace misinfo {

struct StopwordSet {
    std::unordered_set<std::string> english;
    std::unordered_set<std::string> trivial;
    std::unordered_set<std::string> combined;

    [[nodiscard]] bool contains(const std::string &word) const { return combined.contains(word); }

    static StopwordSet from_lists(std::vector<std::string> english, std::vector<std::string> trivial);
    /// One word per line; blank lines and surrounding whitespace ignored.
    static StopwordSet load(const std::filesystem::path &english_path, const std::filesystem::path &trivial_path);
    /// data/stopwords.english + data/stopwords.trivial
    static StopwordSet load_default();
};

struct TokenSequence {
    std::string tweet_id;
    std::vector<std::string> tokens;
    std::optional<LabelClass> label;

    friend bool operator==(const TokenSequence &, const TokenSequence &) = default;
};

/// Lowercase, drop URLs and @-mentions, turn punctuation and symbols into
/// spaces (so '#' goes and the hashtag word stays), collapse whitespace.
std::string clean_text(std::string_view raw);

/// Whitespace split, dropping single-character and digits-only tokens.
std::vector<std::string> tokenize(std::string_view cleaned);

std::vector<std::string> remove_stopwords(const std::vector<std::string> &tokens, const StopwordSet &stopwords);

/// Porter (1980) suffix stripping.
std::string stem_token(std::string_view word);

TokenSequence preprocess_tweet(const TweetRecord &tweet, const StopwordSet &stopwords);
TokenSequence preprocess_entry(const LabeledEntry &entry, const StopwordSet &stopwords);

// Preprocessed corpus cache: JSONL {id, tokens, label?}.
std::string serialize_token_sequences(const std::vector<TokenSequence> &docs);
std::vector<TokenSequence> parse_token_sequences(std::string_view content);
void save_token_sequences(const std::vector<TokenSequence> &docs, const std::filesystem::path &path);
std::vector<TokenSequence> load_token_sequences(const std::filesystem::path &path);

}  // namespace misinfo
