#pragma once

#include "misinfo/corpus.hpp"

#include <map>
#include <string>
#include <vector>

namespace misinfo {

/// Theme name used for entries of Glossary::health_keywords.
inline constexpr std::string_view kHealthTheme = "health";

struct KeywordHit {
    std::string keyword;
    std::string theme;

    friend bool operator==(const KeywordHit &, const KeywordHit &) = default;
};

struct MatchResult {
    std::string tweet_id;
    std::vector<KeywordHit> matched_keywords;
    bool matched = false;
};

/// Lowercased runs of alphanumeric code points; everything else separates.
std::vector<std::string> boundary_tokens(std::string_view text);

/// Compiled form of a glossary: every (keyword, theme) pair with its token run.
class KeywordMatcher {
public:
    explicit KeywordMatcher(const Glossary &glossary);

    [[nodiscard]] MatchResult match(std::string_view text, std::string tweet_id = {}) const;
    [[nodiscard]] const std::vector<KeywordHit> &entries() const noexcept { return entries_; }

private:
    std::vector<KeywordHit> entries_;
    std::vector<std::vector<std::string>> patterns_;
};

/// A keyword matches when its boundary tokens occur as a contiguous run of the
/// text's boundary tokens. Every glossary entry is tested and every hit reported.
MatchResult match_keywords(std::string_view text, const Glossary &glossary);

struct KeywordCount {
    std::string keyword;
    std::string theme;
    std::size_t hits = 0;
};

struct FilterResult {
    Dataset kept;
    std::vector<KeywordCount> report;  // glossary order

    /// Tweets matching `keyword` (under any theme).
    [[nodiscard]] std::size_t hits(std::string_view keyword) const;
};

FilterResult filter_corpus(const Dataset &dataset, const Glossary &glossary);

/// `keyword,theme,hits` with a header row.
std::string render_filter_report(const FilterResult &result);

}  // namespace misinfo
