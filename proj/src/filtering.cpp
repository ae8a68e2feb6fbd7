#include "misinfo/filtering.hpp"

#include <algorithm>

namespace misinfo {

std::vector<std::string> boundary_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char32_t cp : decode_utf8(to_lower_utf8(text))) {
        if (is_alnum_cp(cp) || (is_mark_cp(cp) && !current.empty())) {
            append_utf8(current, cp);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

KeywordMatcher::KeywordMatcher(const Glossary &glossary) {
    auto add = [&](const std::string &keyword, const std::string &theme) {
        auto pattern = boundary_tokens(keyword);
        if (pattern.empty()) {
            return;  // a keyword made only of punctuation can never match
        }
        entries_.push_back({keyword, theme});
        patterns_.push_back(std::move(pattern));
    };
    for (const auto &theme : glossary.themes) {
        for (const auto &keyword : theme.keywords) {
            add(keyword, theme.name);
        }
    }
    for (const auto &keyword : glossary.health_keywords) {
        add(keyword, std::string(kHealthTheme));
    }
}

MatchResult KeywordMatcher::match(std::string_view text, std::string tweet_id) const {
    MatchResult result;
    result.tweet_id = std::move(tweet_id);
    const auto tokens = boundary_tokens(text);
    for (std::size_t k = 0; k < patterns_.size(); ++k) {
        const auto &pattern = patterns_[k];
        const auto it = std::search(tokens.begin(), tokens.end(), pattern.begin(), pattern.end());
        if (it != tokens.end()) {
            result.matched_keywords.push_back(entries_[k]);
        }
    }
    result.matched = !result.matched_keywords.empty();
    return result;
}

MatchResult match_keywords(std::string_view text, const Glossary &glossary) {
    return KeywordMatcher(glossary).match(text);
}

std::size_t FilterResult::hits(std::string_view keyword) const {
    for (const auto &row : report) {
        if (row.keyword == keyword) {
            return row.hits;
        }
    }
    return 0;
}

FilterResult filter_corpus(const Dataset &dataset, const Glossary &glossary) {
    const KeywordMatcher matcher(glossary);
    FilterResult result;
    result.kept.provenance = dataset.provenance;
    for (const auto &entry : matcher.entries()) {
        result.report.push_back({entry.keyword, entry.theme, 0});
    }
    for (const auto &record : dataset.records) {
        const auto match = matcher.match(record.text, record.id);
        if (!match.matched) {
            continue;
        }
        result.kept.records.push_back(record);
        for (const auto &hit : match.matched_keywords) {
            for (auto &row : result.report) {
                if (row.keyword == hit.keyword && row.theme == hit.theme) {
                    ++row.hits;
                }
            }
        }
    }
    return result;
}

std::string render_filter_report(const FilterResult &result) {
    std::string out = "keyword,theme,hits\n";
    for (const auto &row : result.report) {
        out += csv_escape(row.keyword);
        out += ',';
        out += csv_escape(row.theme);
        out += ',';
        out += std::to_string(row.hits);
        out += '\n';
    }
    return out;
}

}  // namespace misinfo
