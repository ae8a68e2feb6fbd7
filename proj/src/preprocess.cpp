#include "misinfo/preprocess.hpp"

#include <json.hpp>

#include <algorithm>
#include <regex>

#include <fmt/format.h>

namespace misinfo {

using nlohmann::json;

namespace {

std::vector<std::string> read_word_list(const std::filesystem::path &path) {
    std::vector<std::string> words;
    for (const auto &line : split(read_file(path), '\n')) {
        auto word = to_lower_utf8(trim(line));
        if (!word.empty()) {
            words.push_back(std::move(word));
        }
    }
    return words;
}

bool word_char(char32_t cp) {
    return is_alnum_cp(cp) || cp == U'_' || is_mark_cp(cp);
}

}  // namespace

StopwordSet StopwordSet::from_lists(std::vector<std::string> english, std::vector<std::string> trivial) {
    StopwordSet sw;
    sw.english.insert(english.begin(), english.end());
    sw.trivial.insert(trivial.begin(), trivial.end());
    sw.combined = sw.english;
    sw.combined.insert(sw.trivial.begin(), sw.trivial.end());
    return sw;
}

StopwordSet StopwordSet::load(const std::filesystem::path &english_path, const std::filesystem::path &trivial_path) {
    return from_lists(read_word_list(english_path), read_word_list(trivial_path));
}

StopwordSet StopwordSet::load_default() {
    const auto dir = data_dir();
    return load(dir / "stopwords.english", dir / "stopwords.trivial");
}

std::string clean_text(std::string_view raw) {
    // ICU lowercasing first so the ASCII patterns below see lowercase input.
    static const std::regex url(R"((https?://|www\.)\S*|\bt\.co/\S*)");
    static const std::regex mention(R"(@[A-Za-z0-9_]+)");
    std::string text = to_lower_utf8(nfc_normalize(raw));
    text = std::regex_replace(text, url, " ");
    text = std::regex_replace(text, mention, " ");

    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const char32_t cp : decode_utf8(text)) {
        if (word_char(cp)) {
            if (pending_space && !out.empty()) {
                out += ' ';
            }
            pending_space = false;
            append_utf8(out, cp);
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) {
            return;
        }
        const auto cps = decode_utf8(current);
        const bool digits_only = std::all_of(cps.begin(), cps.end(), is_digit_cp);
        if (cps.size() > 1 && !digits_only) {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (const char32_t cp : decode_utf8(cleaned)) {
        if (is_space_cp(cp)) {
            flush();
        } else {
            append_utf8(current, cp);
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string> &tokens, const StopwordSet &stopwords) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto &t : tokens) {
        if (!stopwords.contains(t)) {
            out.push_back(t);
        }
    }
    return out;
}

TokenSequence preprocess_tweet(const TweetRecord &tweet, const StopwordSet &stopwords) {
    TokenSequence seq;
    seq.tweet_id = tweet.id;
    for (const auto &token : remove_stopwords(tokenize(clean_text(tweet.text)), stopwords)) {
        seq.tokens.push_back(stem_token(token));
    }
    return seq;
}

TokenSequence preprocess_entry(const LabeledEntry &entry, const StopwordSet &stopwords) {
    auto seq = preprocess_tweet(entry.tweet, stopwords);
    seq.label = entry.label;
    return seq;
}

std::string serialize_token_sequences(const std::vector<TokenSequence> &docs) {
    std::string out;
    for (const auto &doc : docs) {
        json j = {{"id", doc.tweet_id}, {"tokens", doc.tokens}};
        if (doc.label) {
            j["label"] = std::string(to_string(*doc.label));
        }
        out += j.dump(-1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::vector<TokenSequence> parse_token_sequences(std::string_view content) {
    std::vector<TokenSequence> docs;
    std::size_t line_no = 0;
    for (const auto &line : split(content, '\n')) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            TokenSequence doc;
            doc.tweet_id = j.at("id").get<std::string>();
            doc.tokens = j.at("tokens").get<std::vector<std::string>>();
            if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
                doc.label = parse_label(it->get<std::string>());
                if (!doc.label) {
                    throw FormatError("invalid label");
                }
            }
            docs.push_back(std::move(doc));
        } catch (const json::exception &e) {
            throw FormatError(fmt::format("token cache line {}: {}", line_no, e.what()));
        } catch (const FormatError &e) {
            throw FormatError(fmt::format("token cache line {}: {}", line_no, e.what()));
        }
    }
    return docs;
}

void save_token_sequences(const std::vector<TokenSequence> &docs, const std::filesystem::path &path) {
    write_file_atomic(path, serialize_token_sequences(docs));
}

std::vector<TokenSequence> load_token_sequences(const std::filesystem::path &path) {
    return parse_token_sequences(read_file(path));
}

}  // namespace misinfo
