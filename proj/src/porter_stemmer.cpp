// Porter, "An algorithm for suffix stripping" (1980), steps 1a through 5b,
// following the original rule tables (ABLI -> ABLE, no LOGI rule).

#include "misinfo/preprocess.hpp"

#include <array>

namespace misinfo {

namespace {

class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view word) : b_(word) {}

    std::string run() {
        if (b_.size() <= 2) {
            return b_;
        }
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return b_;
    }

private:
    // consonant at position i of the current word
    [[nodiscard]] bool cons(std::size_t i) const {
        switch (b_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 || !cons(i - 1);
            default: return true;
        }
    }

    // m() of the prefix b_[0, len): number of VC sequences in [C](VC)^m[V]
    [[nodiscard]] int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && cons(i)) {
            ++i;
        }
        while (i < len) {
            while (i < len && !cons(i)) {
                ++i;
            }
            if (i >= len) {
                break;
            }
            while (i < len && cons(i)) {
                ++i;
            }
            ++m;
        }
        return m;
    }

    [[nodiscard]] bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i) {
            if (!cons(i)) {
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] bool double_cons(std::size_t len) const {
        return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
    }

    // *o: stem ends cvc, second c not w, x or y
    [[nodiscard]] bool cvc(std::size_t len) const {
        if (len < 3 || !cons(len - 1) || cons(len - 2) || !cons(len - 3)) {
            return false;
        }
        const char c = b_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    [[nodiscard]] bool ends(std::string_view suffix) const {
        return b_.size() >= suffix.size() && std::string_view(b_).substr(b_.size() - suffix.size()) == suffix;
    }

    [[nodiscard]] std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

    void replace_suffix(std::string_view suffix, std::string_view replacement) {
        b_.resize(stem_len(suffix));
        b_ += replacement;
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    void step1a() {
        if (ends("sses")) {
            replace_suffix("sses", "ss");
        } else if (ends("ies")) {
            replace_suffix("ies", "i");
        } else if (ends("ss")) {
            // unchanged
        } else if (ends("s")) {
            replace_suffix("s", "");
        }
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(stem_len("eed")) > 0) {
                replace_suffix("eed", "ee");
            }
            return;
        }
        bool stripped = false;
        if (ends("ed") && has_vowel(stem_len("ed"))) {
            replace_suffix("ed", "");
            stripped = true;
        } else if (ends("ing") && has_vowel(stem_len("ing"))) {
            replace_suffix("ing", "");
            stripped = true;
        }
        if (!stripped) {
            return;
        }
        if (ends("at")) {
            replace_suffix("at", "ate");
        } else if (ends("bl")) {
            replace_suffix("bl", "ble");
        } else if (ends("iz")) {
            replace_suffix("iz", "ize");
        } else if (double_cons(b_.size())) {
            const char c = b_.back();
            if (c != 'l' && c != 's' && c != 'z') {
                b_.pop_back();
            }
        } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
            b_ += 'e';
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(stem_len("y"))) {
            b_.back() = 'i';
        }
    }

    void step2() {
        static constexpr std::array<Rule, 20> rules{{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},  {"izer", "ize"},
            {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},  {"eli", "e"},      {"ousli", "ous"},
            {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},   {"alism", "al"},   {"iveness", "ive"},
            {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},  {"biliti", "ble"},
        }};
        apply_longest(rules, 0);
    }

    void step3() {
        static constexpr std::array<Rule, 7> rules{{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""},
        }};
        apply_longest(rules, 0);
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes{
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        std::string_view best;
        for (const auto s : suffixes) {
            if (ends(s) && s.size() > best.size()) {
                best = s;
            }
        }
        if (best.empty()) {
            return;
        }
        const auto len = stem_len(best);
        if (measure(len) <= 1) {
            return;
        }
        if (best == "ion" && (len == 0 || (b_[len - 1] != 's' && b_[len - 1] != 't'))) {
            return;
        }
        b_.resize(len);
    }

    void step5a() {
        if (!ends("e")) {
            return;
        }
        const auto len = stem_len("e");
        const int m = measure(len);
        if (m > 1 || (m == 1 && !cvc(len))) {
            b_.pop_back();
        }
    }

    void step5b() {
        if (measure(b_.size()) > 1 && double_cons(b_.size()) && b_.back() == 'l') {
            b_.pop_back();
        }
    }

    template <std::size_t N>
    void apply_longest(const std::array<Rule, N> &rules, int min_m) {
        const Rule *best = nullptr;
        for (const auto &rule : rules) {
            if (ends(rule.suffix) && (best == nullptr || rule.suffix.size() > best->suffix.size())) {
                best = &rule;
            }
        }
        if (best != nullptr && measure(stem_len(best->suffix)) > min_m) {
            replace_suffix(best->suffix, best->replacement);
        }
    }

    std::string b_;
};

}  // namespace

std::string stem_token(std::string_view word) {
    for (const char c : word) {
        if (static_cast<unsigned char>(c) >= 0x80) {
            return std::string(word);  // the rules are defined over ASCII only
        }
    }
    return PorterStemmer(word).run();
}

}  // namespace misinfo
