#include "misinfo/preprocess.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace misinfo;

namespace {

const StopwordSet &stopwords() {
    static const auto sw = StopwordSet::load_default();
    return sw;
}

using Tokens = std::vector<std::string>;

bool digits_only(const std::string &t) {
    return std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

TEST_CASE("clean_text examples") {
    CHECK(clean_text("Masks WORK! https://t.co/xYz") == "masks work");
    CHECK(clean_text("@DrFauci says #StayHome") == "says stayhome");
    CHECK(clean_text("Bleach “cures”, they say…") == "bleach cures they say");
}

TEST_CASE("clean_text strips every URL form, including truncated ones") {
    CHECK(clean_text("see http://example.com/a?b=c now") == "see now");
    CHECK(clean_text("see www.example.com now") == "see now");
    CHECK(clean_text("read this https://t.c") == "read this");
    CHECK(clean_text("read this http") == "read this http");
    CHECK(clean_text("link t.co/abc done") == "link done");
    CHECK(clean_text("email@x.org @user_1: hi") == "email org hi");
}

TEST_CASE("clean_text keeps accents and non-Latin words") {
    CHECK(clean_text("Café  NAÏVE") == "café naïve");
    CHECK(clean_text("ワクチン!!") == "ワクチン");
    CHECK(clean_text("covid_19 ok") == "covid_19 ok");
    CHECK(clean_text("   ") == "");
}

TEST_CASE("tokenize drops single characters and digit-only tokens") {
    CHECK(tokenize("masks work in 2020") == Tokens{"masks", "work", "in"});
    CHECK(tokenize("a b cd") == Tokens{"cd"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("5g n95 100") == Tokens{"5g", "n95"});
    CHECK(tokenize("é ab") == Tokens{"ab"});
}

TEST_CASE("bundled stopword set") {
    const auto &sw = stopwords();
    CHECK(sw.combined.size() == 222);
    CHECK(sw.english.size() == 215);
    CHECK(sw.trivial.size() == 7);
    for (const auto *w : {"covid19", "covid", "covid-19", "coronavirus", "corona", "covid_19", "health"}) {
        CHECK(sw.trivial.contains(w));
        CHECK(sw.contains(w));
    }
}

TEST_CASE("remove_stopwords") {
    CHECK(remove_stopwords({"the", "vaccine", "is", "safe"}, stopwords()) == Tokens{"vaccine", "safe"});
    CHECK(remove_stopwords({"covid19", "mask"}, stopwords()) == Tokens{"mask"});
    CHECK(remove_stopwords({"hydroxychloroquine"}, stopwords()) == Tokens{"hydroxychloroquine"});
}

TEST_CASE("stem_token examples") {
    CHECK(stem_token("caresses") == "caress");
    CHECK(stem_token("relational") == "relat");
    CHECK(stem_token("mask") == "mask");
    CHECK(stem_token("vaccines") == "vaccin");
    CHECK(stem_token("café") == "café");
}

TEST_CASE("preprocess_tweet examples") {
    const auto run = [](const char *text) { return preprocess_tweet({"x", text, std::nullopt}, stopwords()).tokens; };
    CHECK(run("The masks are working! https://x.co") == Tokens{"mask", "work"});
    CHECK(run("it is the").empty());
    CHECK(run("COVID-19 vaccines save lives") == Tokens{"vaccin", "save", "live"});
    const auto seq = preprocess_entry({{"7", "Masks work", std::nullopt}, LabelClass::M}, stopwords());
    CHECK(seq.tweet_id == "7");
    CHECK(seq.label == LabelClass::M);
}

TEST_CASE("cleaning is idempotent and outputs satisfy the token invariants") {
    const std::string alphabet = "abcdeXYZ019 _-#@.,!:/é“”😷\t";
    const std::vector<std::string> words{"the", "covid", "health", "https://t.co/", "www.", "@x", "a", "12", "masks"};
    Rng rng(123);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const auto n = rng.below(40);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.below(4) == 0) {
                s += words[rng.below(words.size())];
            } else {
                // Whole code points only: pick by decoding the alphabet.
                const auto cps = decode_utf8(alphabet);
                append_utf8(s, cps[rng.below(cps.size())]);
            }
        }
        const auto once = clean_text(s);
        CHECK(clean_text(once) == once);
        const auto seq = preprocess_tweet({"r", s, std::nullopt}, stopwords());
        CHECK(seq == preprocess_tweet({"r", s, std::nullopt}, stopwords()));
        const auto kept = remove_stopwords(tokenize(once), stopwords());
        REQUIRE(kept.size() == seq.tokens.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            CHECK_FALSE(stopwords().contains(kept[i]));
            CHECK(seq.tokens[i] == stem_token(kept[i]));
        }
        for (const auto &t : seq.tokens) {
            CHECK(utf8_length(t) > 1);
            CHECK_FALSE(digits_only(t));
        }
    }
}

TEST_CASE("token cache round trip") {
    const std::vector<TokenSequence> docs{{"1", {"mask", "work"}, LabelClass::M}, {"2", {}, std::nullopt},
                                          {"3", {"ワクチン"}, LabelClass::T}};
    CHECK(parse_token_sequences(serialize_token_sequences(docs)) == docs);
    testing::TempDir dir;
    save_token_sequences(docs, dir / "t.jsonl");
    CHECK(load_token_sequences(dir / "t.jsonl") == docs);
    CHECK_THROWS_AS(parse_token_sequences("{\"tokens\":[]}"), FormatError);
}

TEST_CASE("stopword files load from custom paths") {
    testing::TempDir dir;
    write_file_atomic(dir / "e.txt", "the\n  and \n\nof\n");
    write_file_atomic(dir / "t.txt", "covid\nthe\n");
    const auto sw = StopwordSet::load(dir / "e.txt", dir / "t.txt");
    CHECK(sw.english.size() == 3);
    CHECK(sw.combined.size() == 4);
    CHECK_THROWS_AS(StopwordSet::load(dir / "missing.txt", dir / "t.txt"), IoError);
}
