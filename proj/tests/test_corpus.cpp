#include "misinfo/corpus.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace misinfo;

namespace {

Dataset make(std::initializer_list<std::pair<const char *, const char *>> rows) {
    Dataset d;
    for (const auto &[id, text] : rows) {
        d.records.push_back({id, text, std::nullopt});
    }
    return d;
}

}  // namespace

TEST_CASE("minimal jsonl line loads") {
    const auto loaded = parse_tweets(R"({"id":"1","text":"masks work","date":"2020-07-02"})", TweetFormat::jsonl);
    REQUIRE(loaded.dataset.size() == 1);
    CHECK(loaded.dataset.records[0].text == "masks work");
    CHECK(loaded.dataset.records[0].date == "2020-07-02");
}

TEST_CASE("over-long text is rejected and counted") {
    const std::string text(300, 'a');
    const auto content = R"({"id":"1","text":")" + text + "\"}\n" + R"({"id":"2","text":"ok"})";
    const auto loaded = parse_tweets(content, TweetFormat::jsonl);
    CHECK(loaded.dataset.size() == 1);
    CHECK(loaded.report.rejected == 1);
    REQUIRE(loaded.report.diagnostics.size() == 1);
    CHECK(loaded.report.diagnostics[0].line == 1);
}

TEST_CASE("280 characters is allowed, counted in code points") {
    std::string text;
    for (int i = 0; i < 280; ++i) {
        text += "é";
    }
    CHECK_FALSE(validate_record({"1", text, std::nullopt}));
    CHECK(validate_record({"1", text + "x", std::nullopt}));
    CHECK(validate_record({"1", "   ", std::nullopt}));
    CHECK(validate_record({"", "x", std::nullopt}));
}

TEST_CASE("csv keeps file order") {
    const auto loaded = parse_tweets("id,text,date\n3,c,\n1,a,2020-01-01\n2,\"b, with comma\",\n", TweetFormat::csv);
    REQUIRE(loaded.dataset.size() == 3);
    CHECK(loaded.dataset.records[0].id == "3");
    CHECK(loaded.dataset.records[2].text == "b, with comma");
    CHECK_FALSE(loaded.dataset.records[0].date);
}

TEST_CASE("malformed rows are skipped until they are the majority") {
    const auto mostly_ok = parse_tweets("{\"id\":\"1\",\"text\":\"a\"}\nnot json\n{\"id\":\"2\",\"text\":\"b\"}\n",
                                        TweetFormat::jsonl);
    CHECK(mostly_ok.dataset.size() == 2);
    CHECK(mostly_ok.report.malformed == 1);
    CHECK_THROWS_AS(parse_tweets("garbage\nmore garbage\n{\"id\":\"1\",\"text\":\"a\"}\n", TweetFormat::jsonl),
                    FormatError);
}

TEST_CASE("duplicate ids are rejected") {
    const auto loaded = parse_tweets("{\"id\":\"1\",\"text\":\"a\"}\n{\"id\":\"1\",\"text\":\"b\"}\n", TweetFormat::jsonl);
    CHECK(loaded.dataset.size() == 1);
    CHECK(loaded.report.rejected == 1);
}

TEST_CASE("unreadable file is an I/O error") {
    CHECK_THROWS_AS(load_tweets("/nonexistent/tweets.jsonl", TweetFormat::jsonl), IoError);
}

TEST_CASE("round trip through both formats") {
    Dataset d = make({{"1", "plain"}, {"2", "comma, \"quote\"\nand newline"}, {"3", "ünïcödé 😷"}});
    d.records[0].date = "2020-03-01";
    for (const auto format : {TweetFormat::jsonl, TweetFormat::csv}) {
        const auto back = parse_tweets(serialize_dataset(d, format), format);
        CHECK(back.dataset == d);
        CHECK(back.report.rejected == 0);
    }
    testing::TempDir dir;
    save_dataset(d, dir / "d.csv", TweetFormat::csv);
    CHECK(load_tweets(dir / "d.csv", TweetFormat::csv).dataset == d);
}

TEST_CASE("empty dataset keeps the csv header") {
    CHECK(serialize_dataset(Dataset{}, TweetFormat::csv) == "id,text,date\n");
    CHECK(serialize_dataset(Dataset{}, TweetFormat::jsonl).empty());
    CHECK(parse_tweets("id,text,date\n", TweetFormat::csv).dataset.empty());
}

TEST_CASE("dedup keeps the first of each normalized text") {
    CHECK(dedup(make({{"1", "masks work"}, {"2", "masks work"}})).records.size() == 1);
    CHECK(dedup(make({{"1", "A"}, {"2", "B"}})).records.size() == 2);
    // NFC and trimming both count as the same text.
    const auto d = dedup(make({{"1", "caf\xc3\xa9"}, {"2", " cafe\xcc\x81 "}, {"3", "other"}}));
    REQUIRE(d.records.size() == 2);
    CHECK(d.records[0].id == "1");
}

TEST_CASE("dedup on ten records with four distinct texts") {
    // Distinct texts in first-seen order: a(1) b(2) c(4) d(7).
    const auto d = dedup(make({{"1", "a"}, {"2", "b"}, {"3", "a"}, {"4", "c"}, {"5", "b"}, {"6", "c"}, {"7", "d"},
                               {"8", "a"}, {"9", "d"}, {"10", "b"}}));
    std::vector<std::string> ids;
    for (const auto &r : d.records) {
        ids.push_back(r.id);
    }
    CHECK(ids == std::vector<std::string>{"1", "2", "4", "7"});
}

TEST_CASE("dedup is idempotent and order preserving on random data") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Dataset d;
        const auto n = rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            d.records.push_back({std::to_string(i), std::string(1, static_cast<char>('a' + rng.below(6))), std::nullopt});
        }
        const auto once = dedup(d);
        CHECK(dedup(once) == once);
        std::vector<int> positions;
        std::set<std::string> texts;
        for (const auto &r : once.records) {
            positions.push_back(std::stoi(r.id));
            texts.insert(r.text);
        }
        CHECK(std::is_sorted(positions.begin(), positions.end()));
        CHECK(texts.size() == once.records.size());
    }
}

TEST_CASE("bundled glossary holds the study keywords") {
    const auto g = load_glossary(default_glossary_path());
    const auto theme = std::find_if(g.themes.begin(), g.themes.end(),
                                    [](const Theme &t) { return t.name == "Possible Remedies"; });
    REQUIRE(theme != g.themes.end());
    CHECK(std::count(theme->keywords.begin(), theme->keywords.end(), "hydroxychloroquine") == 1);
    CHECK(std::count(g.health_keywords.begin(), g.health_keywords.end(), "herd immunity") == 1);
    CHECK(g.themes.size() == 5);
    CHECK(g.health_keywords.size() == 33);
    // The misspelling is kept next to the corrected form.
    const auto prevention = std::find_if(g.themes.begin(), g.themes.end(),
                                         [](const Theme &t) { return t.name == "Prevention"; });
    REQUIRE(prevention != g.themes.end());
    CHECK(std::count(prevention->keywords.begin(), prevention->keywords.end(), "desinfectant") == 1);
    CHECK(std::count(prevention->keywords.begin(), prevention->keywords.end(), "disinfectant") == 1);
}

TEST_CASE("glossary validation") {
    const auto g = parse_glossary(R"({"themes":[{"name":"X","keywords":["MASK","Stay At Home"]}],"health_keywords":["Fever"]})");
    CHECK(g.themes[0].keywords == std::vector<std::string>{"mask", "stay at home"});
    CHECK(g.health_keywords == std::vector<std::string>{"fever"});
    CHECK_THROWS_AS(parse_glossary(R"({"themes":[]})"), SchemaError);
    CHECK_THROWS_AS(parse_glossary(R"({"health_keywords":[]})"), SchemaError);
    CHECK_THROWS_AS(parse_glossary(R"({"themes":[{"name":"X","keywords":[" "]}],"health_keywords":[]})"), SchemaError);
    CHECK_THROWS_AS(parse_glossary(R"({"themes":[{"name":"X","keywords":["a","A"]}],"health_keywords":[]})"),
                    SchemaError);
    CHECK_THROWS(parse_glossary("not json"));
}

TEST_CASE("labeled corpus round trip") {
    const std::vector<LabeledEntry> entries{{{"1", "a b", std::nullopt}, LabelClass::M},
                                            {{"2", "c", "2020-05-05"}, LabelClass::U}};
    testing::TempDir dir;
    save_labeled(entries, dir / "l.jsonl");
    const auto back = load_labeled(dir / "l.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].tweet == entries[0].tweet);
    CHECK(back[1].label == LabelClass::U);
    write_file_atomic(dir / "bad.jsonl", R"({"id":"1","text":"a","label":"X"})");
    CHECK_THROWS_AS(load_labeled(dir / "bad.jsonl"), FormatError);
}
