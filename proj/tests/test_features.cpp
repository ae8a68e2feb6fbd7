#include "misinfo/features.hpp"
#include "misinfo/preprocess.hpp"
#include "misinfo/synth.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace misinfo;

namespace {

using Tokens = std::vector<std::string>;

TokenSequence doc(Tokens tokens, std::optional<LabelClass> label = std::nullopt, std::string id = "d") {
    return {std::move(id), std::move(tokens), label};
}

}  // namespace

TEST_CASE("extract_ngrams examples") {
    const auto bigrams = extract_ngrams(Tokens{"uv", "ray", "cure"}, 2);
    CHECK(bigrams == std::vector<Tokens>{{"uv", "ray"}, {"ray", "cure"}});
    CHECK(extract_ngrams(Tokens{"mask"}, 3).empty());
    const Tokens five{"a1", "b2", "c3", "d4", "e5"};
    const auto unigrams = extract_ngrams(five, 1);
    REQUIRE(unigrams.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(unigrams[i] == Tokens{five[i]});
    }
    CHECK_THROWS_AS(extract_ngrams(five, 0), ContractError);
    CHECK_THROWS_AS(extract_ngrams(five, 4), ContractError);
}

TEST_CASE("n-gram count law on random token lists") {
    Rng rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        Tokens t(rng.below(12));
        for (auto &w : t) {
            w = "w" + std::to_string(rng.below(5));
        }
        for (int n = 1; n <= 3; ++n) {
            const auto expected = t.size() >= static_cast<std::size_t>(n) ? t.size() - n + 1 : 0;
            CHECK(extract_ngrams(t, n).size() == expected);
        }
    }
}

TEST_CASE("feature methods parse and name") {
    for (const auto &m : all_feature_methods()) {
        CHECK(FeatureMethod::parse(m.name()) == m);
        CHECK(FeatureMethod::parse(m.display_name()) == m);
    }
    CHECK(all_feature_methods().size() == 4);
    CHECK_FALSE(FeatureMethod::bow().binary());
    CHECK(FeatureMethod::ngram(1).binary());
    CHECK_THROWS_AS(FeatureMethod::parse("fourgram"), ValidationError);
}

TEST_CASE("build_feature_space keeps first-occurrence order") {
    const std::vector<TokenSequence> docs{doc({"a-stem", "b-stem"}), doc({"b-stem"})};
    CHECK(build_feature_space(docs, FeatureMethod::ngram(1)).vocabulary() == Tokens{"a-stem", "b-stem"});
    CHECK(build_feature_space(docs, FeatureMethod::ngram(2)).vocabulary() == Tokens{"a-stem b-stem"});
    CHECK_THROWS_AS(build_feature_space(docs, FeatureMethod::ngram(3)), DegenerateDataError);
    CHECK_THROWS_AS(build_feature_space({}, FeatureMethod::bow()), DegenerateDataError);
}

TEST_CASE("vectorize examples") {
    const FeatureSpace bow(FeatureMethod::bow(), {"mask", "vaccin"});
    const auto v = vectorize(doc({"mask", "mask", "vaccin"}), bow);
    CHECK(v.entries == std::vector<std::pair<std::uint32_t, double>>{{0, 2.0}, {1, 1.0}});
    CHECK(v.space_digest == bow.digest());
    const FeatureSpace uni(FeatureMethod::ngram(1), {"mask"});
    CHECK(vectorize(doc({"mask", "mask"}), uni).entries == std::vector<std::pair<std::uint32_t, double>>{{0, 1.0}});
    CHECK(vectorize(doc({"zika"}), uni).entries.empty());
}

TEST_CASE("feature space identity") {
    const FeatureSpace a(FeatureMethod::bow(), {"x", "y"});
    const FeatureSpace b(FeatureMethod::ngram(1), {"x", "y"});
    const FeatureSpace c(FeatureMethod::bow(), {"y", "x"});
    CHECK(a.digest() != b.digest());
    CHECK(a.digest() != c.digest());
    CHECK(a.position("y") == 1u);
    CHECK_FALSE(a.position("z"));
    CHECK_THROWS_AS(FeatureSpace(FeatureMethod::bow(), {"x", "x"}), ValidationError);
    const auto back = FeatureSpace::from_json(a.to_json());
    CHECK(back.digest() == a.digest());
    CHECK(back.vocabulary() == a.vocabulary());
}

TEST_CASE("vectors are consistent with their documents") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<TokenSequence> train;
        for (int d = 0; d < 5; ++d) {
            Tokens t(1 + rng.below(8));
            for (auto &w : t) {
                w = "t" + std::to_string(rng.below(10));
            }
            train.push_back(doc(t));
        }
        for (const auto &method : all_feature_methods()) {
            std::optional<FeatureSpace> space;
            try {
                space = build_feature_space(train, method);
            } catch (const DegenerateDataError &) {
                continue;
            }
            std::set<std::string> vocab(space->vocabulary().begin(), space->vocabulary().end());
            CHECK(vocab.size() == space->size());
            for (const auto &d : train) {
                const auto keys = feature_keys(d.tokens, method);
                const auto v = vectorize(d, *space);
                double total = 0;
                for (const auto &[pos, val] : v.entries) {
                    CHECK(pos < space->size());
                    total += val;
                    if (method.binary()) {
                        CHECK(val == 1.0);
                    }
                }
                for (const auto &k : keys) {
                    CHECK(vocab.contains(k));
                }
                if (method.binary()) {
                    CHECK(total == static_cast<double>(std::set<std::string>(keys.begin(), keys.end()).size()));
                } else {
                    CHECK(total == static_cast<double>(keys.size()));
                }
            }
        }
    }
}

TEST_CASE("synthetic train split vocabulary matches a set count") {
    const auto corpus = generate(SynthSpec{});
    const auto sw = StopwordSet::load_default();
    std::vector<TokenSequence> docs;
    for (const auto &e : corpus.entries) {
        docs.push_back(preprocess_entry(e, sw));
    }
    const auto split = split_train_test(docs, 0.8, 42);
    for (const auto &method : all_feature_methods()) {
        std::set<std::string> keys;
        for (const auto &d : split.train) {
            const auto n = method.binary() ? static_cast<std::size_t>(method.n) : 1;
            for (std::size_t i = 0; i + n <= d.tokens.size(); ++i) {
                std::string key = d.tokens[i];
                for (std::size_t k = 1; k < n; ++k) {
                    key += " " + d.tokens[i + k];
                }
                keys.insert(key);
            }
        }
        CHECK(build_feature_space(split.train, method).size() == keys.size());
    }
}

TEST_CASE("vector cache round trip and validation") {
    const FeatureSpace space(FeatureMethod::ngram(2), {"a b", "b c"});
    const std::vector<LabeledVector> data{{"1", LabelClass::M, vectorize(doc({"a", "b", "c"}), space)},
                                          {"2", LabelClass::T, vectorize(doc({"q"}), space)}};
    const auto back = parse_vectors(serialize_vectors(data), space);
    REQUIRE(back.size() == 2);
    CHECK(back[0].vector == data[0].vector);
    CHECK(back[1].label == LabelClass::T);
    CHECK_THROWS_AS(parse_vectors(R"({"id":"1","label":"M","entries":[[5,1]]})", space), ContractError);
    CHECK_THROWS_AS(parse_vectors(R"({"id":"1","label":"M","entries":[[0,2]]})", space), ContractError);
    const FeatureSpace other(FeatureMethod::ngram(2), {"x y"});
    CHECK_THROWS_AS(check_space(data, other), ContractError);
}

TEST_CASE("split arithmetic and determinism") {
    std::vector<TokenSequence> docs;
    for (int i = 0; i < 524; ++i) {
        docs.push_back(doc({"w"}, i % 5 < 2 ? LabelClass::M : LabelClass::T, std::to_string(i)));
    }
    const auto a = split_train_test(docs, 0.8, 42);
    CHECK(a.train.size() == 419);
    CHECK(a.test.size() == 105);
    CHECK(a.train_counts.m + a.test_counts.m == 210);
    const auto b = split_train_test(docs, 0.8, 42);
    CHECK(a.train == b.train);
    std::multiset<std::string> all;
    for (const auto &d : a.train) {
        all.insert(d.tweet_id);
    }
    for (const auto &d : a.test) {
        all.insert(d.tweet_id);
    }
    CHECK(all.size() == 524);
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == 524);

    std::vector<TokenSequence> ten(docs.begin(), docs.begin() + 10);
    const auto s1 = split_train_test(ten, 0.8, 1);
    const auto s2 = split_train_test(ten, 0.8, 2);
    CHECK(s1.train.size() == 8);
    CHECK(s2.test.size() == 2);
    CHECK(s1.train != s2.train);
}

TEST_CASE("split rejects bad ratios and degenerate sides") {
    std::vector<TokenSequence> docs{doc({"a"}), doc({"b"}), doc({"c"})};
    CHECK_THROWS_AS(split_train_test(docs, 0.0, 1), ContractError);
    CHECK_THROWS_AS(split_train_test(docs, 1.0, 1), ContractError);
    CHECK_THROWS_AS(split_train_test(std::vector<TokenSequence>{doc({"a"})}, 0.5, 1), ContractError);
    CHECK_THROWS_AS(split_train_test(docs, 0.1, 1), DegenerateDataError);
    CHECK(train_size_for(524, 0.8) == 419);
    CHECK(train_size_for(10, 0.7) == 7);
    CHECK(train_size_for(100, 0.29) == 29);
}
