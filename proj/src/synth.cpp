#include "misinfo/synth.hpp"

#include "misinfo/filtering.hpp"
#include "misinfo/preprocess.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

namespace misinfo {

namespace {

// Stream tags so pools, label order, and tweets never share random draws.
constexpr std::uint64_t kPoolStream = 1;
constexpr std::uint64_t kOrderStream = 2;
constexpr std::uint64_t kTweetStream = 3;

constexpr std::string_view kConsonants = "bcdfghjklmnprstvwz";
constexpr std::string_view kVowels = "aeiou";

std::vector<std::string> keyword_pool(const Glossary &glossary) {
    std::vector<std::string> out;
    for (const auto &theme : glossary.themes) {
        out.insert(out.end(), theme.keywords.begin(), theme.keywords.end());
    }
    out.insert(out.end(), glossary.health_keywords.begin(), glossary.health_keywords.end());
    return out;
}

WordPools make_pools(const SynthSpec &spec, const Glossary &glossary) {
    std::unordered_set<std::string> taken;
    for (const auto &kw : keyword_pool(glossary)) {
        for (const auto &tok : boundary_tokens(kw)) {
            taken.insert(tok);
        }
    }
    const auto stopwords = StopwordSet::load_default();
    Rng rng(derive_seed(spec.seed, kPoolStream));
    const auto draw = [&](std::size_t count) {
        std::vector<std::string> pool;
        while (pool.size() < count) {
            std::string w;
            for (int i = 0; i < 5; ++i) {
                const auto letters = i % 2 == 0 ? kConsonants : kVowels;
                w += letters[rng.below(letters.size())];
            }
            if (stem_token(w) != w || stopwords.combined.contains(w) || !taken.insert(w).second) {
                continue;
            }
            pool.push_back(std::move(w));
        }
        return pool;
    };
    WordPools pools;
    pools.shared = draw(spec.vocab_shared);
    pools.m = draw(spec.vocab_m);
    pools.t = draw(spec.vocab_t);
    return pools;
}

template <typename T>
const T &pick(Rng &rng, const std::vector<T> &items) {
    return items[rng.below(items.size())];
}

}  // namespace

void SynthSpec::validate() const {
    if (n_m == 0 || n_t == 0) {
        throw ValidationError("synthetic corpus needs at least one tweet of each class");
    }
    if (min_tokens < 2 || min_tokens > max_tokens) {
        throw ValidationError(fmt::format("length range {}..{} is invalid (need 2 <= min <= max)", min_tokens, max_tokens));
    }
    if (max_tokens > 40) {
        throw ValidationError("max length above 40 words would overflow the 280-character tweet limit");
    }
    if (!(signal >= 0.0 && signal <= 1.0)) {
        throw ValidationError("signal must lie in [0, 1]");
    }
    if (vocab_shared == 0 || vocab_m == 0 || vocab_t == 0) {
        throw ValidationError("word pools must be non-empty");
    }
    if (vocab_shared + vocab_m + vocab_t > 50000) {
        throw ValidationError("word pools are limited to 50000 words in total");
    }
}

std::string SynthSpec::to_json() const {
    return nlohmann::json{{"seed", seed},
                          {"n_m", n_m},
                          {"n_t", n_t},
                          {"vocab_shared", vocab_shared},
                          {"vocab_m", vocab_m},
                          {"vocab_t", vocab_t},
                          {"signal", signal},
                          {"length_range", {min_tokens, max_tokens}}}
        .dump();
}

SynthSpec SynthSpec::from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SynthSpec s;
        s.seed = j.at("seed").get<std::uint64_t>();
        s.n_m = j.at("n_m").get<std::size_t>();
        s.n_t = j.at("n_t").get<std::size_t>();
        s.vocab_shared = j.at("vocab_shared").get<std::size_t>();
        s.vocab_m = j.at("vocab_m").get<std::size_t>();
        s.vocab_t = j.at("vocab_t").get<std::size_t>();
        s.signal = j.at("signal").get<double>();
        s.min_tokens = j.at("length_range").at(0).get<std::size_t>();
        s.max_tokens = j.at("length_range").at(1).get<std::size_t>();
        s.validate();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(fmt::format("synthetic spec: {}", e.what()));
    }
}

WordPools make_word_pools(const SynthSpec &spec) {
    spec.validate();
    return make_pools(spec, load_glossary(default_glossary_path()));
}

LabeledDataset generate(const SynthSpec &spec, const Glossary &glossary) {
    spec.validate();
    const auto pools = make_pools(spec, glossary);
    const auto keywords = keyword_pool(glossary);
    if (keywords.empty()) {
        throw ValidationError("glossary has no keywords to embed");
    }

    std::vector<LabelClass> labels(spec.n_m, LabelClass::M);
    labels.insert(labels.end(), spec.n_t, LabelClass::T);
    Rng order(derive_seed(spec.seed, kOrderStream));
    order.shuffle(labels);

    const auto tweet_base = derive_seed(spec.seed, kTweetStream);
    const auto span = spec.max_tokens - spec.min_tokens + 1;
    std::vector<LabeledEntry> entries;
    entries.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Rng rng(derive_seed(tweet_base, i));
        const auto &class_pool = labels[i] == LabelClass::M ? pools.m : pools.t;
        const auto length = spec.min_tokens + rng.below(span);
        const auto &keyword = pick(rng, keywords);
        const auto keyword_words = std::max<std::size_t>(1, boundary_tokens(keyword).size());
        const auto fillers = length > keyword_words ? length - keyword_words : 1;
        const auto keyword_slot = rng.below(fillers + 1);
        std::vector<std::string> words;
        words.reserve(fillers + 1);
        for (std::size_t slot = 0; slot <= fillers; ++slot) {
            if (slot == keyword_slot) {
                words.push_back(keyword);
            } else if (rng.unit() < spec.signal) {
                words.push_back(pick(rng, class_pool));
            } else {
                words.push_back(pick(rng, pools.shared));
            }
        }
        entries.push_back({TweetRecord{fmt::format("syn{:06}", i + 1), join(words, " "), std::nullopt}, labels[i]});
    }
    return LabeledDataset::from_entries(std::move(entries));
}

LabeledDataset generate(const SynthSpec &spec) {
    return generate(spec, load_glossary(default_glossary_path()));
}

void save_synthetic(const LabeledDataset &corpus, const SynthSpec &spec, const std::filesystem::path &path) {
    save_labeled(corpus.entries, path);
    auto sidecar = path;
    sidecar += ".spec.json";
    write_file_atomic(sidecar, spec.to_json() + "\n");
}

}  // namespace misinfo
