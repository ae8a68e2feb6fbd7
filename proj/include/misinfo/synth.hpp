#pragma once

#include "misinfo/annotation.hpp"
#include "misinfo/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace misinfo {

/// Defaults give the labeled study corpus shape: 210 M and 314 T tweets of 2 to 32 words.
struct SynthSpec {
    std::uint64_t seed = 42;
    std::size_t n_m = 210;
    std::size_t n_t = 314;
    std::size_t vocab_shared = 400;
    std::size_t vocab_m = 40;
    std::size_t vocab_t = 40;
    double signal = 0.8;
    std::size_t min_tokens = 2;
    std::size_t max_tokens = 32;

    /// Throws ValidationError.
    void validate() const;

    [[nodiscard]] std::string to_json() const;
    static SynthSpec from_json(std::string_view text);
};

/// Disjoint pools of pronounceable nonsense words, each unchanged by stemming
/// and absent from the stopword lists, drawn deterministically from `seed`.
struct WordPools {
    std::vector<std::string> shared;
    std::vector<std::string> m;
    std::vector<std::string> t;
};
WordPools make_word_pools(const SynthSpec &spec);

/// Each tweet has a word count drawn uniformly from the range; a glossary
/// keyword fills as many slots as it has words (so filtering keeps the tweet,
/// and a length-2 tweet may be all keyword), and every other slot takes a word
/// from its class pool with probability `signal`, otherwise from the shared
/// pool. Tweet i draws from its own stream, so output is identical however
/// the work is scheduled. Labels are interleaved by a seeded shuffle.
LabeledDataset generate(const SynthSpec &spec, const Glossary &glossary);
/// Uses the bundled default glossary.
LabeledDataset generate(const SynthSpec &spec);

/// Writes the labeled JSONL plus `<path>.spec.json` recording the spec.
void save_synthetic(const LabeledDataset &corpus, const SynthSpec &spec, const std::filesystem::path &path);

}  // namespace misinfo
