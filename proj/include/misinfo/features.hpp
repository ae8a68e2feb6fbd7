#pragma once

#include "misinfo/common.hpp"
#include "misinfo/labels.hpp"
#include "misinfo/preprocess.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace misinfo {

struct FeatureMethod {
    enum class Kind { bow, ngram };
    Kind kind = Kind::bow;
    int n = 0;  // 1..3 for ngram, 0 for bow

    static FeatureMethod bow() { return {Kind::bow, 0}; }
    static FeatureMethod ngram(int n);

    [[nodiscard]] bool binary() const noexcept { return kind == Kind::ngram; }
    /// bow, unigram, bigram, trigram
    [[nodiscard]] std::string name() const;
    /// Grid labels: BoW, uni-gram, bi-grams, tri-grams
    [[nodiscard]] std::string display_name() const;
    static FeatureMethod parse(std::string_view name);

    friend bool operator==(const FeatureMethod &, const FeatureMethod &) = default;
};

/// The four methods in grid order.
std::vector<FeatureMethod> all_feature_methods();

/// The (J - n + 1) contiguous n-tuples of `tokens`, or none when J < n.
std::vector<std::vector<std::string>> extract_ngrams(std::span<const std::string> tokens, int n);

/// Feature keys of one document: tokens for BoW, space-joined n-tuples otherwise.
std::vector<std::string> feature_keys(std::span<const std::string> tokens, const FeatureMethod &method);

class FeatureSpace {
public:
    FeatureSpace(FeatureMethod method, std::vector<std::string> vocabulary);

    [[nodiscard]] const FeatureMethod &method() const noexcept { return method_; }
    [[nodiscard]] const std::vector<std::string> &vocabulary() const noexcept { return vocabulary_; }
    [[nodiscard]] std::size_t size() const noexcept { return vocabulary_.size(); }
    [[nodiscard]] std::optional<std::uint32_t> position(const std::string &key) const;
    /// Identity of (method, vocabulary); vectors and models carry it.
    [[nodiscard]] std::uint64_t digest() const noexcept { return digest_; }

    [[nodiscard]] std::string to_json() const;
    static FeatureSpace from_json(std::string_view text);
    void save(const std::filesystem::path &path) const;
    static FeatureSpace load(const std::filesystem::path &path);

private:
    FeatureMethod method_;
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::uint64_t digest_ = 0;
};

/// Vocabulary in first-occurrence order over the training documents.
/// Throws DegenerateDataError when no document yields a feature.
FeatureSpace build_feature_space(std::span<const TokenSequence> train_docs, const FeatureMethod &method);

struct FeatureVector {
    std::uint64_t space_digest = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;  // sorted by position, no zeros

    [[nodiscard]] double value(std::uint32_t position) const;
    [[nodiscard]] double dot(std::span<const double> weights) const;

    friend bool operator==(const FeatureVector &, const FeatureVector &) = default;
};

/// BoW: per-document counts; n-grams: 1 per present tuple. Out-of-vocabulary
/// keys are dropped.
FeatureVector vectorize(const TokenSequence &doc, const FeatureSpace &space);

struct LabeledVector {
    std::string id;
    LabelClass label;
    FeatureVector vector;
};

/// Throws ContractError unless every vector was built over `space`.
void check_space(std::span<const LabeledVector> data, const FeatureSpace &space);

// Vectorized dataset cache: JSONL {id, label, entries: [[position, value], ...]}
// next to the FeatureSpace sidecar.
std::string serialize_vectors(std::span<const LabeledVector> data);
std::vector<LabeledVector> parse_vectors(std::string_view content, const FeatureSpace &space);

// ---- train/test split ------------------------------------------------------

struct ClassCounts {
    std::size_t m = 0;
    std::size_t t = 0;
    std::size_t other = 0;
};

template <typename Item>
struct SplitResult {
    std::vector<Item> train;
    std::vector<Item> test;
    std::uint64_t seed = 0;
    ClassCounts train_counts;
    ClassCounts test_counts;
};

/// floor(ratio * n), guarding against representation error just below an integer.
std::size_t train_size_for(std::size_t n, double ratio);

namespace detail {
inline void count_label(ClassCounts &counts, const std::optional<LabelClass> &label) {
    if (label == LabelClass::M) {
        ++counts.m;
    } else if (label == LabelClass::T) {
        ++counts.t;
    } else {
        ++counts.other;
    }
}
inline std::optional<LabelClass> label_of(const LabeledVector &v) { return v.label; }
inline std::optional<LabelClass> label_of(const TokenSequence &s) { return s.label; }
}  // namespace detail

/// Seeded shuffle, then the first floor(ratio * n) items train and the rest test.
template <typename Item>
SplitResult<Item> split_train_test(std::vector<Item> data, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ContractError("split ratio must lie strictly between 0 and 1");
    }
    if (data.size() < 2) {
        throw ContractError("need at least two items to split");
    }
    const auto train_n = train_size_for(data.size(), ratio);
    if (train_n == 0 || train_n == data.size()) {
        throw DegenerateDataError("split leaves one side empty; adjust the ratio or add data");
    }
    Rng rng(seed);
    rng.shuffle(data);
    SplitResult<Item> out;
    out.seed = seed;
    out.train.assign(std::make_move_iterator(data.begin()), std::make_move_iterator(data.begin() + static_cast<std::ptrdiff_t>(train_n)));
    out.test.assign(std::make_move_iterator(data.begin() + static_cast<std::ptrdiff_t>(train_n)), std::make_move_iterator(data.end()));
    for (const auto &item : out.train) {
        detail::count_label(out.train_counts, detail::label_of(item));
    }
    for (const auto &item : out.test) {
        detail::count_label(out.test_counts, detail::label_of(item));
    }
    return out;
}

}  // namespace misinfo
