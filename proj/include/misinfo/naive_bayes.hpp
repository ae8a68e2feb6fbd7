#pragma once

#include "misinfo/features.hpp"

#include <array>
#include <span>
#include <vector>

namespace misinfo {

/// Index of M/T in two-class arrays.
inline constexpr std::size_t kClassM = 0;
inline constexpr std::size_t kClassT = 1;

std::size_t binary_index(LabelClass label);
LabelClass binary_label(std::size_t index);
/// Throws DegenerateDataError unless both M and T occur, ContractError on other labels.
std::array<std::size_t, 2> binary_class_counts(std::span<const LabeledVector> data);

struct ClassScores {
    double m = 0.0;
    double t = 0.0;

    /// Argmax, ties to T.
    [[nodiscard]] LabelClass label() const { return m > t ? LabelClass::M : LabelClass::T; }
};

/// Naive Bayes with Laplace smoothing. Count features (BoW) use the
/// multinomial event model; binary features (n-grams) use the Bernoulli model
/// over the whole vocabulary, so absent features contribute log(1 - p).
class NaiveBayesModel {
public:
    NaiveBayesModel() = default;
    /// Derives probabilities from sufficient statistics.
    NaiveBayesModel(bool bernoulli, double alpha, std::array<std::size_t, 2> doc_counts,
                    std::array<std::vector<double>, 2> feature_counts);

    static NaiveBayesModel fit(std::span<const LabeledVector> data, std::size_t num_features, bool bernoulli,
                               double alpha);

    /// log P(c) + sum of per-feature log likelihoods (unnormalized joint).
    [[nodiscard]] ClassScores log_posterior(const FeatureVector &v) const;

    /// Smoothed P(feature | class): per-token for multinomial, P(x = 1) for Bernoulli.
    [[nodiscard]] double feature_probability(std::size_t cls, std::uint32_t feature) const;
    [[nodiscard]] double prior(std::size_t cls) const;

    [[nodiscard]] bool bernoulli() const noexcept { return bernoulli_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const std::array<std::size_t, 2> &doc_counts() const noexcept { return doc_counts_; }
    /// Multinomial: summed feature values per class. Bernoulli: document frequency per class.
    [[nodiscard]] const std::array<std::vector<double>, 2> &feature_counts() const noexcept { return feature_counts_; }
    [[nodiscard]] std::size_t num_features() const noexcept { return feature_counts_[0].size(); }

private:
    bool bernoulli_ = false;
    double alpha_ = 1.0;
    std::array<std::size_t, 2> doc_counts_{};
    std::array<std::vector<double>, 2> feature_counts_;
    std::array<double, 2> log_prior_{};
    std::array<std::vector<double>, 2> log_p_;      // log P(w|c) or log P(x=1|c)
    std::array<std::vector<double>, 2> log_not_p_;  // Bernoulli only: log P(x=0|c)
    std::array<double, 2> sum_log_not_p_{};
};

}  // namespace misinfo
