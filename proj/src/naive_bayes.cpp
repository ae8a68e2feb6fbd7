#include "misinfo/naive_bayes.hpp"

#include <cmath>

#include <fmt/format.h>

namespace misinfo {

std::size_t binary_index(LabelClass label) {
    switch (label) {
        case LabelClass::M: return kClassM;
        case LabelClass::T: return kClassT;
        default: throw ContractError(fmt::format("label {} is not a binary class", to_string(label)));
    }
}

LabelClass binary_label(std::size_t index) { return index == kClassM ? LabelClass::M : LabelClass::T; }

std::array<std::size_t, 2> binary_class_counts(std::span<const LabeledVector> data) {
    std::array<std::size_t, 2> counts{};
    for (const auto &item : data) {
        ++counts[binary_index(item.label)];
    }
    if (counts[kClassM] == 0 || counts[kClassT] == 0) {
        throw DegenerateDataError(fmt::format("training data needs both classes (M: {}, T: {})", counts[kClassM],
                                              counts[kClassT]));
    }
    return counts;
}

NaiveBayesModel::NaiveBayesModel(bool bernoulli, double alpha, std::array<std::size_t, 2> doc_counts,
                                 std::array<std::vector<double>, 2> feature_counts)
    : bernoulli_(bernoulli), alpha_(alpha), doc_counts_(doc_counts), feature_counts_(std::move(feature_counts)) {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
        throw ValidationError("Naive Bayes alpha must be positive");
    }
    if (feature_counts_[0].size() != feature_counts_[1].size()) {
        throw FormatError("Naive Bayes class statistics differ in length");
    }
    const double total_docs = static_cast<double>(doc_counts_[0] + doc_counts_[1]);
    const auto vocab = static_cast<double>(num_features());
    for (std::size_t c = 0; c < 2; ++c) {
        log_prior_[c] = std::log(static_cast<double>(doc_counts_[c]) / total_docs);
        const auto &counts = feature_counts_[c];
        log_p_[c].resize(counts.size());
        if (bernoulli_) {
            log_not_p_[c].resize(counts.size());
            const double denom = static_cast<double>(doc_counts_[c]) + 2.0 * alpha_;
            double sum = 0.0;
            for (std::size_t w = 0; w < counts.size(); ++w) {
                const double p = (counts[w] + alpha_) / denom;
                log_p_[c][w] = std::log(p);
                log_not_p_[c][w] = std::log1p(-p);
                sum += log_not_p_[c][w];
            }
            sum_log_not_p_[c] = sum;
        } else {
            double total = 0.0;
            for (const double n : counts) {
                total += n;
            }
            const double denom = total + alpha_ * vocab;
            for (std::size_t w = 0; w < counts.size(); ++w) {
                log_p_[c][w] = std::log((counts[w] + alpha_) / denom);
            }
        }
    }
}

NaiveBayesModel NaiveBayesModel::fit(std::span<const LabeledVector> data, std::size_t num_features, bool bernoulli,
                                     double alpha) {
    const auto doc_counts = binary_class_counts(data);
    std::array<std::vector<double>, 2> counts{std::vector<double>(num_features, 0.0),
                                              std::vector<double>(num_features, 0.0)};
    for (const auto &item : data) {
        auto &row = counts[binary_index(item.label)];
        for (const auto &[pos, val] : item.vector.entries) {
            if (pos >= num_features) {
                throw ContractError("feature position outside the feature space");
            }
            row[pos] += bernoulli ? (val != 0.0 ? 1.0 : 0.0) : val;
        }
    }
    return {bernoulli, alpha, doc_counts, std::move(counts)};
}

ClassScores NaiveBayesModel::log_posterior(const FeatureVector &v) const {
    std::array<double, 2> score{log_prior_[0], log_prior_[1]};
    for (std::size_t c = 0; c < 2; ++c) {
        if (bernoulli_) {
            score[c] += sum_log_not_p_[c];
            for (const auto &[pos, val] : v.entries) {
                if (val != 0.0) {
                    score[c] += log_p_[c][pos] - log_not_p_[c][pos];
                }
            }
        } else {
            for (const auto &[pos, val] : v.entries) {
                score[c] += val * log_p_[c][pos];
            }
        }
    }
    return {score[kClassM], score[kClassT]};
}

double NaiveBayesModel::feature_probability(std::size_t cls, std::uint32_t feature) const {
    return std::exp(log_p_[cls][feature]);
}

double NaiveBayesModel::prior(std::size_t cls) const { return std::exp(log_prior_[cls]); }

}  // namespace misinfo
