#pragma once

#include "misinfo/naive_bayes.hpp"

#include <span>
#include <vector>

namespace misinfo {

/// w.x + b; positive margin means T.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    [[nodiscard]] double margin(const FeatureVector &v) const { return v.dot(weights) + bias; }
    [[nodiscard]] LabelClass predict(const FeatureVector &v) const {
        return margin(v) >= 0.0 ? LabelClass::T : LabelClass::M;
    }
};

/// +1 for T, -1 for M.
int signed_label(LabelClass label);

struct TrainingTrace {
    std::size_t epochs = 0;
    std::vector<double> objective;  // value after each epoch
};

// ---- SVM -------------------------------------------------------------------

struct SvmParams {
    double lambda = 1e-3;
    int epochs = 50;
};

/// One Pegasos step at 1-based `step`: eta = 1 / (lambda * step); weights
/// shrink by (1 - eta * lambda) and, when y * (w.x + b) < 1, gain eta * y * x.
/// The bias is the weight of a constant 1 feature, so it shrinks and gains
/// eta * y the same way.
void svm_update(LinearModel &model, const FeatureVector &x, int y, std::size_t step, double lambda);

/// lambda/2 (|w|^2 + b^2) + mean hinge loss.
double svm_objective(const LinearModel &model, std::span<const LabeledVector> data, double lambda);

/// Each epoch visits the examples in a fresh seeded order; returns the last iterate.
LinearModel train_svm(std::span<const LabeledVector> data, std::size_t num_features, const SvmParams &params,
                      std::uint64_t seed, TrainingTrace *trace = nullptr);

// ---- maximum entropy (binary logistic regression) --------------------------

struct MaxEntParams {
    double step = 0.1;
    double l2 = 1e-3;
    double tolerance = 1e-6;
    int max_epochs = 2000;
};

struct Gradient {
    std::vector<double> weights;
    double bias = 0.0;

    [[nodiscard]] double norm() const;
};

/// Mean negative log-likelihood of P(T | x) = sigmoid(w.x + b) plus l2/2 |w|^2.
double maxent_objective(const LinearModel &model, std::span<const LabeledVector> batch, double l2);
Gradient maxent_gradient(const LinearModel &model, std::span<const LabeledVector> batch, double l2);

/// Full-batch gradient descent with a fixed step; stops when the gradient norm
/// drops below tolerance or after max_epochs. Throws NumericError on NaN/Inf.
LinearModel train_maxent(std::span<const LabeledVector> data, std::size_t num_features, const MaxEntParams &params,
                         TrainingTrace *trace = nullptr);

}  // namespace misinfo
