#include "misinfo/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace misinfo {

int signed_label(LabelClass label) { return binary_index(label) == kClassT ? 1 : -1; }

namespace {

double squared_norm(std::span<const double> w) {
    return std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_finite(const LinearModel &model, std::size_t epoch, std::string_view what) {
    const bool finite = std::isfinite(model.bias) &&
                        std::all_of(model.weights.begin(), model.weights.end(), [](double w) { return std::isfinite(w); });
    if (!finite) {
        throw NumericError(fmt::format("{} diverged (non-finite weights) at epoch {}", what, epoch), epoch);
    }
}

}  // namespace

// ---- SVM -------------------------------------------------------------------

void svm_update(LinearModel &model, const FeatureVector &x, int y, std::size_t step, double lambda) {
    const double eta = 1.0 / (lambda * static_cast<double>(step));
    const double margin = static_cast<double>(y) * model.margin(x);
    const double shrink = 1.0 - eta * lambda;
    for (auto &w : model.weights) {
        w *= shrink;
    }
    model.bias *= shrink;
    if (margin < 1.0) {
        for (const auto &[pos, val] : x.entries) {
            model.weights[pos] += eta * static_cast<double>(y) * val;
        }
        model.bias += eta * static_cast<double>(y);
    }
}

double svm_objective(const LinearModel &model, std::span<const LabeledVector> data, double lambda) {
    double hinge = 0.0;
    for (const auto &item : data) {
        hinge += std::max(0.0, 1.0 - static_cast<double>(signed_label(item.label)) * model.margin(item.vector));
    }
    return 0.5 * lambda * (squared_norm(model.weights) + model.bias * model.bias) + hinge / static_cast<double>(data.size());
}

LinearModel train_svm(std::span<const LabeledVector> data, std::size_t num_features, const SvmParams &params,
                      std::uint64_t seed, TrainingTrace *trace) {
    binary_class_counts(data);
    if (!(params.lambda > 0.0) || params.epochs < 1) {
        throw ValidationError("SVM needs lambda > 0 and epochs >= 1");
    }
    LinearModel model{std::vector<double>(num_features, 0.0), 0.0};
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::size_t step = 0;
    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
        rng.shuffle(order);
        for (const auto i : order) {
            svm_update(model, data[i].vector, signed_label(data[i].label), ++step, params.lambda);
        }
        check_finite(model, static_cast<std::size_t>(epoch), "SVM");
        if (trace != nullptr) {
            trace->objective.push_back(svm_objective(model, data, params.lambda));
            trace->epochs = static_cast<std::size_t>(epoch);
        }
    }
    return model;
}

// ---- maximum entropy -------------------------------------------------------

double Gradient::norm() const { return std::sqrt(squared_norm(weights) + bias * bias); }

double maxent_objective(const LinearModel &model, std::span<const LabeledVector> batch, double l2) {
    double nll = 0.0;
    for (const auto &item : batch) {
        const double z = model.margin(item.vector);
        const double y = binary_index(item.label) == kClassT ? 1.0 : 0.0;
        nll += softplus(z) - y * z;
    }
    return nll / static_cast<double>(batch.size()) + 0.5 * l2 * squared_norm(model.weights);
}

Gradient maxent_gradient(const LinearModel &model, std::span<const LabeledVector> batch, double l2) {
    Gradient g{std::vector<double>(model.weights.size(), 0.0), 0.0};
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const auto &item : batch) {
        const double y = binary_index(item.label) == kClassT ? 1.0 : 0.0;
        const double residual = (sigmoid(model.margin(item.vector)) - y) * inv_n;
        for (const auto &[pos, val] : item.vector.entries) {
            g.weights[pos] += residual * val;
        }
        g.bias += residual;
    }
    for (std::size_t j = 0; j < g.weights.size(); ++j) {
        g.weights[j] += l2 * model.weights[j];
    }
    return g;
}

LinearModel train_maxent(std::span<const LabeledVector> data, std::size_t num_features, const MaxEntParams &params,
                         TrainingTrace *trace) {
    binary_class_counts(data);
    if (!(params.step > 0.0) || params.l2 < 0.0 || params.max_epochs < 1) {
        throw ValidationError("MaxEnt needs step > 0, l2 >= 0 and max_epochs >= 1");
    }
    LinearModel model{std::vector<double>(num_features, 0.0), 0.0};
    for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
        const auto g = maxent_gradient(model, data, params.l2);
        const double norm = g.norm();
        if (!std::isfinite(norm)) {
            throw NumericError(fmt::format("MaxEnt gradient is not finite at epoch {}", epoch),
                               static_cast<std::size_t>(epoch));
        }
        if (norm < params.tolerance) {
            break;
        }
        for (std::size_t j = 0; j < num_features; ++j) {
            model.weights[j] -= params.step * g.weights[j];
        }
        model.bias -= params.step * g.bias;
        check_finite(model, static_cast<std::size_t>(epoch), "MaxEnt");
        if (trace != nullptr) {
            trace->objective.push_back(maxent_objective(model, data, params.l2));
            trace->epochs = static_cast<std::size_t>(epoch);
        }
    }
    return model;
}

}  // namespace misinfo
