#include "misinfo/linear_models.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace misinfo;
using testing::labeled;
using testing::sparse;

namespace {

std::vector<oracle::Example> dense_of(const std::vector<testing::DenseExample> &rows) {
    std::vector<oracle::Example> out;
    for (const auto &r : rows) {
        out.push_back({r.x, r.label == LabelClass::T});
    }
    return out;
}

double relative_error(const std::vector<double> &a, const std::vector<double> &b) {
    double diff = 0;
    double na = 0;
    double nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

}  // namespace

TEST_CASE("sign rule: non-negative margin is T") {
    const LinearModel m{{1.0, -2.0}, 0.5};
    CHECK(m.margin(sparse({1, 1})) == doctest::Approx(-0.5));
    CHECK(m.predict(sparse({1, 1})) == LabelClass::M);
    CHECK(m.predict(sparse({0, 0})) == LabelClass::T);
    CHECK(LinearModel{{1.0}, -1.0}.predict(sparse({1})) == LabelClass::T);
    CHECK(signed_label(LabelClass::T) == 1);
    CHECK(signed_label(LabelClass::M) == -1);
}

TEST_CASE("svm_update without hinge violation only shrinks") {
    LinearModel m{{2.0, 0.0}, 0.0};
    // margin = 2 >= 1 at step 4: w *= 1 - 1/4.
    svm_update(m, sparse({1, 0}), 1, 4, 1.0);
    CHECK(m.weights[0] == doctest::Approx(1.5));
    CHECK(m.bias == 0.0);
}

TEST_CASE("svm_update on a misclassified example adds label * eta * x") {
    LinearModel m{{1.0, 1.0}, 0.0};
    const double lambda = 0.1;
    const std::size_t step = 5;
    const double eta = 1.0 / (lambda * step);
    svm_update(m, sparse({1, 2}), -1, step, lambda);
    CHECK(m.weights[0] == doctest::Approx((1 - eta * lambda) * 1.0 - eta * 1));
    CHECK(m.weights[1] == doctest::Approx((1 - eta * lambda) * 1.0 - eta * 2));
    CHECK(m.bias == doctest::Approx(-eta));
}

TEST_CASE("svm objective matches the independent formula") {
    const auto rows = testing::load_dense("svm_separable.jsonl");
    const auto data = testing::to_labeled(rows);
    const LinearModel m{{0.3, -0.2, 0.1, 0.0, -0.4, 0.2}, 0.1};
    CHECK(svm_objective(m, data, 1e-3) ==
          doctest::Approx(oracle::hinge_objective(m.weights, m.bias, dense_of(rows), 1e-3)).epsilon(1e-12));
}

TEST_CASE("pegasos separates the bundled fixture and lowers the objective") {
    const auto rows = testing::load_dense("svm_separable.jsonl");
    const auto data = testing::to_labeled(rows);
    TrainingTrace trace;
    const auto model = train_svm(data, 6, SvmParams{}, 42, &trace);
    for (const auto &d : data) {
        CHECK(model.predict(d.vector) == d.label);
    }
    REQUIRE(trace.objective.size() == 50);
    CHECK(trace.epochs == 50);
    CHECK(trace.objective.back() < trace.objective.front());
    // Recomputed independently from the returned weights.
    CHECK(trace.objective.back() ==
          doctest::Approx(oracle::hinge_objective(model.weights, model.bias, dense_of(rows), 1e-3)).epsilon(1e-9));
}

TEST_CASE("ten-epoch run on a hand-made separable set") {
    const std::vector<LabeledVector> data{labeled("1", LabelClass::T, {2, 0}), labeled("2", LabelClass::T, {3, 1}),
                                          labeled("3", LabelClass::T, {2, 1}), labeled("4", LabelClass::M, {0, 2}),
                                          labeled("5", LabelClass::M, {1, 3}), labeled("6", LabelClass::M, {0, 3})};
    TrainingTrace trace;
    const auto model = train_svm(data, 2, SvmParams{1e-3, 10}, 1, &trace);
    CHECK(trace.objective.back() < trace.objective.front());
    for (const auto &d : data) {
        CHECK(model.predict(d.vector) == d.label);
    }
}

TEST_CASE("svm training is seeded") {
    const auto data = testing::to_labeled(testing::load_dense("svm_separable.jsonl"));
    const auto a = train_svm(data, 6, SvmParams{1e-3, 5}, 3);
    const auto b = train_svm(data, 6, SvmParams{1e-3, 5}, 3);
    const auto c = train_svm(data, 6, SvmParams{1e-3, 5}, 4);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.weights != c.weights);
}

TEST_CASE("maxent gradient matches finite differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t f = 1 + rng.below(5);
        const std::size_t n = 2 + rng.below(7);
        std::vector<oracle::Example> dense;
        std::vector<LabeledVector> batch;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> x(f);
            for (auto &v : x) {
                v = static_cast<double>(rng.below(4));
            }
            const bool is_t = rng.below(2) == 1;
            dense.push_back({x, is_t});
            batch.push_back(labeled(std::to_string(i), is_t ? LabelClass::T : LabelClass::M, x));
        }
        LinearModel m;
        m.weights.resize(f);
        for (auto &w : m.weights) {
            w = rng.unit() * 2 - 1;
        }
        m.bias = rng.unit() - 0.5;
        const double l2 = rng.unit() * 0.1;
        const auto g = maxent_gradient(m, batch, l2);
        auto analytic = g.weights;
        analytic.push_back(g.bias);
        const auto numeric = oracle::finite_difference(m.weights, m.bias, dense, l2);
        CHECK(relative_error(analytic, numeric) < 1e-4);
        CHECK(maxent_objective(m, batch, l2) ==
              doctest::Approx(oracle::logistic_objective(m.weights, m.bias, dense, l2)).epsilon(1e-12));
    }
}

TEST_CASE("maxent gradient symmetry and regularizer dominance") {
    const std::vector<LabeledVector> balanced{labeled("1", LabelClass::T, {1, 0}), labeled("2", LabelClass::M, {0, 1})};
    const LinearModel zero{{0.0, 0.0}, 0.0};
    CHECK(maxent_gradient(zero, balanced, 1e-3).bias == doctest::Approx(0.0));

    const LinearModel m{{0.5, -1.5}, 0.2};
    const double big = 1e6;
    const auto g = maxent_gradient(m, balanced, big);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(g.weights[j] / (big * m.weights[j]) == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("maxent objective never rises on the bundled toy set") {
    const auto data = testing::to_labeled(testing::load_dense("svm_separable.jsonl"));
    TrainingTrace trace;
    const auto model = train_maxent(data, 6, MaxEntParams{0.05, 1e-3, 1e-6, 300}, &trace);
    REQUIRE(trace.objective.size() >= 2);
    for (std::size_t i = 1; i < trace.objective.size(); ++i) {
        CHECK(trace.objective[i] <= trace.objective[i - 1] + 1e-15);
    }
    std::size_t correct = 0;
    for (const auto &d : data) {
        correct += model.predict(d.vector) == d.label ? 1 : 0;
    }
    CHECK(correct == data.size());
}

TEST_CASE("maxent stops on the tolerance and reports divergence") {
    const std::vector<LabeledVector> data{labeled("1", LabelClass::T, {1}), labeled("2", LabelClass::M, {0})};
    TrainingTrace trace;
    train_maxent(data, 1, MaxEntParams{0.5, 1.0, 1e-3, 5000}, &trace);
    CHECK(trace.epochs < 5000);
    // A huge step on large counts overflows.
    const std::vector<LabeledVector> wild{labeled("1", LabelClass::T, {1e200}), labeled("2", LabelClass::M, {-1e200})};
    CHECK_THROWS_AS(train_maxent(wild, 1, MaxEntParams{1e200, 0.0, 1e-6, 50}), NumericError);
}
