#include "misinfo/random_forest.hpp"

#include <cmath>
#include <future>
#include <numeric>
#include <thread>

namespace misinfo {

std::size_t resolve_max_features(int max_features, std::size_t num_features) {
    if (max_features < 0) {
        return num_features;
    }
    if (max_features == 0) {
        return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_features))));
    }
    return std::min(static_cast<std::size_t>(max_features), num_features);
}

LabelClass rf_vote(std::span<const LabelClass> votes) {
    if (votes.empty()) {
        throw ContractError("a forest vote needs at least one tree");
    }
    std::size_t m = 0;
    std::size_t t = 0;
    for (const auto v : votes) {
        (binary_index(v) == kClassM ? m : t) += 1;
    }
    return m > t ? LabelClass::M : LabelClass::T;
}

RandomForest::RandomForest(std::vector<DecisionTree> trees, std::vector<std::uint64_t> tree_seeds)
    : trees_(std::move(trees)), tree_seeds_(std::move(tree_seeds)) {
    if (trees_.empty()) {
        throw FormatError("a forest needs at least one tree");
    }
}

RandomForest RandomForest::fit(std::span<const LabeledVector> data, std::size_t num_features,
                               const ForestParams &params, std::uint64_t seed) {
    binary_class_counts(data);
    if (params.num_trees < 1) {
        throw ValidationError("num_trees must be >= 1");
    }
    const TreeParams tree_params{params.max_depth, params.min_samples_leaf,
                                 resolve_max_features(params.max_features, num_features)};
    const auto count = static_cast<std::size_t>(params.num_trees);
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) {
        seeds[i] = derive_seed(seed, i);
    }
    auto grow_one = [&](std::size_t i) {
        Rng rng(seeds[i]);
        std::vector<std::size_t> rows(data.size());
        if (params.bootstrap) {
            for (auto &r : rows) {
                r = static_cast<std::size_t>(rng.below(data.size()));
            }
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        return DecisionTree::grow(data, std::move(rows), num_features, tree_params, &rng);
    };

    std::vector<DecisionTree> trees(count);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                trees[i] = grow_one(i);
            }
        }));
    }
    for (auto &job : jobs) {
        job.get();
    }
    return {std::move(trees), std::move(seeds)};
}

std::vector<LabelClass> RandomForest::votes(const FeatureVector &v) const {
    std::vector<LabelClass> out;
    out.reserve(trees_.size());
    for (const auto &tree : trees_) {
        out.push_back(tree.predict(v));
    }
    return out;
}

LabelClass RandomForest::predict(const FeatureVector &v) const { return rf_vote(votes(v)); }

ClassScores RandomForest::predict_scores(const FeatureVector &v) const {
    ClassScores s;
    for (const auto label : votes(v)) {
        (binary_index(label) == kClassM ? s.m : s.t) += 1.0;
    }
    const auto n = static_cast<double>(trees_.size());
    s.m /= n;
    s.t /= n;
    return s;
}

}  // namespace misinfo
