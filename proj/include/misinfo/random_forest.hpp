#pragma once

#include "misinfo/decision_tree.hpp"

#include <span>
#include <vector>

namespace misinfo {

struct ForestParams {
    int num_trees = 100;
    bool bootstrap = true;
    /// Candidates per split; 0 means ceil(sqrt(vocabulary size)), negative means all.
    int max_features = 0;
    int max_depth = 20;
    int min_samples_leaf = 1;
};

std::size_t resolve_max_features(int max_features, std::size_t num_features);

/// Plurality of tree votes; a tie goes to T.
LabelClass rf_vote(std::span<const LabelClass> votes);

class RandomForest {
public:
    RandomForest() = default;
    RandomForest(std::vector<DecisionTree> trees, std::vector<std::uint64_t> tree_seeds);

    /// Tree i draws its bootstrap sample and split candidates from a stream
    /// derived from (seed, i), so the forest does not depend on build order.
    static RandomForest fit(std::span<const LabeledVector> data, std::size_t num_features, const ForestParams &params,
                            std::uint64_t seed);

    [[nodiscard]] std::vector<LabelClass> votes(const FeatureVector &v) const;
    [[nodiscard]] LabelClass predict(const FeatureVector &v) const;
    /// Vote shares (M, T).
    [[nodiscard]] ClassScores predict_scores(const FeatureVector &v) const;

    [[nodiscard]] const std::vector<DecisionTree> &trees() const noexcept { return trees_; }
    [[nodiscard]] const std::vector<std::uint64_t> &tree_seeds() const noexcept { return tree_seeds_; }

private:
    std::vector<DecisionTree> trees_;
    std::vector<std::uint64_t> tree_seeds_;
};

}  // namespace misinfo
