#pragma once

#include "misinfo/naive_bayes.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace misinfo {

struct SplitDecision {
    std::uint32_t feature = 0;
    double threshold = 0.0;  // left: value <= threshold, right: value > threshold
    double gain = 0.0;       // parent Gini minus weighted child Gini
};

/// Gains closer than this are treated as equal; the lower feature index,
/// then the lower threshold, wins.
inline constexpr double kGainTolerance = 1e-12;

double gini(std::size_t m, std::size_t t);

/// Best CART split over `candidates` by weighted Gini; thresholds are midpoints
/// between adjacent distinct observed values (absent features read as 0).
/// nullopt when no candidate split lowers impurity.
std::optional<SplitDecision> best_split(std::span<const LabeledVector> rows, std::span<const std::uint32_t> candidates);

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t samples = 0;
    std::array<double, 2> distribution{};  // class proportions (M, T) at this node

    [[nodiscard]] bool leaf() const noexcept { return feature < 0; }
};

struct TreeParams {
    int max_depth = 20;
    int min_samples_leaf = 1;
    /// Candidate features per split; 0 or >= vocabulary size means all.
    std::size_t max_features = 0;
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes);

    /// Grows a tree over `rows` (indices into data, repeats allowed). With
    /// max_features < num_features each split draws that many candidates from
    /// `rng`, drawing further batches only if a batch yields no split.
    static DecisionTree grow(std::span<const LabeledVector> data, std::vector<std::size_t> rows,
                             std::size_t num_features, const TreeParams &params, Rng *rng);
    static DecisionTree fit(std::span<const LabeledVector> data, std::size_t num_features, const TreeParams &params);

    [[nodiscard]] const TreeNode &leaf_for(const FeatureVector &v) const;
    [[nodiscard]] ClassScores predict_scores(const FeatureVector &v) const;
    [[nodiscard]] LabelClass predict(const FeatureVector &v) const;

    [[nodiscard]] const std::vector<TreeNode> &nodes() const noexcept { return nodes_; }
    [[nodiscard]] int depth() const;

private:
    std::vector<TreeNode> nodes_;
};

}  // namespace misinfo
