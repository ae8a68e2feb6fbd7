#include "misinfo/decision_tree.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

namespace misinfo {

double gini(std::size_t m, std::size_t t) {
    const auto n = static_cast<double>(m + t);
    if (n == 0.0) {
        return 0.0;
    }
    const double pm = static_cast<double>(m) / n;
    const double pt = static_cast<double>(t) / n;
    return 1.0 - pm * pm - pt * pt;
}

namespace {

struct ValueCount {
    double value;
    std::size_t m;
    std::size_t t;
};

bool better(const SplitDecision &candidate, const std::optional<SplitDecision> &best) {
    if (!best) {
        return true;
    }
    if (candidate.gain > best->gain + kGainTolerance) {
        return true;
    }
    if (candidate.gain < best->gain - kGainTolerance) {
        return false;
    }
    if (candidate.feature != best->feature) {
        return candidate.feature < best->feature;
    }
    return candidate.threshold < best->threshold;
}

// Split search over data[rows]; `candidate` flags the eligible features.
std::optional<SplitDecision> search(std::span<const LabeledVector> data, std::span<const std::size_t> rows,
                                    std::span<const std::uint32_t> candidates, std::size_t min_leaf) {
    std::size_t total_m = 0;
    std::size_t total_t = 0;
    for (const auto r : rows) {
        (binary_index(data[r].label) == kClassM ? total_m : total_t) += 1;
    }
    const double parent = gini(total_m, total_t);
    if (parent == 0.0) {
        return std::nullopt;
    }
    const auto n = static_cast<double>(rows.size());

    std::unordered_map<std::uint32_t, std::size_t> slot;
    slot.reserve(candidates.size());
    for (const auto f : candidates) {
        slot.emplace(f, slot.size());
    }
    std::vector<std::vector<ValueCount>> nonzero(slot.size());
    for (const auto r : rows) {
        const bool is_m = binary_index(data[r].label) == kClassM;
        for (const auto &[pos, val] : data[r].vector.entries) {
            const auto it = slot.find(pos);
            if (it != slot.end() && val != 0.0) {
                nonzero[it->second].push_back({val, is_m ? 1U : 0U, is_m ? 0U : 1U});
            }
        }
    }

    std::optional<SplitDecision> best;
    std::vector<ValueCount> values;
    for (const auto &[feature, index] : slot) {
        auto &nz = nonzero[index];
        if (nz.empty()) {
            continue;  // constant zero in this node
        }
        std::sort(nz.begin(), nz.end(), [](const ValueCount &a, const ValueCount &b) { return a.value < b.value; });
        values.clear();
        std::size_t nz_m = 0;
        std::size_t nz_t = 0;
        for (const auto &vc : nz) {
            nz_m += vc.m;
            nz_t += vc.t;
            if (!values.empty() && values.back().value == vc.value) {
                values.back().m += vc.m;
                values.back().t += vc.t;
            } else {
                values.push_back(vc);
            }
        }
        if (const std::size_t zm = total_m - nz_m, zt = total_t - nz_t; zm + zt > 0) {
            const ValueCount zero{0.0, zm, zt};
            values.insert(std::lower_bound(values.begin(), values.end(), 0.0,
                                           [](const ValueCount &a, double v) { return a.value < v; }),
                          zero);
        }
        std::size_t left_m = 0;
        std::size_t left_t = 0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            left_m += values[i].m;
            left_t += values[i].t;
            const std::size_t left_n = left_m + left_t;
            const std::size_t right_n = rows.size() - left_n;
            if (left_n < min_leaf || right_n < min_leaf) {
                continue;
            }
            const double weighted = (static_cast<double>(left_n) * gini(left_m, left_t) +
                                     static_cast<double>(right_n) * gini(total_m - left_m, total_t - left_t)) /
                                    n;
            const SplitDecision candidate{feature, (values[i].value + values[i + 1].value) / 2.0, parent - weighted};
            if (candidate.gain > kGainTolerance && better(candidate, best)) {
                best = candidate;
            }
        }
    }
    return best;
}

}  // namespace

std::optional<SplitDecision> best_split(std::span<const LabeledVector> rows, std::span<const std::uint32_t> candidates) {
    if (rows.empty()) {
        throw ContractError("best_split needs at least one row");
    }
    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return search(rows, all, candidates, 1);
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) {
        throw FormatError("a decision tree needs at least one node");
    }
    const auto count = static_cast<std::int32_t>(nodes_.size());
    for (std::int32_t i = 0; i < count; ++i) {
        const auto &node = nodes_[static_cast<std::size_t>(i)];
        // children always follow their parent in preorder
        if (!node.leaf() && (node.left <= i || node.right <= i || node.left >= count || node.right >= count)) {
            throw FormatError(fmt::format("decision tree node {} has invalid children", i));
        }
    }
}

DecisionTree DecisionTree::fit(std::span<const LabeledVector> data, std::size_t num_features,
                               const TreeParams &params) {
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    TreeParams all = params;
    all.max_features = 0;
    return grow(data, std::move(rows), num_features, all, nullptr);
}

DecisionTree DecisionTree::grow(std::span<const LabeledVector> data, std::vector<std::size_t> rows,
                                std::size_t num_features, const TreeParams &params, Rng *rng) {
    if (rows.empty()) {
        throw DegenerateDataError("cannot grow a tree from zero rows");
    }
    if (params.max_depth < 0 || params.min_samples_leaf < 1) {
        throw ValidationError("max_depth must be >= 0 and min_samples_leaf >= 1");
    }
    const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
    const bool sample = params.max_features > 0 && params.max_features < num_features;
    if (sample && rng == nullptr) {
        throw ContractError("feature sampling needs a random source");
    }
    std::vector<std::uint32_t> all_features(num_features);
    std::iota(all_features.begin(), all_features.end(), std::uint32_t{0});

    std::vector<TreeNode> nodes;
    std::vector<std::uint32_t> permutation;
    // returns the index of the subtree root
    auto build = [&](auto &&self, std::vector<std::size_t> node_rows, int depth) -> std::int32_t {
        std::size_t m = 0;
        for (const auto r : node_rows) {
            m += binary_index(data[r].label) == kClassM ? 1 : 0;
        }
        const std::size_t t = node_rows.size() - m;
        const auto index = static_cast<std::int32_t>(nodes.size());
        TreeNode node;
        node.samples = node_rows.size();
        node.distribution = {static_cast<double>(m) / static_cast<double>(node.samples),
                             static_cast<double>(t) / static_cast<double>(node.samples)};
        nodes.push_back(node);

        if (depth >= params.max_depth || m == 0 || t == 0 || node_rows.size() < 2 * min_leaf) {
            return index;
        }
        std::optional<SplitDecision> split;
        if (!sample) {
            split = search(data, node_rows, all_features, min_leaf);
        } else {
            permutation = all_features;
            std::size_t drawn = 0;
            while (!split && drawn < num_features) {
                const std::size_t batch_end = std::min(num_features, drawn + params.max_features);
                for (std::size_t i = drawn; i < batch_end; ++i) {
                    const auto j = i + static_cast<std::size_t>(rng->below(num_features - i));
                    std::swap(permutation[i], permutation[j]);
                }
                split = search(data, node_rows,
                               std::span<const std::uint32_t>(permutation).subspan(drawn, batch_end - drawn), min_leaf);
                drawn = batch_end;
            }
        }
        if (!split) {
            return index;
        }
        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (const auto r : node_rows) {
            (data[r].vector.value(split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
        }
        node_rows.clear();
        node_rows.shrink_to_fit();
        const auto left = self(self, std::move(left_rows), depth + 1);
        const auto right = self(self, std::move(right_rows), depth + 1);
        auto &stored = nodes[static_cast<std::size_t>(index)];
        stored.feature = static_cast<std::int32_t>(split->feature);
        stored.threshold = split->threshold;
        stored.left = left;
        stored.right = right;
        return index;
    };
    build(build, std::move(rows), 0);
    return DecisionTree(std::move(nodes));
}

const TreeNode &DecisionTree::leaf_for(const FeatureVector &v) const {
    std::size_t i = 0;
    while (!nodes_[i].leaf()) {
        const auto &node = nodes_[i];
        i = static_cast<std::size_t>(v.value(static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left
                                                                                                          : node.right);
    }
    return nodes_[i];
}

ClassScores DecisionTree::predict_scores(const FeatureVector &v) const {
    const auto &leaf = leaf_for(v);
    return {leaf.distribution[kClassM], leaf.distribution[kClassT]};
}

LabelClass DecisionTree::predict(const FeatureVector &v) const { return predict_scores(v).label(); }

int DecisionTree::depth() const {
    std::vector<int> level(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes_[i].leaf()) {
            level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
        }
    }
    return deepest;
}

}  // namespace misinfo
