#pragma once

#include "misinfo/annotation.hpp"
#include "misinfo/eval.hpp"
#include "misinfo/features.hpp"
#include "misinfo/model.hpp"
#include "misinfo/preprocess.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace misinfo {

struct ExperimentConfig {
    std::vector<ModelType> models = all_model_types();
    std::vector<FeatureMethod> methods = all_feature_methods();
    double ratio = 0.8;
    std::uint64_t seed = 42;
    /// Draw a fresh split per method (seed derived from the method) instead of sharing one.
    bool resplit_per_method = false;
    std::map<ModelType, Hyperparameters> hyperparameters;
    /// Concurrent cells; 0 picks the hardware concurrency.
    unsigned threads = 0;

    /// Throws ValidationError.
    void validate() const;
};

struct MethodStats {
    FeatureMethod method;
    std::size_t vocabulary = 0;
    ClassCounts train;
    ClassCounts test;
    std::size_t empty_train_docs = 0;  // excluded from training
};

struct ExperimentResult {
    std::vector<GridCell> cells;  // grid order
    std::vector<MethodStats> methods;
    std::size_t documents = 0;     // binary (M/T) documents after preprocessing
    std::size_t discarded = 0;     // I/N/U entries dropped before the split

    [[nodiscard]] bool ok() const;
};

using ExperimentLog = std::function<void(const std::string &)>;

/// Binary filter, preprocessing, split, then every (model, method) cell. Cells
/// run in parallel but the result does not depend on scheduling. A failing
/// cell is recorded with its message and the rest still run.
ExperimentResult run_experiment(std::span<const LabeledEntry> labeled, const StopwordSet &stopwords,
                                const ExperimentConfig &config, const ExperimentLog &log = {});

/// Same, from already preprocessed documents (labels required).
ExperimentResult run_experiment(std::vector<TokenSequence> docs, const ExperimentConfig &config,
                                const ExperimentLog &log = {});

}  // namespace misinfo
