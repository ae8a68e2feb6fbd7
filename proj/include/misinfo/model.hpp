#pragma once

#include "misinfo/decision_tree.hpp"
#include "misinfo/features.hpp"
#include "misinfo/linear_models.hpp"
#include "misinfo/naive_bayes.hpp"
#include "misinfo/random_forest.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace misinfo {

enum class ModelType { nb, dt, rf, svm, mem };

std::string_view to_string(ModelType type);  // nb, dt, ...
std::string_view display_name(ModelType type);  // NB, DT, ...
ModelType parse_model_type(std::string_view name);
/// Grid order: NB, DT, MEM, RF, SVM.
std::vector<ModelType> all_model_types();

using HyperValue = std::variant<bool, std::int64_t, double>;
using Hyperparameters = std::map<std::string, HyperValue>;

/// Defaults for every accepted key of a model type.
Hyperparameters default_hyperparameters(ModelType type);
/// Overlays `overrides` on the defaults. Unknown keys and mistyped values
/// throw ValidationError; integers are accepted where reals are expected.
Hyperparameters resolve_hyperparameters(ModelType type, const Hyperparameters &overrides);
/// key=value parsing for the CLI, typed against the defaults.
Hyperparameters parse_hyperparameter(ModelType type, std::string_view assignment, Hyperparameters into = {});

struct ModelConfig {
    ModelType type = ModelType::nb;
    Hyperparameters hyperparameters;  // overrides; empty means defaults
    std::uint64_t seed = 0;
};

struct TrainingMeta {
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    double final_objective = 0.0;
};

struct Prediction {
    LabelClass label = LabelClass::T;
    double score = 0.0;  // >0 leans T: margin, log-odds, or vote/leaf share difference
    std::optional<ClassScores> per_class;
};

struct TrainedModel {
    ModelType type = ModelType::nb;
    FeatureMethod method;
    std::uint64_t space_digest = 0;
    std::size_t num_features = 0;
    Hyperparameters hyperparameters;  // resolved
    TrainingMeta meta;
    std::variant<NaiveBayesModel, DecisionTree, RandomForest, LinearModel> parameters;
};

/// Deterministic in (config.seed, input order). Throws DegenerateDataError
/// without both classes, NumericError if optimization blows up.
TrainedModel train(const ModelConfig &config, const FeatureSpace &space, std::span<const LabeledVector> data);

/// Throws ContractError when `v` was built over another feature space.
Prediction predict(const TrainedModel &model, const FeatureVector &v);

/// Only valid for NB models.
ClassScores nb_log_posterior(const TrainedModel &model, const FeatureVector &v);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const TrainedModel &model);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel &model, const std::filesystem::path &path);
TrainedModel load_model(const std::filesystem::path &path);

}  // namespace misinfo
