#include "misinfo/model.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace misinfo {

using nlohmann::json;

std::string_view to_string(ModelType type) {
    switch (type) {
        case ModelType::nb: return "nb";
        case ModelType::dt: return "dt";
        case ModelType::rf: return "rf";
        case ModelType::svm: return "svm";
        case ModelType::mem: return "mem";
    }
    return "?";
}

std::string_view display_name(ModelType type) {
    switch (type) {
        case ModelType::nb: return "NB";
        case ModelType::dt: return "DT";
        case ModelType::rf: return "RF";
        case ModelType::svm: return "SVM";
        case ModelType::mem: return "MEM";
    }
    return "?";
}

ModelType parse_model_type(std::string_view name) {
    for (const auto type : {ModelType::nb, ModelType::dt, ModelType::rf, ModelType::svm, ModelType::mem}) {
        if (name == to_string(type) || name == display_name(type)) {
            return type;
        }
    }
    throw ValidationError(fmt::format("unknown model '{}' (nb, dt, rf, svm, mem)", name));
}

std::vector<ModelType> all_model_types() {
    return {ModelType::nb, ModelType::dt, ModelType::mem, ModelType::rf, ModelType::svm};
}

// ---- hyperparameters -------------------------------------------------------

Hyperparameters default_hyperparameters(ModelType type) {
    switch (type) {
        case ModelType::nb: return {{"alpha", 1.0}};
        case ModelType::dt: return {{"max_depth", std::int64_t{20}}, {"min_samples_leaf", std::int64_t{1}}};
        case ModelType::rf:
            return {{"num_trees", std::int64_t{100}},
                    {"bootstrap", true},
                    {"max_features", std::int64_t{0}},
                    {"max_depth", std::int64_t{20}},
                    {"min_samples_leaf", std::int64_t{1}}};
        case ModelType::svm: return {{"lambda", 1e-3}, {"epochs", std::int64_t{50}}};
        case ModelType::mem:
            return {{"step", 0.1}, {"l2", 1e-3}, {"tolerance", 1e-6}, {"max_epochs", std::int64_t{2000}}};
    }
    return {};
}

Hyperparameters resolve_hyperparameters(ModelType type, const Hyperparameters &overrides) {
    auto resolved = default_hyperparameters(type);
    for (const auto &[key, value] : overrides) {
        const auto it = resolved.find(key);
        if (it == resolved.end()) {
            throw ValidationError(fmt::format("unknown hyperparameter '{}' for {}", key, display_name(type)));
        }
        const bool want_double = std::holds_alternative<double>(it->second);
        if (value.index() == it->second.index()) {
            it->second = value;
        } else if (want_double && std::holds_alternative<std::int64_t>(value)) {
            it->second = static_cast<double>(std::get<std::int64_t>(value));
        } else {
            throw ValidationError(fmt::format("hyperparameter '{}' has the wrong type", key));
        }
    }
    return resolved;
}

Hyperparameters parse_hyperparameter(ModelType type, std::string_view assignment, Hyperparameters into) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ValidationError(fmt::format("expected key=value, got '{}'", assignment));
    }
    const std::string key(trim(assignment.substr(0, eq)));
    const std::string text(trim(assignment.substr(eq + 1)));
    const auto defaults = default_hyperparameters(type);
    const auto it = defaults.find(key);
    if (it == defaults.end()) {
        throw ValidationError(fmt::format("unknown hyperparameter '{}' for {}", key, display_name(type)));
    }
    char *end = nullptr;
    if (std::holds_alternative<bool>(it->second)) {
        if (text != "true" && text != "false") {
            throw ValidationError(fmt::format("'{}' expects true or false", key));
        }
        into[key] = text == "true";
    } else if (std::holds_alternative<std::int64_t>(it->second)) {
        const auto v = std::strtoll(text.c_str(), &end, 10);
        if (text.empty() || *end != '\0') {
            throw ValidationError(fmt::format("'{}' expects an integer", key));
        }
        into[key] = static_cast<std::int64_t>(v);
    } else {
        const auto v = std::strtod(text.c_str(), &end);
        if (text.empty() || *end != '\0') {
            throw ValidationError(fmt::format("'{}' expects a number", key));
        }
        into[key] = v;
    }
    return into;
}

namespace {

double real(const Hyperparameters &h, const char *key) { return std::get<double>(h.at(key)); }
int integer(const Hyperparameters &h, const char *key) { return static_cast<int>(std::get<std::int64_t>(h.at(key))); }
bool flag(const Hyperparameters &h, const char *key) { return std::get<bool>(h.at(key)); }

TreeParams tree_params(const Hyperparameters &h) {
    return {integer(h, "max_depth"), integer(h, "min_samples_leaf"), 0};
}

ForestParams forest_params(const Hyperparameters &h) {
    return {integer(h, "num_trees"), flag(h, "bootstrap"), integer(h, "max_features"), integer(h, "max_depth"),
            integer(h, "min_samples_leaf")};
}

}  // namespace

// ---- train / predict -------------------------------------------------------

TrainedModel train(const ModelConfig &config, const FeatureSpace &space, std::span<const LabeledVector> data) {
    if (data.empty()) {
        throw DegenerateDataError("no training vectors");
    }
    check_space(data, space);
    binary_class_counts(data);
    TrainedModel model;
    model.type = config.type;
    model.method = space.method();
    model.space_digest = space.digest();
    model.num_features = space.size();
    model.hyperparameters = resolve_hyperparameters(config.type, config.hyperparameters);
    model.meta.seed = config.seed;
    const auto &h = model.hyperparameters;
    const auto f = space.size();

    switch (config.type) {
        case ModelType::nb:
            model.parameters = NaiveBayesModel::fit(data, f, space.method().binary(), real(h, "alpha"));
            break;
        case ModelType::dt:
            model.parameters = DecisionTree::fit(data, f, tree_params(h));
            break;
        case ModelType::rf:
            model.parameters = RandomForest::fit(data, f, forest_params(h), config.seed);
            break;
        case ModelType::svm: {
            TrainingTrace trace;
            model.parameters = train_svm(data, f, {real(h, "lambda"), integer(h, "epochs")}, config.seed, &trace);
            model.meta.epochs = trace.epochs;
            model.meta.final_objective = trace.objective.empty() ? 0.0 : trace.objective.back();
            break;
        }
        case ModelType::mem: {
            TrainingTrace trace;
            model.parameters = train_maxent(
                data, f, {real(h, "step"), real(h, "l2"), real(h, "tolerance"), integer(h, "max_epochs")}, &trace);
            model.meta.epochs = trace.epochs;
            model.meta.final_objective = trace.objective.empty()
                                             ? maxent_objective(std::get<LinearModel>(model.parameters), data, real(h, "l2"))
                                             : trace.objective.back();
            break;
        }
    }
    return model;
}

Prediction predict(const TrainedModel &model, const FeatureVector &v) {
    if (v.space_digest != model.space_digest) {
        throw ContractError("vector was built over a different feature space than the model");
    }
    for (const auto &[pos, val] : v.entries) {
        if (pos >= model.num_features) {
            throw ContractError("vector position outside the model's feature space");
        }
    }
    return std::visit(
        [&](const auto &params) -> Prediction {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                const double margin = params.margin(v);
                return {margin >= 0.0 ? LabelClass::T : LabelClass::M, margin, std::nullopt};
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                const auto scores = params.log_posterior(v);
                return {scores.label(), scores.t - scores.m, scores};
            } else if constexpr (std::is_same_v<T, DecisionTree>) {
                const auto scores = params.predict_scores(v);
                return {scores.label(), scores.t - scores.m, scores};
            } else {
                const auto scores = params.predict_scores(v);
                return {params.predict(v), scores.t - scores.m, scores};
            }
        },
        model.parameters);
}

ClassScores nb_log_posterior(const TrainedModel &model, const FeatureVector &v) {
    const auto *nb = std::get_if<NaiveBayesModel>(&model.parameters);
    if (nb == nullptr) {
        throw ContractError("nb_log_posterior needs a Naive Bayes model");
    }
    if (v.space_digest != model.space_digest) {
        throw ContractError("vector was built over a different feature space than the model");
    }
    return nb->log_posterior(v);
}

// ---- persistence -----------------------------------------------------------

namespace {

json hyper_to_json(const Hyperparameters &h) {
    json j = json::object();
    for (const auto &[key, value] : h) {
        std::visit([&](const auto &v) { j[key] = v; }, value);
    }
    return j;
}

Hyperparameters hyper_from_json(const json &j) {
    Hyperparameters h;
    for (const auto &[key, value] : j.items()) {
        if (value.is_boolean()) {
            h[key] = value.get<bool>();
        } else if (value.is_number_integer()) {
            h[key] = value.get<std::int64_t>();
        } else if (value.is_number()) {
            h[key] = value.get<double>();
        } else {
            throw FormatError(fmt::format("hyperparameter '{}' has an unsupported type", key));
        }
    }
    return h;
}

json tree_to_json(const DecisionTree &tree) {
    json nodes = json::array();
    for (const auto &n : tree.nodes()) {
        if (n.leaf()) {
            nodes.push_back({{"samples", n.samples}, {"distribution", n.distribution}});
        } else {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"samples", n.samples},
                             {"distribution", n.distribution}});
        }
    }
    return nodes;
}

DecisionTree tree_from_json(const json &j, std::size_t num_features) {
    std::vector<TreeNode> nodes;
    for (const auto &n : j) {
        TreeNode node;
        node.samples = n.at("samples").get<std::size_t>();
        node.distribution = n.at("distribution").get<std::array<double, 2>>();
        if (n.contains("feature")) {
            node.feature = n.at("feature").get<std::int32_t>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<std::int32_t>();
            node.right = n.at("right").get<std::int32_t>();
            if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= num_features) {
                throw FormatError("tree node references a feature outside the space");
            }
        }
        nodes.push_back(node);
    }
    return DecisionTree(std::move(nodes));
}

json params_to_json(const TrainedModel &model) {
    return std::visit(
        [](const auto &p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                return {{"event_model", p.bernoulli() ? "bernoulli" : "multinomial"},
                        {"alpha", p.alpha()},
                        {"doc_counts", {{"M", p.doc_counts()[kClassM]}, {"T", p.doc_counts()[kClassT]}}},
                        {"feature_counts", {{"M", p.feature_counts()[kClassM]}, {"T", p.feature_counts()[kClassT]}}}};
            } else if constexpr (std::is_same_v<T, DecisionTree>) {
                return {{"nodes", tree_to_json(p)}};
            } else if constexpr (std::is_same_v<T, RandomForest>) {
                json trees = json::array();
                for (std::size_t i = 0; i < p.trees().size(); ++i) {
                    trees.push_back({{"seed", p.tree_seeds().at(i)}, {"nodes", tree_to_json(p.trees()[i])}});
                }
                return {{"trees", trees}};
            } else {
                return {{"weights", p.weights}, {"bias", p.bias}};
            }
        },
        model.parameters);
}

}  // namespace

std::string model_to_json(const TrainedModel &model) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["model_type"] = std::string(to_string(model.type));
    j["hyperparameters"] = hyper_to_json(model.hyperparameters);
    j["feature_space_digest"] = hex64(model.space_digest);
    j["feature_method"] = model.method.name();
    j["num_features"] = model.num_features;
    j["training_meta"] = {{"seed", model.meta.seed}, {"epochs", model.meta.epochs},
                          {"final_objective", model.meta.final_objective}};
    j["parameters"] = params_to_json(model);
    return j.dump();
}

TrainedModel model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw FormatError(fmt::format("model file is not valid JSON (truncated?): {}", e.what()));
    }
    try {
        const auto version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw FormatError(
                fmt::format("model format version {} is not supported (expected {})", version, kModelFormatVersion));
        }
        TrainedModel model;
        model.type = parse_model_type(j.at("model_type").get<std::string>());
        model.hyperparameters = resolve_hyperparameters(model.type, hyper_from_json(j.at("hyperparameters")));
        const auto digest = j.at("feature_space_digest").get<std::string>();
        model.space_digest = std::stoull(digest, nullptr, 16);
        model.method = FeatureMethod::parse(j.at("feature_method").get<std::string>());
        model.num_features = j.at("num_features").get<std::size_t>();
        const auto &meta = j.at("training_meta");
        model.meta = {meta.at("seed").get<std::uint64_t>(), meta.at("epochs").get<std::size_t>(),
                      meta.at("final_objective").get<double>()};
        const auto &p = j.at("parameters");
        const auto f = model.num_features;
        switch (model.type) {
            case ModelType::nb: {
                std::array<std::size_t, 2> docs{p.at("doc_counts").at("M").get<std::size_t>(),
                                                p.at("doc_counts").at("T").get<std::size_t>()};
                std::array<std::vector<double>, 2> counts{p.at("feature_counts").at("M").get<std::vector<double>>(),
                                                          p.at("feature_counts").at("T").get<std::vector<double>>()};
                if (counts[0].size() != f) {
                    throw FormatError("Naive Bayes statistics do not match num_features");
                }
                model.parameters = NaiveBayesModel(p.at("event_model").get<std::string>() == "bernoulli",
                                                   p.at("alpha").get<double>(), docs, std::move(counts));
                break;
            }
            case ModelType::dt:
                model.parameters = tree_from_json(p.at("nodes"), f);
                break;
            case ModelType::rf: {
                std::vector<DecisionTree> trees;
                std::vector<std::uint64_t> seeds;
                for (const auto &t : p.at("trees")) {
                    seeds.push_back(t.at("seed").get<std::uint64_t>());
                    trees.push_back(tree_from_json(t.at("nodes"), f));
                }
                model.parameters = RandomForest(std::move(trees), std::move(seeds));
                break;
            }
            case ModelType::svm:
            case ModelType::mem: {
                LinearModel lm{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
                if (lm.weights.size() != f) {
                    throw FormatError("weight vector does not match num_features");
                }
                model.parameters = std::move(lm);
                break;
            }
        }
        return model;
    } catch (const json::exception &e) {
        throw FormatError(fmt::format("model file is missing fields: {}", e.what()));
    } catch (const std::invalid_argument &) {
        throw FormatError("model file has a malformed feature_space_digest");
    }
}

void save_model(const TrainedModel &model, const std::filesystem::path &path) {
    write_file_atomic(path, model_to_json(model) + "\n");
}

TrainedModel load_model(const std::filesystem::path &path) {
    return model_from_json(read_file(path));
}

}  // namespace misinfo
