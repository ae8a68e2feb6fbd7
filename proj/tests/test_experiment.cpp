#include "misinfo/experiment.hpp"
#include "misinfo/synth.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace misinfo;

namespace {

std::vector<LabeledEntry> small_corpus() {
    SynthSpec spec;
    spec.n_m = 40;
    spec.n_t = 60;
    return generate(spec).entries;
}

}  // namespace

TEST_CASE("a one-cell grid") {
    ExperimentConfig config;
    config.models = {ModelType::dt};
    config.methods = {FeatureMethod::ngram(1)};
    const auto result = run_experiment(small_corpus(), StopwordSet::load_default(), config);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.ok());
    CHECK(result.documents == 100);
    REQUIRE(result.methods.size() == 1);
    CHECK(result.methods[0].train.m + result.methods[0].train.t == 80);
    CHECK(result.methods[0].test.m + result.methods[0].test.t == 20);
    CHECK(parse_grid_csv(render_grid_csv(result.cells)).size() == 1);
}

TEST_CASE("results do not depend on the thread count") {
    const auto corpus = small_corpus();
    const auto stop = StopwordSet::load_default();
    ExperimentConfig config;
    config.threads = 1;
    const auto serial = render_grid_csv(run_experiment(corpus, stop, config).cells);
    config.threads = 4;
    const auto parallel = render_grid_csv(run_experiment(corpus, stop, config).cells);
    CHECK(serial == parallel);
    CHECK(parse_grid_csv(serial).size() == 20);
}

TEST_CASE("non-binary labels are dropped before the split") {
    auto corpus = small_corpus();
    corpus.push_back({{"extra1", "vaccine claims nothing here", std::nullopt}, LabelClass::U});
    corpus.push_back({{"extra2", "vaccine news item", std::nullopt}, LabelClass::I});
    ExperimentConfig config;
    config.models = {ModelType::nb};
    config.methods = {FeatureMethod::bow()};
    const auto result = run_experiment(corpus, StopwordSet::load_default(), config);
    CHECK(result.discarded == 2);
    CHECK(result.documents == 100);
}

TEST_CASE("a failing cell is recorded and the rest still run") {
    ExperimentConfig config;
    config.models = {ModelType::nb, ModelType::mem};
    config.methods = {FeatureMethod::bow()};
    // A huge step makes gradient descent diverge on count features.
    config.hyperparameters[ModelType::mem] = {{"step", 1e300}, {"l2", 1e300}};
    const auto result = run_experiment(small_corpus(), StopwordSet::load_default(), config);
    REQUIRE(result.cells.size() == 2);
    CHECK_FALSE(result.ok());
    CHECK(result.cells[0].report.has_value());
    CHECK_FALSE(result.cells[1].report.has_value());
    CHECK_FALSE(result.cells[1].error.empty());
    CHECK(render_grid_csv(result.cells).find("error") != std::string::npos);
}

TEST_CASE("configuration is validated") {
    ExperimentConfig config;
    config.ratio = 1.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config.ratio = 0.8;
    config.models.clear();
    CHECK_THROWS_AS(config.validate(), ValidationError);
}

TEST_CASE("per-method resplitting changes the test sets") {
    ExperimentConfig config;
    config.models = {ModelType::nb};
    config.methods = {FeatureMethod::bow(), FeatureMethod::ngram(1)};
    config.resplit_per_method = true;
    const auto result = run_experiment(small_corpus(), StopwordSet::load_default(), config);
    CHECK(result.ok());
    CHECK(result.cells.size() == 2);
}
