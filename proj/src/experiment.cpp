#include "misinfo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <thread>

#include <fmt/format.h>

namespace misinfo {

void ExperimentConfig::validate() const {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ValidationError("split ratio must lie strictly between 0 and 1");
    }
    if (models.empty() || methods.empty()) {
        throw ValidationError("experiment needs at least one model and one method");
    }
    for (const auto &[type, overrides] : hyperparameters) {
        resolve_hyperparameters(type, overrides);
    }
}

bool ExperimentResult::ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const GridCell &c) { return c.report.has_value(); });
}

namespace {

struct PreparedMethod {
    FeatureMethod method;
    std::optional<FeatureSpace> space;
    std::vector<LabeledVector> train;
    std::vector<LabeledVector> test;
    std::string error;
};

std::vector<LabeledVector> to_vectors(std::span<const TokenSequence> docs, const FeatureSpace &space) {
    std::vector<LabeledVector> out;
    out.reserve(docs.size());
    for (const auto &doc : docs) {
        out.push_back({doc.tweet_id, *doc.label, vectorize(doc, space)});
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(std::vector<TokenSequence> docs, const ExperimentConfig &config,
                                const ExperimentLog &log) {
    config.validate();
    const auto say = [&](const std::string &line) {
        if (log) {
            log(line);
        }
    };
    for (const auto &doc : docs) {
        if (!doc.label || !is_binary(*doc.label)) {
            throw ContractError(fmt::format("document '{}' has no M/T label", doc.tweet_id));
        }
    }
    ExperimentResult result;
    result.documents = docs.size();

    const auto shared = split_train_test(docs, config.ratio, config.seed);
    say(fmt::format("split: {} train ({} M / {} T), {} test ({} M / {} T), seed {}", shared.train.size(),
                    shared.train_counts.m, shared.train_counts.t, shared.test.size(), shared.test_counts.m,
                    shared.test_counts.t, config.seed));

    std::vector<PreparedMethod> prepared;
    const auto all_methods = all_feature_methods();
    for (const auto &method : config.methods) {
        PreparedMethod p{method, std::nullopt, {}, {}, {}};
        MethodStats stats{method, 0, shared.train_counts, shared.test_counts, 0};
        try {
            const SplitResult<TokenSequence> *split = &shared;
            SplitResult<TokenSequence> own;
            if (config.resplit_per_method) {
                const auto rank = static_cast<std::uint64_t>(
                    std::find(all_methods.begin(), all_methods.end(), method) - all_methods.begin());
                own = split_train_test(docs, config.ratio, derive_seed(config.seed, rank));
                split = &own;
                stats.train = own.train_counts;
                stats.test = own.test_counts;
            }
            std::vector<TokenSequence> train_docs;
            for (const auto &doc : split->train) {
                if (doc.tokens.empty()) {
                    ++stats.empty_train_docs;
                } else {
                    train_docs.push_back(doc);
                }
            }
            if (stats.empty_train_docs > 0) {
                say(fmt::format("warning: {} training documents have no tokens and are left out of training",
                                stats.empty_train_docs));
            }
            p.space = build_feature_space(train_docs, method);
            p.train = to_vectors(train_docs, *p.space);
            p.test = to_vectors(split->test, *p.space);
            stats.vocabulary = p.space->size();
            say(fmt::format("{}: vocabulary {}", method.display_name(), stats.vocabulary));
        } catch (const std::exception &e) {
            p.error = e.what();
            say(fmt::format("{}: feature extraction failed: {}", method.display_name(), e.what()));
        }
        result.methods.push_back(stats);
        prepared.push_back(std::move(p));
    }

    struct Job {
        ModelType model;
        const PreparedMethod *method;
    };
    std::vector<Job> jobs;
    for (const auto &p : prepared) {
        for (const auto model : config.models) {
            jobs.push_back({model, &p});
        }
    }
    std::vector<GridCell> cells(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            const auto &job = jobs[i];
            auto &cell = cells[i];
            cell.model = job.model;
            cell.method = job.method->method;
            if (!job.method->space) {
                cell.error = job.method->error;
                continue;
            }
            try {
                ModelConfig mc{job.model, {}, config.seed};
                if (const auto it = config.hyperparameters.find(job.model); it != config.hyperparameters.end()) {
                    mc.hyperparameters = it->second;
                }
                const auto model = train(mc, *job.method->space, job.method->train);
                cell.report = evaluate(model, job.method->test);
            } catch (const std::exception &e) {
                cell.error = e.what();
            }
        }
    };
    auto threads = config.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
    std::vector<std::future<void>> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.push_back(std::async(std::launch::async, worker));
    }
    worker();
    for (auto &f : pool) {
        f.get();
    }

    result.cells = grid_order(std::move(cells));
    for (const auto &cell : result.cells) {
        if (!cell.report) {
            say(fmt::format("{} / {}: error: {}", display_name(cell.model), cell.method.display_name(), cell.error));
        } else if (cell.report->has_zero_denominator()) {
            say(fmt::format("warning: {} / {}: a metric had a zero denominator and is reported as 0",
                            display_name(cell.model), cell.method.display_name()));
        }
    }
    return result;
}

ExperimentResult run_experiment(std::span<const LabeledEntry> labeled, const StopwordSet &stopwords,
                                const ExperimentConfig &config, const ExperimentLog &log) {
    const auto binary = binary_entries(labeled);
    std::vector<TokenSequence> docs;
    docs.reserve(binary.size());
    for (const auto &entry : binary) {
        docs.push_back(preprocess_entry(entry, stopwords));
    }
    if (log) {
        log(fmt::format("{} labeled tweets, {} M/T kept for classification", labeled.size(), binary.size()));
    }
    auto result = run_experiment(std::move(docs), config, log);
    result.discarded = labeled.size() - binary.size();
    return result;
}

}  // namespace misinfo
