// Command-line front end. Every stage reads its predecessor's artifact from
// disk and writes its own atomically, so any stage can be rerun or inspected.

#include "misinfo/annotation_service.hpp"
#include "misinfo/corpus.hpp"
#include "misinfo/eval.hpp"
#include "misinfo/experiment.hpp"
#include "misinfo/filtering.hpp"
#include "misinfo/model.hpp"
#include "misinfo/preprocess.hpp"
#include "misinfo/synth.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>

#include <fmt/format.h>

namespace fs = std::filesystem;
using namespace misinfo;

namespace {

void log(std::string_view stage, const std::string &message) { fmt::print(stderr, "[{}] {}\n", stage, message); }

void require_input(const fs::path &path, std::string_view what, std::string_view producer) {
    if (!fs::exists(path)) {
        if (producer.empty()) {
            throw IoError(fmt::format("{} '{}' not found", what, path.string()));
        }
        throw IoError(fmt::format("{} '{}' not found; run `misinfo {}` first", what, path.string(), producer));
    }
}

fs::path space_path_for(const fs::path &model_path) {
    auto p = model_path;
    p += ".space.json";
    return p;
}

StopwordSet load_stopwords(const std::string &english, const std::string &trivial) {
    if (english.empty() && trivial.empty()) {
        return StopwordSet::load_default();
    }
    const auto e = english.empty() ? data_dir() / "stopwords.english" : fs::path(english);
    const auto t = trivial.empty() ? data_dir() / "stopwords.trivial" : fs::path(trivial);
    require_input(e, "stopword list", "");
    require_input(t, "stopword list", "");
    return StopwordSet::load(e, t);
}

std::string balance(const ClassCounts &c) { return fmt::format("{} M / {} T", c.m, c.t); }

ClassCounts count_labels(const std::vector<TokenSequence> &docs) {
    ClassCounts c;
    for (const auto &d : docs) {
        detail::count_label(c, d.label);
    }
    return c;
}

std::vector<TokenSequence> load_labeled_tokens(const fs::path &path, std::string_view what, std::string_view producer) {
    require_input(path, what, producer);
    auto docs = load_token_sequences(path);
    for (const auto &d : docs) {
        if (!d.label || !is_binary(*d.label)) {
            throw ValidationError(fmt::format("{}: document '{}' lacks an M/T label", path.string(), d.tweet_id));
        }
    }
    return docs;
}

std::vector<LabeledVector> vectors_for(const std::vector<TokenSequence> &docs, const FeatureSpace &space,
                                       bool skip_empty, std::size_t *skipped = nullptr) {
    std::vector<LabeledVector> out;
    for (const auto &d : docs) {
        if (skip_empty && d.tokens.empty()) {
            if (skipped != nullptr) {
                ++*skipped;
            }
            continue;
        }
        out.push_back({d.tweet_id, *d.label, vectorize(d, space)});
    }
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string &text, T (*parse)(std::string_view)) {
    std::vector<T> out;
    for (const auto &part : split(text, ',')) {
        const auto name = trim(part);
        if (!name.empty()) {
            out.push_back(parse(name));
        }
    }
    return out;
}

ModelType parse_model(std::string_view s) { return parse_model_type(s); }
FeatureMethod parse_method(std::string_view s) { return FeatureMethod::parse(s); }

// ---- stages ----------------------------------------------------------------

struct FilterArgs {
    std::string input, glossary, output, report;
};

int cmd_filter(const FilterArgs &a) {
    require_input(a.input, "tweet file", "");
    const auto glossary_path = a.glossary.empty() ? default_glossary_path() : fs::path(a.glossary);
    require_input(glossary_path, "glossary", "");
    const auto loaded = load_tweets(a.input, format_from_path(a.input));
    for (const auto &d : loaded.report.diagnostics) {
        log("filter", fmt::format("{}:{}: skipped: {}", a.input, d.line, d.message));
    }
    const auto glossary = load_glossary(glossary_path);
    const auto result = filter_corpus(loaded.dataset, glossary);
    save_dataset(result.kept, a.output, format_from_path(a.output));
    const auto report = a.report.empty() ? fs::path(a.output).replace_extension(".report.csv") : fs::path(a.report);
    write_file_atomic(report, render_filter_report(result));
    log("filter", fmt::format("{} tweets read, {} accepted, {} kept -> {}; keyword report -> {}",
                              loaded.report.rows_read, loaded.report.accepted, result.kept.size(), a.output,
                              report.string()));
    return 0;
}

int cmd_dedup(const std::string &input, const std::string &output) {
    require_input(input, "tweet file", "filter");
    const auto loaded = load_tweets(input, format_from_path(input));
    const auto out = dedup(loaded.dataset);
    save_dataset(out, output, format_from_path(output));
    log("dedup", fmt::format("{} tweets in, {} out -> {}", loaded.dataset.size(), out.size(), output));
    return 0;
}

int cmd_synth(const SynthSpec &spec, const std::string &glossary, const std::string &output) {
    const auto g = load_glossary(glossary.empty() ? default_glossary_path() : fs::path(glossary));
    const auto corpus = generate(spec, g);
    save_synthetic(corpus, spec, output);
    log("synth", fmt::format("{} tweets ({} M / {} T), seed {}, signal {} -> {}", corpus.entries.size(),
                             corpus.class_counts[label_index(LabelClass::M)],
                             corpus.class_counts[label_index(LabelClass::T)], spec.seed, spec.signal, output));
    return 0;
}

struct PreprocessArgs {
    std::string input, output, english, trivial;
    bool keep_all = false;
};

int cmd_preprocess(const PreprocessArgs &a) {
    require_input(a.input, "labeled corpus", "synth` or `annotate-serve");
    const auto stopwords = load_stopwords(a.english, a.trivial);
    const auto all = load_labeled(a.input);
    const auto entries = a.keep_all ? all : binary_entries(all);
    std::vector<TokenSequence> docs;
    std::size_t total = 0;
    std::size_t shortest = entries.empty() ? 0 : SIZE_MAX;
    std::size_t longest = 0;
    for (const auto &e : entries) {
        docs.push_back(preprocess_entry(e, stopwords));
        const auto n = docs.back().tokens.size();
        total += n;
        shortest = std::min(shortest, n);
        longest = std::max(longest, n);
    }
    save_token_sequences(docs, a.output);
    log("preprocess", fmt::format("{} labeled tweets, {} kept ({}), {} stopwords; tokens per tweet min {} max {} "
                                  "mean {:.1f} -> {}",
                                  all.size(), docs.size(), balance(count_labels(docs)), stopwords.combined.size(),
                                  shortest, longest, docs.empty() ? 0.0 : static_cast<double>(total) / docs.size(),
                                  a.output));
    return 0;
}

struct SplitArgs {
    std::string input, train, test;
    double ratio = 0.8;
    std::uint64_t seed = 42;
};

int cmd_split(const SplitArgs &a) {
    auto docs = load_labeled_tokens(a.input, "token file", "preprocess");
    const auto split = split_train_test(std::move(docs), a.ratio, a.seed);
    save_token_sequences(split.train, a.train);
    save_token_sequences(split.test, a.test);
    log("split", fmt::format("train {} ({}) -> {}; test {} ({}) -> {}; ratio {}, seed {}", split.train.size(),
                             balance(split.train_counts), a.train, split.test.size(), balance(split.test_counts),
                             a.test, a.ratio, a.seed));
    return 0;
}

struct VectorizeArgs {
    std::string train, test, method, space, train_out, test_out;
};

int cmd_vectorize(const VectorizeArgs &a) {
    const auto method = FeatureMethod::parse(a.method);
    const auto train_docs = load_labeled_tokens(a.train, "training split", "split");
    const auto test_docs = load_labeled_tokens(a.test, "test split", "split");
    std::vector<TokenSequence> nonempty;
    std::copy_if(train_docs.begin(), train_docs.end(), std::back_inserter(nonempty),
                 [](const TokenSequence &d) { return !d.tokens.empty(); });
    const auto space = build_feature_space(nonempty, method);
    space.save(a.space);
    std::size_t skipped = 0;
    write_file_atomic(a.train_out, serialize_vectors(vectors_for(train_docs, space, true, &skipped)));
    write_file_atomic(a.test_out, serialize_vectors(vectors_for(test_docs, space, false)));
    log("vectorize", fmt::format("{}: vocabulary {} (digest {}), {} train vectors ({} empty skipped), {} test vectors",
                                 method.display_name(), space.size(), hex64(space.digest()),
                                 train_docs.size() - skipped, skipped, test_docs.size()));
    return 0;
}

struct TrainArgs {
    std::string train, method, model, output;
    std::vector<std::string> params;
    std::uint64_t seed = 42;
};

int cmd_train(const TrainArgs &a) {
    const auto method = FeatureMethod::parse(a.method);
    ModelConfig config;
    config.type = parse_model_type(a.model);
    config.seed = a.seed;
    for (const auto &p : a.params) {
        config.hyperparameters = parse_hyperparameter(config.type, p, config.hyperparameters);
    }
    const auto docs = load_labeled_tokens(a.train, "training split", "split");
    std::vector<TokenSequence> nonempty;
    std::copy_if(docs.begin(), docs.end(), std::back_inserter(nonempty),
                 [](const TokenSequence &d) { return !d.tokens.empty(); });
    if (nonempty.size() < docs.size()) {
        log("train", fmt::format("warning: {} training documents have no tokens and are left out",
                                 docs.size() - nonempty.size()));
    }
    const auto space = build_feature_space(nonempty, method);
    const auto vectors = vectors_for(nonempty, space, false);
    const auto model = train(config, space, vectors);
    save_model(model, a.output);
    space.save(space_path_for(a.output));
    log("train", fmt::format("{} on {}: {} documents ({}), vocabulary {} -> {}", display_name(config.type),
                             method.display_name(), vectors.size(), balance(count_labels(nonempty)), space.size(),
                             a.output));
    if (model.meta.epochs > 0) {
        log("train", fmt::format("{} epochs, final objective {:.6f}", model.meta.epochs, model.meta.final_objective));
    }
    return 0;
}

struct EvalArgs {
    std::string model, test, report, grid;
};

int cmd_eval(const EvalArgs &a) {
    require_input(a.model, "model", "train");
    const auto space_file = space_path_for(a.model);
    require_input(space_file, "feature space", "train");
    const auto model = load_model(a.model);
    const auto space = FeatureSpace::load(space_file);
    if (space.digest() != model.space_digest) {
        throw ContractError(fmt::format("'{}' does not belong to model '{}'; retrain to regenerate both",
                                        space_file.string(), a.model));
    }
    const auto docs = load_labeled_tokens(a.test, "test split", "split");
    const auto vectors = vectors_for(docs, space, false);
    const auto report = evaluate(model, vectors);
    const auto model_name = display_name(model.type);
    write_file_atomic(a.report, report_to_json(report, model_name, model.method.display_name()) + "\n");
    const std::vector<GridCell> cells{{model.type, model.method, report, {}}};
    if (!a.grid.empty()) {
        write_file_atomic(a.grid, render_grid_csv(cells));
    }
    std::cout << render_grid_text(cells);
    log("eval", fmt::format("{} test documents ({} M / {} T) -> {}", vectors.size(), report.support_m,
                            report.support_t, a.report));
    if (report.has_zero_denominator()) {
        log("eval", "warning: a metric had a zero denominator and is reported as 0");
    }
    return 0;
}

struct ExperimentArgs {
    std::string input, models = "nb,dt,mem,rf,svm", methods = "bow,unigram,bigram,trigram", output_dir = ".";
    std::string english, trivial;
    double ratio = 0.8;
    std::uint64_t seed = 42;
    bool resplit = false;
    unsigned threads = 0;
};

int cmd_experiment(const ExperimentArgs &a) {
    require_input(a.input, "labeled corpus", "synth` or `annotate-serve");
    ExperimentConfig config;
    config.models = parse_list<ModelType>(a.models, parse_model);
    config.methods = parse_list<FeatureMethod>(a.methods, parse_method);
    config.ratio = a.ratio;
    config.seed = a.seed;
    config.resplit_per_method = a.resplit;
    config.threads = a.threads;
    config.validate();
    const auto stopwords = load_stopwords(a.english, a.trivial);
    const auto labeled = load_labeled(a.input);
    const auto result =
        run_experiment(labeled, stopwords, config, [](const std::string &line) { log("experiment", line); });
    fs::create_directories(a.output_dir);
    const auto csv_path = fs::path(a.output_dir) / "grid.csv";
    const auto text = render_grid_text(result.cells);
    write_file_atomic(csv_path, render_grid_csv(result.cells));
    write_file_atomic(fs::path(a.output_dir) / "grid.txt", text);
    std::cout << text;
    const auto failed = std::count_if(result.cells.begin(), result.cells.end(),
                                      [](const GridCell &c) { return !c.report; });
    log("experiment", fmt::format("{} cells, {} failed -> {}", result.cells.size(), failed, csv_path.string()));
    return result.ok() ? 0 : 1;
}

struct ServeArgs {
    std::string dataset, journal, output, host = "127.0.0.1", static_dir;
    int port = 8080;
};

int cmd_annotate_serve(const ServeArgs &a) {
    require_input(a.dataset, "tweet file", "filter");
    auto loaded = load_tweets(a.dataset, format_from_path(a.dataset));
    log("annotate-serve", fmt::format("{} tweets loaded from {}", loaded.dataset.size(), a.dataset));

    // Block the shutdown signals before any thread starts so only sigwait sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    AnnotationService service(std::move(loaded.dataset), a.journal, a.output);
    std::optional<fs::path> static_dir;
    if (!a.static_dir.empty()) {
        static_dir = a.static_dir;
    }
    AnnotationServer server(service, static_dir);
    const auto port = server.start(a.host, a.port);
    log("annotate-serve", fmt::format("listening on http://{}:{} (journal {})", a.host, port, a.journal));
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
    log("annotate-serve", "stopped; journal is up to date, nothing was finalized");
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Health-misinformation tweet workbench: filter, annotate, preprocess, train, evaluate."};
    app.require_subcommand(1);

    FilterArgs filter;
    auto *f = app.add_subcommand("filter", "Keep tweets that mention a glossary keyword");
    f->add_option("--input", filter.input, "Tweets (.jsonl or .csv)")->required();
    f->add_option("--glossary", filter.glossary, "Keyword glossary (default: bundled)");
    f->add_option("--output", filter.output, "Kept tweets")->required();
    f->add_option("--report", filter.report, "Keyword hit report CSV (default: <output>.report.csv)");

    std::string dedup_in, dedup_out;
    auto *d = app.add_subcommand("dedup", "Drop tweets whose normalized text repeats an earlier one");
    d->add_option("--input", dedup_in)->required();
    d->add_option("--output", dedup_out)->required();

    SynthSpec spec;
    std::string synth_glossary, synth_out;
    auto *s = app.add_subcommand("synth", "Generate a seeded synthetic labeled corpus");
    s->add_option("--seed", spec.seed)->capture_default_str();
    s->add_option("--n-m", spec.n_m, "Misinformation tweets")->capture_default_str();
    s->add_option("--n-t", spec.n_t, "True-information tweets")->capture_default_str();
    s->add_option("--vocab-shared", spec.vocab_shared)->capture_default_str();
    s->add_option("--vocab-m", spec.vocab_m)->capture_default_str();
    s->add_option("--vocab-t", spec.vocab_t)->capture_default_str();
    s->add_option("--signal", spec.signal, "Chance a slot uses the class pool")->capture_default_str();
    s->add_option("--min-tokens", spec.min_tokens)->capture_default_str();
    s->add_option("--max-tokens", spec.max_tokens)->capture_default_str();
    s->add_option("--glossary", synth_glossary, "Keywords to embed (default: bundled)");
    s->add_option("--output", synth_out)->required();

    PreprocessArgs pre;
    auto *p = app.add_subcommand("preprocess", "Clean, tokenize, drop stopwords and stem a labeled corpus");
    p->add_option("--input", pre.input, "Labeled JSONL")->required();
    p->add_option("--output", pre.output, "Token cache JSONL")->required();
    p->add_option("--stopwords-english", pre.english);
    p->add_option("--stopwords-trivial", pre.trivial);
    p->add_flag("--keep-all-labels", pre.keep_all, "Keep I/N/U tweets too (default: M and T only)");

    SplitArgs split_args;
    auto *sp = app.add_subcommand("split", "Seeded train/test split of a token cache");
    sp->add_option("--input", split_args.input)->required();
    sp->add_option("--ratio", split_args.ratio)->capture_default_str();
    sp->add_option("--seed", split_args.seed)->capture_default_str();
    sp->add_option("--train", split_args.train)->required();
    sp->add_option("--test", split_args.test)->required();

    VectorizeArgs vec;
    auto *v = app.add_subcommand("vectorize", "Build a feature space from the training split and vectorize both splits");
    v->add_option("--train", vec.train)->required();
    v->add_option("--test", vec.test)->required();
    v->add_option("--method", vec.method, "bow, unigram, bigram or trigram")->required();
    v->add_option("--space", vec.space)->required();
    v->add_option("--train-out", vec.train_out)->required();
    v->add_option("--test-out", vec.test_out)->required();

    TrainArgs tr;
    auto *t = app.add_subcommand("train", "Train one classifier on the training split");
    t->add_option("--train", tr.train)->required();
    t->add_option("--method", tr.method, "bow, unigram, bigram or trigram")->required();
    t->add_option("--model", tr.model, "nb, dt, rf, svm or mem")->required();
    t->add_option("--seed", tr.seed)->capture_default_str();
    t->add_option("--param", tr.params, "Hyperparameter override key=value (repeatable)");
    t->add_option("--output", tr.output, "Model JSON; the feature space goes to <output>.space.json")->required();

    EvalArgs ev;
    auto *e = app.add_subcommand("eval", "Evaluate a trained model on the test split");
    e->add_option("--model", ev.model)->required();
    e->add_option("--test", ev.test)->required();
    e->add_option("--report", ev.report, "EvalReport JSON")->required();
    e->add_option("--grid", ev.grid, "One-row grid CSV");

    ExperimentArgs ex;
    auto *x = app.add_subcommand("experiment", "Run every (model, method) cell and render the result grid");
    x->add_option("--input", ex.input, "Labeled JSONL")->required();
    x->add_option("--models", ex.models)->capture_default_str();
    x->add_option("--methods", ex.methods)->capture_default_str();
    x->add_option("--ratio", ex.ratio)->capture_default_str();
    x->add_option("--seed", ex.seed)->capture_default_str();
    x->add_flag("--resplit-per-method", ex.resplit, "Draw a separate split for each method");
    x->add_option("--threads", ex.threads, "Parallel cells (0 = all cores)")->capture_default_str();
    x->add_option("--output-dir", ex.output_dir, "Where grid.csv and grid.txt go")->capture_default_str();
    x->add_option("--stopwords-english", ex.english);
    x->add_option("--stopwords-trivial", ex.trivial);

    ServeArgs sv;
    auto *a = app.add_subcommand("annotate-serve", "Serve the annotation HTTP API");
    a->add_option("--dataset", sv.dataset, "Tweets to annotate (.jsonl or .csv)")->required();
    a->add_option("--journal", sv.journal, "Append-only label journal")->required();
    a->add_option("--output", sv.output, "Where finalize writes the labeled corpus")->required();
    a->add_option("--host", sv.host)->capture_default_str();
    a->add_option("--port", sv.port)->capture_default_str();
    a->add_option("--static", sv.static_dir, "Directory of UI assets to serve at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &err) {
        const auto code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*f) return cmd_filter(filter);
        if (*d) return cmd_dedup(dedup_in, dedup_out);
        if (*s) return cmd_synth(spec, synth_glossary, synth_out);
        if (*p) return cmd_preprocess(pre);
        if (*sp) return cmd_split(split_args);
        if (*v) return cmd_vectorize(vec);
        if (*t) return cmd_train(tr);
        if (*e) return cmd_eval(ev);
        if (*x) return cmd_experiment(ex);
        if (*a) return cmd_annotate_serve(sv);
    } catch (const Error &err) {
        fmt::print(stderr, "error: {}\n", err.what());
        return 1;
    } catch (const std::exception &err) {
        fmt::print(stderr, "internal error: {}\n", err.what());
        return 2;
    }
    return 0;
}
