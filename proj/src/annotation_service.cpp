#include "misinfo/annotation_service.hpp"

#include <httplib.h>

#include <sys/socket.h>

#include <thread>

#include <fmt/format.h>

namespace misinfo {

using nlohmann::json;

json tally_json(const Tally &tally) {
    json j = json::object();
    for (const auto label : kAllLabels) {
        j[std::string(to_string(label))] = tally[label_index(label)];
    }
    return j;
}

json to_json(const VoteOutcome &outcome) {
    return {{"tweet_id", outcome.tweet_id},
            {"status", std::string(to_string(outcome.status))},
            {"decided", outcome.decided ? json(std::string(to_string(*outcome.decided))) : json(nullptr)},
            {"tally", tally_json(outcome.tally)},
            {"needs_adjudication", outcome.needs_adjudication()}};
}

json to_json(const AgreementReport &report) {
    json tweets = json::array();
    for (const auto &t : report.tweets) {
        tweets.push_back({{"tweet_id", t.tweet_id}, {"annotators", t.annotators}, {"unanimous", t.unanimous}});
    }
    json pairs = json::array();
    for (const auto &p : report.pairs) {
        pairs.push_back({{"first", p.first},
                         {"second", p.second},
                         {"shared", p.shared},
                         {"agreement", p.agreement ? json(*p.agreement) : json(nullptr)}});
    }
    return {{"labeled_tweets", report.labeled_tweets},
            {"majority_rate", report.majority_rate},
            {"tweets", tweets},
            {"pairs", pairs}};
}

json to_json(const TweetRecord &record) {
    json j = {{"id", record.id}, {"text", record.text}};
    j["date"] = record.date ? json(*record.date) : json(nullptr);
    return j;
}

namespace {

AnnotationService::Response error(int status, std::string message) {
    return {status, {{"error", std::move(message)}}};
}

std::optional<json> parse_body(std::string_view body) {
    try {
        auto j = json::parse(body);
        if (j.is_object()) {
            return j;
        }
    } catch (const json::exception &) {
    }
    return std::nullopt;
}

std::optional<std::string> string_field(const json &j, const char *key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        return std::nullopt;
    }
    return it->get<std::string>();
}

}  // namespace

AnnotationService::AnnotationService(Dataset dataset, std::filesystem::path journal, std::filesystem::path output)
    : store_(std::move(dataset), journal), output_(std::move(output)) {
    adjudication_path_ = journal;
    adjudication_path_ += ".adjudications";
    load_adjudications();
}

void AnnotationService::load_adjudications() {
    if (!std::filesystem::exists(adjudication_path_)) {
        return;
    }
    for (const auto &row : parse_csv(read_file(adjudication_path_))) {
        if (row.fields.size() < 2 || row.fields[0] == "tweet_id") {
            continue;
        }
        const auto label = parse_label(row.fields[1]);
        if (!label || !store_.contains(row.fields[0])) {
            throw FormatError(fmt::format("{}:{}: bad adjudication row", adjudication_path_.string(), row.line));
        }
        adjudications_[row.fields[0]] = *label;
    }
}

Adjudications AnnotationService::adjudications() const {
    const std::lock_guard lock(mutex_);
    return adjudications_;
}

AnnotationService::Response AnnotationService::session() const {
    const auto outcomes = store_.outcomes();
    Tally decided{};
    std::size_t labeled = 0;
    std::size_t ties = 0;
    for (const auto &o : outcomes) {
        if (o.status != VoteStatus::unlabeled) {
            ++labeled;
        }
        if (o.status == VoteStatus::decided) {
            ++decided[label_index(*o.decided)];
        }
        if (o.needs_adjudication()) {
            ++ties;
        }
    }
    Tally raw{};
    const auto records = store_.snapshot();
    for (const auto &r : records) {
        ++raw[label_index(r.label)];
    }
    return {200,
            {{"total_tweets", store_.dataset().size()},
             {"labeled_tweets", labeled},
             {"awaiting_adjudication", ties},
             {"annotators", store_.annotators()},
             {"label_count", records.size()},
             {"tally", tally_json(decided)},
             {"raw_tally", tally_json(raw)}}};
}

AnnotationService::Response AnnotationService::next(const std::string &annotator_id) const {
    if (trim(annotator_id).empty()) {
        return error(400, "query parameter 'annotator' is required");
    }
    const auto tweet = store_.next_for(annotator_id);
    if (!tweet) {
        return {200, {{"done", true}}};
    }
    return {200, {{"done", false}, {"tweet", to_json(*tweet)}}};
}

AnnotationService::Response AnnotationService::post_label(std::string_view body) {
    const auto j = parse_body(body);
    if (!j) {
        return error(400, "body must be a JSON object");
    }
    const auto tweet_id = string_field(*j, "tweet_id");
    const auto annotator = string_field(*j, "annotator_id");
    const auto label = string_field(*j, "label");
    if (!tweet_id || !annotator || !label) {
        return error(400, "body needs string fields tweet_id, annotator_id, label");
    }
    try {
        store_.record_label(*tweet_id, *annotator, *label);
    } catch (const NotFoundError &e) {
        return error(404, e.what());
    } catch (const ValidationError &e) {
        return error(400, e.what());
    }
    return {200, to_json(store_.outcome(*tweet_id))};
}

AnnotationService::Response AnnotationService::ties() const {
    const auto adjudicated = adjudications();
    json list = json::array();
    std::size_t open = 0;
    for (const auto &o : store_.outcomes()) {
        if (!o.needs_adjudication()) {
            continue;
        }
        auto item = to_json(o);
        const auto it = adjudicated.find(o.tweet_id);
        item["adjudication"] = it == adjudicated.end() ? json(nullptr) : json(std::string(to_string(it->second)));
        if (it == adjudicated.end()) {
            ++open;
        }
        item["text"] = store_.dataset().find(o.tweet_id)->text;
        list.push_back(std::move(item));
    }
    return {200, {{"ties", list}, {"open", open}}};
}

AnnotationService::Response AnnotationService::post_adjudication(std::string_view body) {
    const auto j = parse_body(body);
    if (!j) {
        return error(400, "body must be a JSON object");
    }
    const auto tweet_id = string_field(*j, "tweet_id");
    const auto label_text = string_field(*j, "label");
    if (!tweet_id || !label_text) {
        return error(400, "body needs string fields tweet_id, label");
    }
    const auto label = parse_label(*label_text);
    if (!label) {
        return error(400, fmt::format("invalid label '{}'", *label_text));
    }
    if (*label == LabelClass::U) {
        return error(400, "adjudication must settle on T, M, I or N");
    }
    if (!store_.contains(*tweet_id)) {
        return error(404, fmt::format("unknown tweet id '{}'", *tweet_id));
    }
    if (!store_.outcome(*tweet_id).needs_adjudication()) {
        return error(409, fmt::format("tweet '{}' is not awaiting adjudication", *tweet_id));
    }
    {
        const std::lock_guard lock(mutex_);
        std::string content;
        if (std::filesystem::exists(adjudication_path_)) {
            content = read_file(adjudication_path_);
        } else {
            content = "tweet_id,label,timestamp\n";
        }
        content += fmt::format("{},{},{}\n", csv_escape(*tweet_id), to_string(*label), format_timestamp(now_utc()));
        write_file_atomic(adjudication_path_, content);
        adjudications_[*tweet_id] = *label;
    }
    return {200, {{"tweet_id", *tweet_id}, {"label", std::string(to_string(*label))}}};
}

AnnotationService::Response AnnotationService::agreement() const {
    return {200, to_json(agreement_stats(store_))};
}

AnnotationService::Response AnnotationService::finalize() {
    FinalizeResult result;
    try {
        result = misinfo::finalize(store_, adjudications());
    } catch (const CompletenessError &e) {
        return {409, {{"error", e.what()}, {"tweet_ids", e.offending_ids()}}};
    }
    save_labeled(result.labeled.entries, output_);
    return {200,
            {{"output", output_.string()},
             {"entries", result.labeled.entries.size()},
             {"class_counts", tally_json(result.labeled.class_counts)},
             {"unlabeled", result.unlabeled_ids}}};
}

// ---- HTTP ------------------------------------------------------------------

struct AnnotationServer::Impl {
    explicit Impl(AnnotationService &svc) : service(svc) {}
    AnnotationService &service;
    httplib::Server server;
    std::thread worker;
};

AnnotationServer::AnnotationServer(AnnotationService &service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto &svc = impl_->service;
    auto &srv = impl_->server;
    // httplib's default adds SO_REUSEPORT, which lets a second server share a busy port.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto reply = [](httplib::Response &res, const AnnotationService::Response &r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    srv.Get("/api/session", [&svc, reply](const httplib::Request &, httplib::Response &res) { reply(res, svc.session()); });
    srv.Get("/api/next", [&svc, reply](const httplib::Request &req, httplib::Response &res) {
        reply(res, svc.next(req.get_param_value("annotator")));
    });
    srv.Post("/api/labels", [&svc, reply](const httplib::Request &req, httplib::Response &res) {
        reply(res, svc.post_label(req.body));
    });
    srv.Get("/api/ties", [&svc, reply](const httplib::Request &, httplib::Response &res) { reply(res, svc.ties()); });
    srv.Post("/api/adjudications", [&svc, reply](const httplib::Request &req, httplib::Response &res) {
        reply(res, svc.post_adjudication(req.body));
    });
    srv.Get("/api/agreement", [&svc, reply](const httplib::Request &, httplib::Response &res) { reply(res, svc.agreement()); });
    srv.Post("/api/finalize", [&svc, reply](const httplib::Request &, httplib::Response &res) { reply(res, svc.finalize()); });
    srv.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
        std::string message = "internal error";
        int status = 500;
        try {
            std::rethrow_exception(ep);
        } catch (const Error &e) {
            message = e.what();
            status = 400;
        } catch (const std::exception &e) {
            message = e.what();
        }
        res.status = status;
        res.set_content(json{{"error", message}}.dump(), "application/json");
    });
    if (static_dir) {
        srv.set_mount_point("/", static_dir->string());
    }
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start(const std::string &host, int port) {
    auto &srv = impl_->server;
    const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw IoError(fmt::format("cannot bind {}:{}", host, port));
    }
    impl_->worker = std::thread([&srv] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    return bound;
}

void AnnotationServer::listen(const std::string &host, int port) {
    auto &srv = impl_->server;
    if (!srv.bind_to_port(host, port)) {
        throw IoError(fmt::format("cannot bind {}:{}", host, port));
    }
    srv.listen_after_bind();
}

void AnnotationServer::stop() {
    if (!impl_) {
        return;
    }
    impl_->server.stop();
    if (impl_->worker.joinable()) {
        impl_->worker.join();
    }
}

}  // namespace misinfo
