#pragma once

#include "misinfo/annotation.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace misinfo {

nlohmann::json to_json(const VoteOutcome &outcome);
nlohmann::json to_json(const AgreementReport &report);
nlohmann::json to_json(const TweetRecord &record);
nlohmann::json tally_json(const Tally &tally);

/// Request handlers behind the annotation HTTP API. Each returns an HTTP
/// status and JSON body; errors are 4xx with {"error": ...}. Usable without
/// a socket, which is how the unit tests drive it.
class AnnotationService {
public:
    struct Response {
        int status = 200;
        nlohmann::json body;
    };

    /// Adjudications persist next to the journal as `<journal>.adjudications`.
    AnnotationService(Dataset dataset, std::filesystem::path journal, std::filesystem::path output);

    Response session() const;
    Response next(const std::string &annotator_id) const;
    Response post_label(std::string_view body);
    Response ties() const;
    Response post_adjudication(std::string_view body);
    Response agreement() const;
    Response finalize();

    [[nodiscard]] const AnnotationStore &store() const noexcept { return store_; }
    [[nodiscard]] Adjudications adjudications() const;

private:
    void load_adjudications();

    AnnotationStore store_;
    std::filesystem::path adjudication_path_;
    std::filesystem::path output_;
    Adjudications adjudications_;
    mutable std::mutex mutex_;
};

/// Serves an AnnotationService over HTTP on a background thread.
class AnnotationServer {
public:
    AnnotationServer(AnnotationService &service, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~AnnotationServer();

    AnnotationServer(const AnnotationServer &) = delete;
    AnnotationServer &operator=(const AnnotationServer &) = delete;

    /// Binds and starts serving; port 0 picks a free port. Returns the bound
    /// port. Throws IoError when the port cannot be bound.
    int start(const std::string &host, int port);
    /// Blocks in the calling thread until stop() is called from elsewhere.
    void listen(const std::string &host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace misinfo
