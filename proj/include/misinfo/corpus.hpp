#pragma once

#include "misinfo/common.hpp"
#include "misinfo/labels.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace misinfo {

inline constexpr std::size_t kMaxTweetLength = 280;

struct TweetRecord {
    std::string id;
    std::string text;
    std::optional<std::string> date;  // YYYY-MM-DD

    friend bool operator==(const TweetRecord &, const TweetRecord &) = default;
};

struct Dataset {
    std::vector<TweetRecord> records;
    std::string provenance;

    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] bool empty() const noexcept { return records.empty(); }
    [[nodiscard]] const TweetRecord *find(std::string_view id) const;

    friend bool operator==(const Dataset &a, const Dataset &b) { return a.records == b.records; }
};

enum class TweetFormat { jsonl, csv };

/// jsonl unless the extension is .csv.
TweetFormat format_from_path(const std::filesystem::path &path);

struct LoadDiagnostic {
    std::size_t line;
    std::string message;
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t accepted = 0;
    std::size_t malformed = 0;  // did not parse
    std::size_t rejected = 0;   // parsed but violated a record invariant
    std::vector<LoadDiagnostic> diagnostics;
};

struct LoadedDataset {
    Dataset dataset;
    LoadReport report;
};

/// Checks the TweetRecord invariants; returns the violation or nullopt.
std::optional<std::string> validate_record(const TweetRecord &record);

LoadedDataset load_tweets(const std::filesystem::path &path, TweetFormat format);
LoadedDataset parse_tweets(std::string_view content, TweetFormat format, std::string provenance = {});

void save_dataset(const Dataset &dataset, const std::filesystem::path &path, TweetFormat format);
std::string serialize_dataset(const Dataset &dataset, TweetFormat format);

/// Keeps the first record of every distinct text (NFC + trim).
Dataset dedup(const Dataset &dataset);

// ---- glossary --------------------------------------------------------------

struct Theme {
    std::string name;
    std::vector<std::string> keywords;
};

struct Glossary {
    std::vector<Theme> themes;
    std::vector<std::string> health_keywords;
};

Glossary load_glossary(const std::filesystem::path &path);
Glossary parse_glossary(std::string_view content);
std::filesystem::path default_glossary_path();

// ---- labeled corpora -------------------------------------------------------

struct LabeledEntry {
    TweetRecord tweet;
    LabelClass label;
};

/// JSONL with an extra `label` key per line. Unlike load_tweets, any
/// malformed line is an error: labeled corpora are produced by this tool.
std::vector<LabeledEntry> load_labeled(const std::filesystem::path &path);
std::string serialize_labeled(const std::vector<LabeledEntry> &entries);
void save_labeled(const std::vector<LabeledEntry> &entries, const std::filesystem::path &path);

// ---- CSV -------------------------------------------------------------------

/// Minimal RFC 4180 reader: comma separator, double-quote quoting, quoted
/// fields may span lines. Returns rows with the 1-based line each started on.
struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
    bool complete = true;  // false when a quoted field ran past end of input
};
std::vector<CsvRow> parse_csv(std::string_view content);
std::string csv_escape(std::string_view field);

}  // namespace misinfo
