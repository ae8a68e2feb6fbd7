#include "misinfo/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <unordered_set>

#include <fmt/format.h>

namespace misinfo {

using nlohmann::json;

namespace {

bool valid_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        return false;
    }
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) {
            return false;
        }
    }
    const int y = std::stoi(std::string(s.substr(0, 4)));
    const unsigned m = static_cast<unsigned>(std::stoi(std::string(s.substr(5, 2))));
    const unsigned d = static_cast<unsigned>(std::stoi(std::string(s.substr(8, 2))));
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}.ok();
}

std::string dump_json(const json &j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

json record_to_json(const TweetRecord &r) {
    json j = {{"id", r.id}, {"text", r.text}};
    if (r.date) {
        j["date"] = *r.date;
    }
    return j;
}

// Parses the common record fields of one JSONL object; nullopt + message on failure.
std::optional<TweetRecord> record_from_json(const json &j, std::string &error) {
    if (!j.is_object()) {
        error = "line is not a JSON object";
        return std::nullopt;
    }
    TweetRecord r;
    const auto id = j.find("id");
    if (id == j.end()) {
        error = "missing key 'id'";
        return std::nullopt;
    }
    if (id->is_string()) {
        r.id = id->get<std::string>();
    } else if (id->is_number_integer()) {
        r.id = id->dump();
    } else {
        error = "'id' must be a string";
        return std::nullopt;
    }
    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) {
        error = "missing or non-string 'text'";
        return std::nullopt;
    }
    r.text = text->get<std::string>();
    if (const auto date = j.find("date"); date != j.end() && !date->is_null()) {
        if (!date->is_string() || !valid_iso_date(date->get<std::string>())) {
            error = "'date' must be YYYY-MM-DD";
            return std::nullopt;
        }
        r.date = date->get<std::string>();
    }
    return r;
}

struct RawRow {
    std::size_t line;
    std::optional<TweetRecord> record;
    std::string error;
};

std::vector<RawRow> parse_jsonl_rows(std::string_view content) {
    std::vector<RawRow> rows;
    std::size_t line_no = 0;
    for (const auto &line : split(content, '\n')) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        RawRow row{line_no, std::nullopt, {}};
        try {
            row.record = record_from_json(json::parse(line), row.error);
        } catch (const json::exception &e) {
            row.error = fmt::format("invalid JSON: {}", e.what());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RawRow> parse_csv_rows(std::string_view content) {
    auto csv = parse_csv(content);
    if (csv.empty()) {
        throw FormatError("CSV input has no header row");
    }
    const auto &header = csv.front().fields;
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) {
                return i;
            }
        }
        return std::nullopt;
    };
    const auto id_col = column("id");
    const auto text_col = column("text");
    const auto date_col = column("date");
    if (!id_col || !text_col) {
        throw FormatError("CSV header must contain 'id' and 'text' columns");
    }
    std::vector<RawRow> rows;
    for (std::size_t i = 1; i < csv.size(); ++i) {
        const auto &row = csv[i];
        if (row.fields.size() == 1 && trim(row.fields[0]).empty()) {
            continue;
        }
        RawRow raw{row.line, std::nullopt, {}};
        if (!row.complete) {
            raw.error = "unterminated quoted field";
        } else if (row.fields.size() != header.size()) {
            raw.error = fmt::format("expected {} fields, found {}", header.size(), row.fields.size());
        } else {
            TweetRecord r{row.fields[*id_col], row.fields[*text_col], std::nullopt};
            if (date_col && !row.fields[*date_col].empty()) {
                if (valid_iso_date(row.fields[*date_col])) {
                    r.date = row.fields[*date_col];
                } else {
                    raw.error = "'date' must be YYYY-MM-DD";
                }
            }
            if (raw.error.empty()) {
                raw.record = std::move(r);
            }
        }
        rows.push_back(std::move(raw));
    }
    return rows;
}

}  // namespace

const TweetRecord *Dataset::find(std::string_view id) const {
    const auto it = std::find_if(records.begin(), records.end(), [&](const TweetRecord &r) { return r.id == id; });
    return it == records.end() ? nullptr : &*it;
}

TweetFormat format_from_path(const std::filesystem::path &path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? TweetFormat::csv : TweetFormat::jsonl;
}

std::optional<std::string> validate_record(const TweetRecord &record) {
    if (record.id.empty()) {
        return "empty id";
    }
    if (trim(record.text).empty()) {
        return "empty text";
    }
    if (const auto len = utf8_length(record.text); len > kMaxTweetLength) {
        return fmt::format("text has {} characters (max {})", len, kMaxTweetLength);
    }
    return std::nullopt;
}

LoadedDataset parse_tweets(std::string_view content, TweetFormat format, std::string provenance) {
    const auto rows = format == TweetFormat::jsonl ? parse_jsonl_rows(content) : parse_csv_rows(content);
    LoadedDataset out;
    out.dataset.provenance = std::move(provenance);
    auto &report = out.report;
    std::unordered_set<std::string> seen_ids;
    for (const auto &row : rows) {
        ++report.rows_read;
        if (!row.record) {
            ++report.malformed;
            report.diagnostics.push_back({row.line, row.error});
            continue;
        }
        if (auto violation = validate_record(*row.record)) {
            ++report.rejected;
            report.diagnostics.push_back({row.line, *violation});
            continue;
        }
        if (!seen_ids.insert(row.record->id).second) {
            ++report.rejected;
            report.diagnostics.push_back({row.line, fmt::format("duplicate id '{}'", row.record->id)});
            continue;
        }
        out.dataset.records.push_back(*row.record);
        ++report.accepted;
    }
    if (report.rows_read > 0 && 2 * report.malformed > report.rows_read) {
        throw FormatError(fmt::format("{} of {} rows are malformed; is the format right?", report.malformed,
                                      report.rows_read));
    }
    return out;
}

LoadedDataset load_tweets(const std::filesystem::path &path, TweetFormat format) {
    return parse_tweets(read_file(path), format, path.string());
}

std::string serialize_dataset(const Dataset &dataset, TweetFormat format) {
    std::string out;
    if (format == TweetFormat::jsonl) {
        for (const auto &r : dataset.records) {
            out += dump_json(record_to_json(r));
            out += '\n';
        }
        return out;
    }
    out = "id,text,date\n";
    for (const auto &r : dataset.records) {
        out += csv_escape(r.id);
        out += ',';
        out += csv_escape(r.text);
        out += ',';
        out += csv_escape(r.date.value_or(""));
        out += '\n';
    }
    return out;
}

void save_dataset(const Dataset &dataset, const std::filesystem::path &path, TweetFormat format) {
    write_file_atomic(path, serialize_dataset(dataset, format));
}

Dataset dedup(const Dataset &dataset) {
    Dataset out;
    out.provenance = dataset.provenance;
    std::unordered_set<std::string> seen;
    for (const auto &r : dataset.records) {
        if (seen.insert(nfc_normalize(trim(r.text))).second) {
            out.records.push_back(r);
        }
    }
    return out;
}

// ---- glossary --------------------------------------------------------------

namespace {

std::vector<std::string> keyword_list(const json &node, std::string_view where) {
    if (!node.is_array()) {
        throw SchemaError(fmt::format("{} must be a list of strings", where));
    }
    std::vector<std::string> out;
    for (const auto &item : node) {
        if (!item.is_string()) {
            throw SchemaError(fmt::format("{} contains a non-string entry", where));
        }
        auto keyword = to_lower_utf8(trim(item.get<std::string>()));
        if (keyword.empty()) {
            throw SchemaError(fmt::format("{} contains an empty keyword", where));
        }
        if (std::find(out.begin(), out.end(), keyword) != out.end()) {
            throw SchemaError(fmt::format("{} lists '{}' twice", where, keyword));
        }
        out.push_back(std::move(keyword));
    }
    return out;
}

}  // namespace

Glossary parse_glossary(std::string_view content) {
    json doc;
    try {
        doc = json::parse(content);
    } catch (const json::exception &e) {
        throw SchemaError(fmt::format("glossary is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object() || !doc.contains("themes") || !doc.contains("health_keywords")) {
        throw SchemaError("glossary needs 'themes' and 'health_keywords' keys");
    }
    Glossary g;
    if (!doc["themes"].is_array()) {
        throw SchemaError("'themes' must be a list");
    }
    for (const auto &theme : doc["themes"]) {
        if (!theme.is_object() || !theme.contains("name") || !theme["name"].is_string() || !theme.contains("keywords")) {
            throw SchemaError("each theme needs a string 'name' and a 'keywords' list");
        }
        const auto name = theme["name"].get<std::string>();
        g.themes.push_back({name, keyword_list(theme["keywords"], fmt::format("theme '{}'", name))});
    }
    g.health_keywords = keyword_list(doc["health_keywords"], "'health_keywords'");
    return g;
}

Glossary load_glossary(const std::filesystem::path &path) {
    return parse_glossary(read_file(path));
}

std::filesystem::path default_glossary_path() {
    return data_dir() / "glossary.default";
}

// ---- labeled corpora -------------------------------------------------------

std::vector<LabeledEntry> load_labeled(const std::filesystem::path &path) {
    const auto content = read_file(path);
    std::vector<LabeledEntry> entries;
    std::unordered_set<std::string> ids;
    std::size_t line_no = 0;
    for (const auto &line : split(content, '\n')) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fail = [&](std::string_view why) {
            return FormatError(fmt::format("{}:{}: {}", path.string(), line_no, why));
        };
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception &e) {
            throw fail(e.what());
        }
        std::string error;
        auto record = record_from_json(j, error);
        if (!record) {
            throw fail(error);
        }
        if (auto violation = validate_record(*record)) {
            throw fail(*violation);
        }
        if (!ids.insert(record->id).second) {
            throw fail(fmt::format("duplicate id '{}'", record->id));
        }
        const auto label_it = j.find("label");
        if (label_it == j.end() || !label_it->is_string()) {
            throw fail("missing 'label'");
        }
        const auto label = parse_label(label_it->get<std::string>());
        if (!label) {
            throw fail(fmt::format("invalid label '{}'", label_it->get<std::string>()));
        }
        entries.push_back({std::move(*record), *label});
    }
    return entries;
}

std::string serialize_labeled(const std::vector<LabeledEntry> &entries) {
    std::string out;
    for (const auto &e : entries) {
        auto j = record_to_json(e.tweet);
        j["label"] = std::string(to_string(e.label));
        out += dump_json(j);
        out += '\n';
    }
    return out;
}

void save_labeled(const std::vector<LabeledEntry> &entries, const std::filesystem::path &path) {
    write_file_atomic(path, serialize_labeled(entries));
}

// ---- CSV -------------------------------------------------------------------

std::vector<CsvRow> parse_csv(std::string_view content) {
    std::vector<CsvRow> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = content.size();
    while (i < n) {
        CsvRow row{line, {}, true};
        std::string field;
        bool row_done = false;
        while (!row_done) {
            field.clear();
            if (i < n && content[i] == '"') {
                ++i;
                bool closed = false;
                while (i < n) {
                    const char c = content[i];
                    if (c == '"') {
                        if (i + 1 < n && content[i + 1] == '"') {
                            field += '"';
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') {
                        ++line;
                    }
                    field += c;
                    ++i;
                }
                if (!closed) {
                    row.complete = false;
                }
                // Anything between the closing quote and the separator is kept verbatim.
                while (i < n && content[i] != ',' && content[i] != '\n') {
                    if (content[i] != '\r') {
                        field += content[i];
                    }
                    ++i;
                }
            } else {
                while (i < n && content[i] != ',' && content[i] != '\n') {
                    field += content[i];
                    ++i;
                }
                if (!field.empty() && field.back() == '\r') {
                    field.pop_back();
                }
            }
            row.fields.push_back(field);
            if (i < n && content[i] == ',') {
                ++i;
            } else {
                if (i < n) {
                    ++i;  // newline
                    ++line;
                }
                row_done = true;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace misinfo
