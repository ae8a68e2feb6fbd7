#include "misinfo/features.hpp"

#include <json.hpp>

#include <algorithm>

#include <fmt/format.h>

namespace misinfo {

using nlohmann::json;

FeatureMethod FeatureMethod::ngram(int n) {
    if (n < 1 || n > 3) {
        throw ContractError(fmt::format("n-gram order must be 1, 2 or 3 (got {})", n));
    }
    return {Kind::ngram, n};
}

std::string FeatureMethod::name() const {
    if (kind == Kind::bow) {
        return "bow";
    }
    static constexpr std::array<const char *, 3> names{"unigram", "bigram", "trigram"};
    return names[static_cast<std::size_t>(n - 1)];
}

std::string FeatureMethod::display_name() const {
    if (kind == Kind::bow) {
        return "BoW";
    }
    static constexpr std::array<const char *, 3> names{"uni-gram", "bi-grams", "tri-grams"};
    return names[static_cast<std::size_t>(n - 1)];
}

FeatureMethod FeatureMethod::parse(std::string_view name) {
    if (name == "bow" || name == "BoW") {
        return bow();
    }
    if (name == "unigram" || name == "uni-gram" || name == "1gram") {
        return ngram(1);
    }
    if (name == "bigram" || name == "bi-grams" || name == "2gram") {
        return ngram(2);
    }
    if (name == "trigram" || name == "tri-grams" || name == "3gram") {
        return ngram(3);
    }
    throw ValidationError(fmt::format("unknown feature method '{}' (bow, unigram, bigram, trigram)", name));
}

std::vector<FeatureMethod> all_feature_methods() {
    return {FeatureMethod::bow(), FeatureMethod::ngram(1), FeatureMethod::ngram(2), FeatureMethod::ngram(3)};
}

std::vector<std::vector<std::string>> extract_ngrams(std::span<const std::string> tokens, int n) {
    if (n < 1 || n > 3) {
        throw ContractError(fmt::format("n-gram order must be 1, 2 or 3 (got {})", n));
    }
    std::vector<std::vector<std::string>> out;
    const auto width = static_cast<std::size_t>(n);
    if (tokens.size() < width) {
        return out;
    }
    out.reserve(tokens.size() - width + 1);
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
        out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                         tokens.begin() + static_cast<std::ptrdiff_t>(i + width));
    }
    return out;
}

std::vector<std::string> feature_keys(std::span<const std::string> tokens, const FeatureMethod &method) {
    if (method.kind == FeatureMethod::Kind::bow) {
        return {tokens.begin(), tokens.end()};
    }
    std::vector<std::string> keys;
    for (const auto &tuple : extract_ngrams(tokens, method.n)) {
        keys.push_back(join(tuple, " "));
    }
    return keys;
}

// ---- FeatureSpace ----------------------------------------------------------

FeatureSpace::FeatureSpace(FeatureMethod method, std::vector<std::string> vocabulary)
    : method_(method), vocabulary_(std::move(vocabulary)) {
    index_.reserve(vocabulary_.size());
    std::uint64_t h = fnv1a64(method_.name());
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
        if (!index_.emplace(vocabulary_[i], static_cast<std::uint32_t>(i)).second) {
            throw ValidationError(fmt::format("duplicate vocabulary entry '{}'", vocabulary_[i]));
        }
        h = fnv1a64(std::string_view("\n", 1), h);
        h = fnv1a64(vocabulary_[i], h);
    }
    digest_ = h;
}

std::optional<std::uint32_t> FeatureSpace::position(const std::string &key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string FeatureSpace::to_json() const {
    json j = {{"method", method_.kind == FeatureMethod::Kind::bow ? "bow" : "ngram"}};
    if (method_.kind == FeatureMethod::Kind::ngram) {
        j["n"] = method_.n;
    }
    j["digest"] = hex64(digest_);
    j["vocabulary"] = vocabulary_;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

FeatureSpace FeatureSpace::from_json(std::string_view text) {
    try {
        const auto j = json::parse(text);
        const auto kind = j.at("method").get<std::string>();
        FeatureMethod method;
        if (kind == "bow") {
            method = FeatureMethod::bow();
        } else if (kind == "ngram") {
            method = FeatureMethod::ngram(j.at("n").get<int>());
        } else {
            throw FormatError(fmt::format("unknown feature method '{}'", kind));
        }
        FeatureSpace space(method, j.at("vocabulary").get<std::vector<std::string>>());
        if (const auto it = j.find("digest"); it != j.end() && it->get<std::string>() != hex64(space.digest())) {
            throw FormatError("feature space digest does not match its vocabulary");
        }
        return space;
    } catch (const json::exception &e) {
        throw FormatError(fmt::format("feature space file: {}", e.what()));
    }
}

void FeatureSpace::save(const std::filesystem::path &path) const {
    write_file_atomic(path, to_json() + "\n");
}

FeatureSpace FeatureSpace::load(const std::filesystem::path &path) {
    return from_json(read_file(path));
}

FeatureSpace build_feature_space(std::span<const TokenSequence> train_docs, const FeatureMethod &method) {
    if (train_docs.empty()) {
        throw DegenerateDataError("cannot build a feature space from zero training documents");
    }
    std::vector<std::string> vocabulary;
    std::unordered_map<std::string, std::uint32_t> seen;
    for (const auto &doc : train_docs) {
        for (auto &key : feature_keys(doc.tokens, method)) {
            if (seen.emplace(key, static_cast<std::uint32_t>(vocabulary.size())).second) {
                vocabulary.push_back(std::move(key));
            }
        }
    }
    if (vocabulary.empty()) {
        throw DegenerateDataError(fmt::format("training documents yield no {} features", method.name()));
    }
    return {method, std::move(vocabulary)};
}

// ---- vectors ---------------------------------------------------------------

double FeatureVector::value(std::uint32_t position) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), position,
                                     [](const auto &entry, std::uint32_t p) { return entry.first < p; });
    return it != entries.end() && it->first == position ? it->second : 0.0;
}

double FeatureVector::dot(std::span<const double> weights) const {
    double sum = 0.0;
    for (const auto &[pos, val] : entries) {
        sum += weights[pos] * val;
    }
    return sum;
}

FeatureVector vectorize(const TokenSequence &doc, const FeatureSpace &space) {
    std::unordered_map<std::uint32_t, double> counts;
    for (const auto &key : feature_keys(doc.tokens, space.method())) {
        if (const auto pos = space.position(key)) {
            if (space.method().binary()) {
                counts[*pos] = 1.0;
            } else {
                counts[*pos] += 1.0;
            }
        }
    }
    FeatureVector v;
    v.space_digest = space.digest();
    v.entries.assign(counts.begin(), counts.end());
    std::sort(v.entries.begin(), v.entries.end());
    return v;
}

void check_space(std::span<const LabeledVector> data, const FeatureSpace &space) {
    for (const auto &item : data) {
        if (item.vector.space_digest != space.digest()) {
            throw ContractError(fmt::format("vector '{}' was built over a different feature space", item.id));
        }
    }
}

std::string serialize_vectors(std::span<const LabeledVector> data) {
    std::string out;
    for (const auto &item : data) {
        json entries = json::array();
        for (const auto &[pos, val] : item.vector.entries) {
            entries.push_back({pos, val});
        }
        out += json{{"id", item.id}, {"label", std::string(to_string(item.label))}, {"entries", entries}}.dump(
            -1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::vector<LabeledVector> parse_vectors(std::string_view content, const FeatureSpace &space) {
    std::vector<LabeledVector> out;
    std::size_t line_no = 0;
    for (const auto &line : split(content, '\n')) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            LabeledVector item;
            item.id = j.at("id").get<std::string>();
            const auto label = parse_label(j.at("label").get<std::string>());
            if (!label) {
                throw FormatError(fmt::format("vector cache line {}: invalid label", line_no));
            }
            item.label = *label;
            item.vector.space_digest = space.digest();
            for (const auto &entry : j.at("entries")) {
                const auto pos = entry.at(0).get<std::uint32_t>();
                const auto val = entry.at(1).get<double>();
                if (pos >= space.size()) {
                    throw ContractError(
                        fmt::format("vector cache line {}: position {} outside the feature space", line_no, pos));
                }
                if (space.method().binary() && val != 1.0) {
                    throw ContractError(fmt::format("vector cache line {}: n-gram entries must be 1", line_no));
                }
                item.vector.entries.emplace_back(pos, val);
            }
            std::sort(item.vector.entries.begin(), item.vector.entries.end());
            out.push_back(std::move(item));
        } catch (const json::exception &e) {
            throw FormatError(fmt::format("vector cache line {}: {}", line_no, e.what()));
        }
    }
    return out;
}

std::size_t train_size_for(std::size_t n, double ratio) {
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

}  // namespace misinfo
