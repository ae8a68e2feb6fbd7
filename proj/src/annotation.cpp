#include "misinfo/annotation.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <set>

#include <fmt/format.h>

namespace misinfo {

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss<milliseconds> tod{ts - day};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), tod.hours().count(),
                       tod.minutes().count(), tod.seconds().count(), tod.subseconds().count());
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    int h = 0;
    int mi = 0;
    int s = 0;
    int consumed = 0;
    const std::string str(text);
    if (std::sscanf(str.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
        return std::nullopt;
    }
    std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
    long millis = 0;
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        int digits = 0;
        while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
            if (digits < 3) {
                millis = millis * 10 + (rest.front() - '0');
            }
            ++digits;
            rest.remove_prefix(1);
        }
        if (digits == 0) {
            return std::nullopt;
        }
        for (; digits < 3; ++digits) {
            millis *= 10;
        }
    }
    if (rest != "Z" && rest != "z" && rest != "+00:00") {
        return std::nullopt;
    }
    return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{s} + milliseconds{millis};
}

std::string_view to_string(VoteStatus status) {
    switch (status) {
        case VoteStatus::decided: return "decided";
        case VoteStatus::tie: return "tie";
        case VoteStatus::unlabeled: return "unlabeled";
    }
    return "?";
}

std::size_t VoteOutcome::votes() const {
    std::size_t total = 0;
    for (const auto c : tally) {
        total += c;
    }
    return total;
}

bool VoteOutcome::needs_adjudication() const {
    return status == VoteStatus::tie || (status == VoteStatus::decided && decided == LabelClass::U);
}

Tally make_tally(std::span<const LabelClass> labels) {
    Tally tally{};
    for (const auto label : labels) {
        ++tally[label_index(label)];
    }
    return tally;
}

VoteOutcome majority_vote(const Tally &tally) {
    VoteOutcome out;
    out.tally = tally;
    const auto best = *std::max_element(tally.begin(), tally.end());
    if (best == 0) {
        out.status = VoteStatus::unlabeled;
        return out;
    }
    const auto holders = std::count(tally.begin(), tally.end(), best);
    if (holders > 1) {
        out.status = VoteStatus::tie;
        return out;
    }
    const auto winner = static_cast<std::size_t>(std::find(tally.begin(), tally.end(), best) - tally.begin());
    out.decided = kAllLabels[winner];
    out.status = VoteStatus::decided;
    return out;
}

VoteOutcome majority_vote(std::span<const LabelClass> labels) {
    return majority_vote(make_tally(labels));
}

// ---- store -----------------------------------------------------------------

std::string journal_header() { return "tweet_id,annotator_id,label,timestamp\n"; }

std::string journal_line(const AnnotationRecord &record) {
    return fmt::format("{},{},{},{}\n", csv_escape(record.tweet_id), csv_escape(record.annotator_id),
                       to_string(record.label), format_timestamp(record.timestamp));
}

AnnotationStore::AnnotationStore(Dataset dataset, std::optional<std::filesystem::path> journal)
    : dataset_(std::move(dataset)), journal_(std::move(journal)) {
    for (std::size_t i = 0; i < dataset_.records.size(); ++i) {
        position_.emplace(dataset_.records[i].id, i);
    }
    if (journal_ && std::filesystem::exists(*journal_)) {
        replay_journal();
    }
}

bool AnnotationStore::contains(std::string_view tweet_id) const {
    return position_.contains(std::string(tweet_id));
}

void AnnotationStore::replay_journal() {
    const auto rows = parse_csv(read_file(*journal_));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &row = rows[i];
        if (row.fields.size() == 1 && row.fields[0].empty()) {
            continue;
        }
        if (i == 0 && !row.fields.empty() && row.fields[0] == "tweet_id") {
            continue;
        }
        auto fail = [&](std::string_view why) {
            return FormatError(fmt::format("{}:{}: {}", journal_->string(), row.line, why));
        };
        if (!row.complete || row.fields.size() != 4) {
            throw fail("expected tweet_id,annotator_id,label,timestamp");
        }
        const auto label = parse_label(row.fields[2]);
        const auto ts = parse_timestamp(row.fields[3]);
        if (!label || !ts) {
            throw fail("bad label or timestamp");
        }
        if (!contains(row.fields[0])) {
            throw fail(fmt::format("tweet '{}' is not in the session dataset", row.fields[0]));
        }
        apply({row.fields[0], row.fields[1], *label, *ts});
    }
}

void AnnotationStore::apply(AnnotationRecord record) {
    const auto key = std::make_pair(position_.at(record.tweet_id), record.annotator_id);
    const auto it = effective_.find(key);
    if (it != effective_.end() && it->second.timestamp > record.timestamp) {
        return;  // an already-stored label is newer
    }
    effective_.insert_or_assign(key, std::move(record));
}

void AnnotationStore::append_journal(const AnnotationRecord &record) {
    const auto &path = *journal_;
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw IoError(fmt::format("cannot open journal '{}'", path.string()));
    }
    std::string payload = fresh ? journal_header() : std::string();
    payload += journal_line(record);
    std::size_t written = 0;
    bool ok = true;
    while (written < payload.size()) {
        const auto n = ::write(fd, payload.data() + written, payload.size() - written);
        if (n <= 0) {
            ok = false;
            break;
        }
        written += static_cast<std::size_t>(n);
    }
    ok = ok && ::fsync(fd) == 0;
    ::close(fd);
    if (!ok) {
        throw IoError(fmt::format("write to journal '{}' failed", path.string()));
    }
}

AnnotationRecord AnnotationStore::record_label(const std::string &tweet_id, const std::string &annotator_id,
                                               LabelClass label, Timestamp timestamp) {
    if (!contains(tweet_id)) {
        throw NotFoundError(fmt::format("unknown tweet id '{}'", tweet_id));
    }
    if (trim(annotator_id).empty()) {
        throw ValidationError("annotator id must not be empty");
    }
    AnnotationRecord record{tweet_id, annotator_id, label, timestamp};
    const std::lock_guard lock(mutex_);
    if (journal_) {
        append_journal(record);
    }
    apply(record);
    return record;
}

AnnotationRecord AnnotationStore::record_label(const std::string &tweet_id, const std::string &annotator_id,
                                               std::string_view label_text, Timestamp timestamp) {
    const auto label = parse_label(label_text);
    if (!label) {
        throw ValidationError(fmt::format("invalid label '{}'; expected one of T, M, I, N, U", label_text));
    }
    return record_label(tweet_id, annotator_id, *label, timestamp);
}

std::vector<AnnotationRecord> AnnotationStore::snapshot() const {
    const std::lock_guard lock(mutex_);
    std::vector<AnnotationRecord> out;
    out.reserve(effective_.size());
    for (const auto &[key, record] : effective_) {
        out.push_back(record);
    }
    return out;
}

VoteOutcome AnnotationStore::outcome(const std::string &tweet_id) const {
    const auto pos = position_.find(tweet_id);
    if (pos == position_.end()) {
        throw NotFoundError(fmt::format("unknown tweet id '{}'", tweet_id));
    }
    Tally tally{};
    {
        const std::lock_guard lock(mutex_);
        for (auto it = effective_.lower_bound({pos->second, std::string()});
             it != effective_.end() && it->first.first == pos->second; ++it) {
            ++tally[label_index(it->second.label)];
        }
    }
    auto out = majority_vote(tally);
    out.tweet_id = tweet_id;
    return out;
}

std::vector<VoteOutcome> AnnotationStore::outcomes() const {
    std::vector<Tally> tallies(dataset_.records.size(), Tally{});
    {
        const std::lock_guard lock(mutex_);
        for (const auto &[key, record] : effective_) {
            ++tallies[key.first][label_index(record.label)];
        }
    }
    std::vector<VoteOutcome> out;
    out.reserve(tallies.size());
    for (std::size_t i = 0; i < tallies.size(); ++i) {
        auto outcome = majority_vote(tallies[i]);
        outcome.tweet_id = dataset_.records[i].id;
        out.push_back(std::move(outcome));
    }
    return out;
}

std::vector<std::string> AnnotationStore::annotators() const {
    const std::lock_guard lock(mutex_);
    std::set<std::string> names;
    for (const auto &[key, record] : effective_) {
        names.insert(key.second);
    }
    return {names.begin(), names.end()};
}

std::optional<TweetRecord> AnnotationStore::next_for(const std::string &annotator_id) const {
    const std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < dataset_.records.size(); ++i) {
        if (!effective_.contains({i, annotator_id})) {
            return dataset_.records[i];
        }
    }
    return std::nullopt;
}

// ---- finalization ----------------------------------------------------------

LabeledDataset LabeledDataset::from_entries(std::vector<LabeledEntry> entries) {
    LabeledDataset out;
    out.entries = std::move(entries);
    for (const auto &e : out.entries) {
        ++out.class_counts[label_index(e.label)];
    }
    return out;
}

FinalizeResult finalize(const AnnotationStore &store, const Adjudications &adjudications) {
    for (const auto &[tweet_id, label] : adjudications) {
        if (label == LabelClass::U) {
            throw ValidationError(fmt::format("tweet '{}' adjudicated as U; adjudication must settle on T, M, I or N",
                                              tweet_id));
        }
    }
    const auto &records = store.dataset().records;
    const auto outcomes = store.outcomes();
    FinalizeResult result;
    std::vector<LabeledEntry> entries;
    std::vector<std::string> unresolved;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto &outcome = outcomes[i];
        if (outcome.status == VoteStatus::unlabeled) {
            result.unlabeled_ids.push_back(records[i].id);
            continue;
        }
        if (outcome.needs_adjudication()) {
            const auto it = adjudications.find(records[i].id);
            if (it == adjudications.end()) {
                unresolved.push_back(records[i].id);
                continue;
            }
            entries.push_back({records[i], it->second});
            continue;
        }
        entries.push_back({records[i], *outcome.decided});
    }
    if (!unresolved.empty()) {
        throw CompletenessError(fmt::format("{} tweet(s) need adjudication: {}", unresolved.size(), join(unresolved, ", ")),
                                std::move(unresolved));
    }
    result.labeled = LabeledDataset::from_entries(std::move(entries));
    return result;
}

AgreementReport agreement_stats(std::span<const AnnotationRecord> records) {
    // tweet -> annotator -> label, tweets in first-seen order
    std::vector<std::string> tweet_order;
    std::map<std::string, std::map<std::string, LabelClass>> by_tweet;
    std::set<std::string> annotators;
    for (const auto &r : records) {
        if (!by_tweet.contains(r.tweet_id)) {
            tweet_order.push_back(r.tweet_id);
        }
        by_tweet[r.tweet_id][r.annotator_id] = r.label;
        annotators.insert(r.annotator_id);
    }
    AgreementReport report;
    std::size_t decided = 0;
    for (const auto &tweet_id : tweet_order) {
        const auto &labels = by_tweet[tweet_id];
        std::vector<LabelClass> values;
        for (const auto &[who, label] : labels) {
            values.push_back(label);
        }
        const bool unanimous = std::all_of(values.begin(), values.end(), [&](LabelClass l) { return l == values[0]; });
        report.tweets.push_back({tweet_id, values.size(), unanimous});
        if (majority_vote(values).status == VoteStatus::decided) {
            ++decided;
        }
    }
    report.labeled_tweets = tweet_order.size();
    report.majority_rate = report.labeled_tweets == 0 ? 0.0
                                                       : static_cast<double>(decided) /
                                                             static_cast<double>(report.labeled_tweets);
    const std::vector<std::string> names(annotators.begin(), annotators.end());
    for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = a + 1; b < names.size(); ++b) {
            PairAgreement pair{names[a], names[b], 0, std::nullopt};
            std::size_t agree = 0;
            for (const auto &[tweet_id, labels] : by_tweet) {
                const auto la = labels.find(names[a]);
                const auto lb = labels.find(names[b]);
                if (la != labels.end() && lb != labels.end()) {
                    ++pair.shared;
                    agree += la->second == lb->second ? 1 : 0;
                }
            }
            if (pair.shared > 0) {
                pair.agreement = static_cast<double>(agree) / static_cast<double>(pair.shared);
            }
            report.pairs.push_back(std::move(pair));
        }
    }
    return report;
}

AgreementReport agreement_stats(const AnnotationStore &store) {
    const auto records = store.snapshot();
    return agreement_stats(records);
}

BinaryPartition extract_binary(const LabeledDataset &labeled) {
    BinaryPartition out;
    for (const auto &e : labeled.entries) {
        if (e.label == LabelClass::M) {
            out.misinformation.records.push_back(e.tweet);
        } else if (e.label == LabelClass::T) {
            out.true_information.records.push_back(e.tweet);
        } else {
            ++out.discarded;
        }
    }
    return out;
}

std::vector<LabeledEntry> binary_entries(std::span<const LabeledEntry> entries) {
    std::vector<LabeledEntry> out;
    for (const auto &e : entries) {
        if (is_binary(e.label)) {
            out.push_back(e);
        }
    }
    return out;
}

}  // namespace misinfo
