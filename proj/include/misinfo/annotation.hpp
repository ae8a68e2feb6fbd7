#pragma once

#include "misinfo/corpus.hpp"
#include "misinfo/labels.hpp"

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace misinfo {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();
/// RFC 3339, UTC, millisecond precision: 2020-07-02T13:45:00.250Z
std::string format_timestamp(Timestamp ts);
std::optional<Timestamp> parse_timestamp(std::string_view text);

struct AnnotationRecord {
    std::string tweet_id;
    std::string annotator_id;
    LabelClass label;
    Timestamp timestamp;

    friend bool operator==(const AnnotationRecord &, const AnnotationRecord &) = default;
};

/// Count per label, indexed by label_index().
using Tally = std::array<std::size_t, kAllLabels.size()>;

enum class VoteStatus { decided, tie, unlabeled };
std::string_view to_string(VoteStatus status);

struct VoteOutcome {
    std::string tweet_id;
    std::optional<LabelClass> decided;
    Tally tally{};
    VoteStatus status = VoteStatus::unlabeled;

    [[nodiscard]] std::size_t votes() const;
    /// Ties, and U pluralities, are settled by adjudication.
    [[nodiscard]] bool needs_adjudication() const;
};

Tally make_tally(std::span<const LabelClass> labels);
VoteOutcome majority_vote(const Tally &tally);
VoteOutcome majority_vote(std::span<const LabelClass> labels);

/// Per-(tweet, annotator) labels for one session. The effective record for a
/// pair is the one with the latest timestamp; equal timestamps go to the later
/// submission. With a journal path every accepted label is appended and
/// fsynced before record_label returns, and construction replays the journal.
class AnnotationStore {
public:
    explicit AnnotationStore(Dataset dataset, std::optional<std::filesystem::path> journal = std::nullopt);

    AnnotationStore(const AnnotationStore &) = delete;
    AnnotationStore &operator=(const AnnotationStore &) = delete;

    AnnotationRecord record_label(const std::string &tweet_id, const std::string &annotator_id, LabelClass label,
                                  Timestamp timestamp = now_utc());
    /// Same, parsing the label text; invalid text throws ValidationError.
    AnnotationRecord record_label(const std::string &tweet_id, const std::string &annotator_id,
                                  std::string_view label_text, Timestamp timestamp = now_utc());

    [[nodiscard]] const Dataset &dataset() const noexcept { return dataset_; }
    [[nodiscard]] bool contains(std::string_view tweet_id) const;

    /// Effective records in (dataset order, annotator id) order.
    [[nodiscard]] std::vector<AnnotationRecord> snapshot() const;
    [[nodiscard]] VoteOutcome outcome(const std::string &tweet_id) const;
    [[nodiscard]] std::vector<VoteOutcome> outcomes() const;
    [[nodiscard]] std::vector<std::string> annotators() const;

    /// First tweet in dataset order the annotator has not labeled.
    [[nodiscard]] std::optional<TweetRecord> next_for(const std::string &annotator_id) const;

private:
    void apply(AnnotationRecord record);
    void append_journal(const AnnotationRecord &record);
    void replay_journal();

    Dataset dataset_;
    std::unordered_map<std::string, std::size_t> position_;
    std::optional<std::filesystem::path> journal_;
    // keyed by (dataset position, annotator)
    std::map<std::pair<std::size_t, std::string>, AnnotationRecord> effective_;
    mutable std::mutex mutex_;
};

std::string journal_header();
std::string journal_line(const AnnotationRecord &record);

// ---- finalization ----------------------------------------------------------

struct LabeledDataset {
    std::vector<LabeledEntry> entries;
    Tally class_counts{};

    static LabeledDataset from_entries(std::vector<LabeledEntry> entries);
};

struct FinalizeResult {
    LabeledDataset labeled;
    std::vector<std::string> unlabeled_ids;
};

using Adjudications = std::map<std::string, LabelClass>;

/// Majority label per tweet, adjudicated label where the vote did not settle
/// it. Throws CompletenessError naming every unresolved tweet, and
/// ValidationError for a U adjudication.
FinalizeResult finalize(const AnnotationStore &store, const Adjudications &adjudications);

struct TweetAgreement {
    std::string tweet_id;
    std::size_t annotators = 0;
    bool unanimous = false;
};

struct PairAgreement {
    std::string first;
    std::string second;
    std::size_t shared = 0;
    std::optional<double> agreement;  // absent when the pair shares no tweets
};

struct AgreementReport {
    std::vector<TweetAgreement> tweets;  // labeled tweets only
    std::size_t labeled_tweets = 0;
    double majority_rate = 0.0;  // share of labeled tweets whose vote is decided
    std::vector<PairAgreement> pairs;
};

AgreementReport agreement_stats(const AnnotationStore &store);
AgreementReport agreement_stats(std::span<const AnnotationRecord> records);

struct BinaryPartition {
    Dataset misinformation;
    Dataset true_information;
    std::size_t discarded = 0;
};

BinaryPartition extract_binary(const LabeledDataset &labeled);

/// M and T entries only, original order, labels kept.
std::vector<LabeledEntry> binary_entries(std::span<const LabeledEntry> entries);

}  // namespace misinfo
