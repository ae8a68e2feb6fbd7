#pragma once

#include "misinfo/features.hpp"
#include "misinfo/labels.hpp"
#include "misinfo/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace misinfo {

/// Counts with M as the positive class. The T view swaps roles:
/// tp_t = tn_m, fp_t = fn_m, fn_t = fp_m, tn_t = tp_m.
struct ConfusionMatrix {
    std::size_t tp_m = 0;
    std::size_t fp_m = 0;
    std::size_t fn_m = 0;
    std::size_t tn_m = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp_m + fp_m + fn_m + tn_m; }
    [[nodiscard]] ConfusionMatrix swapped() const noexcept { return {tn_m, fn_m, fp_m, tp_m}; }

    friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;
};

/// Throws ContractError on a length mismatch, empty input, or labels other than M/T.
ConfusionMatrix confusion(std::span<const LabelClass> preds, std::span<const LabelClass> golds);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// A metric whose denominator is zero is reported as 0.
ClassMetrics class_metrics(const ConfusionMatrix &cm, LabelClass c);
/// Same, from raw counts of the class in question.
ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn);

struct Aggregate {
    double accuracy = 0.0;  // mean over classes of (TP_c + TN_c) / total
    double macro_f1 = 0.0;
};

Aggregate aggregate(const ConfusionMatrix &cm);
/// Macro-F1 from already-computed class F1 scores.
double macro_f1(double f1_m, double f1_t);

struct EvalReport {
    ClassMetrics m;
    ClassMetrics t;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::size_t support_m = 0;
    std::size_t support_t = 0;
    ConfusionMatrix matrix;

    /// True when some precision/recall fell back to 0 for lack of predictions or gold examples.
    [[nodiscard]] bool has_zero_denominator() const;
};

EvalReport make_report(const ConfusionMatrix &cm);
EvalReport evaluate(const TrainedModel &model, std::span<const LabeledVector> test);

std::string report_to_json(const EvalReport &report, std::string_view model, std::string_view method);

// ---- result grid -----------------------------------------------------------

struct GridCell {
    ModelType model = ModelType::nb;
    FeatureMethod method;
    std::optional<EvalReport> report;  // nullopt marks a failed cell
    std::string error;
};

/// Cells sorted into grid order (model, then method); input order is irrelevant.
std::vector<GridCell> grid_order(std::vector<GridCell> cells);

/// Aligned text table. Accuracy at 2 decimals, everything else at 3 with the
/// leading zero dropped below 1.
std::string render_grid_text(std::span<const GridCell> cells);
/// CSV `model,method,p_m,r_m,f1_m,p_t,r_t,f1_t,accuracy,macro_f1`, all values at 3 decimals.
std::string render_grid_csv(std::span<const GridCell> cells);

struct GridRow {
    std::string model;
    std::string method;
    std::optional<std::array<double, 8>> values;  // nullopt for an error row
};

/// Throws FormatError on a bad header or row.
std::vector<GridRow> parse_grid_csv(std::string_view csv);

/// ".677" style, used by the text table.
std::string format_metric(double value, int decimals);

}  // namespace misinfo
