#include "misinfo/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdlib>

#include <fmt/format.h>

namespace misinfo {

ConfusionMatrix confusion(std::span<const LabelClass> preds, std::span<const LabelClass> golds) {
    if (preds.size() != golds.size()) {
        throw ContractError(
            fmt::format("confusion: {} predictions for {} gold labels", preds.size(), golds.size()));
    }
    if (preds.empty()) {
        throw ContractError("confusion: nothing to evaluate");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!is_binary(preds[i]) || !is_binary(golds[i])) {
            throw ContractError("confusion: only M and T labels can be evaluated");
        }
        const bool pred_m = preds[i] == LabelClass::M;
        const bool gold_m = golds[i] == LabelClass::M;
        if (pred_m && gold_m) {
            ++cm.tp_m;
        } else if (pred_m) {
            ++cm.fp_m;
        } else if (gold_m) {
            ++cm.fn_m;
        } else {
            ++cm.tn_m;
        }
    }
    return cm;
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    ClassMetrics out;
    if (tp + fp > 0) {
        out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn > 0) {
        out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (out.precision + out.recall > 0.0) {
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

ClassMetrics class_metrics(const ConfusionMatrix &cm, LabelClass c) {
    if (c == LabelClass::M) {
        return class_metrics(cm.tp_m, cm.fp_m, cm.fn_m);
    }
    if (c == LabelClass::T) {
        const auto t = cm.swapped();
        return class_metrics(t.tp_m, t.fp_m, t.fn_m);
    }
    throw ContractError("class_metrics: only M and T have metrics");
}

double macro_f1(double f1_m, double f1_t) { return (f1_m + f1_t) / 2.0; }

Aggregate aggregate(const ConfusionMatrix &cm) {
    Aggregate out;
    const auto total = static_cast<double>(cm.total());
    if (total > 0.0) {
        const auto t = cm.swapped();
        const double acc_m = static_cast<double>(cm.tp_m + cm.tn_m) / total;
        const double acc_t = static_cast<double>(t.tp_m + t.tn_m) / total;
        out.accuracy = (acc_m + acc_t) / 2.0;
    }
    out.macro_f1 = macro_f1(class_metrics(cm, LabelClass::M).f1, class_metrics(cm, LabelClass::T).f1);
    return out;
}

bool EvalReport::has_zero_denominator() const {
    const auto no_pred_m = matrix.tp_m + matrix.fp_m == 0;
    const auto no_pred_t = matrix.tn_m + matrix.fn_m == 0;
    return no_pred_m || no_pred_t || support_m == 0 || support_t == 0;
}

EvalReport make_report(const ConfusionMatrix &cm) {
    EvalReport r;
    r.matrix = cm;
    r.m = class_metrics(cm, LabelClass::M);
    r.t = class_metrics(cm, LabelClass::T);
    const auto agg = aggregate(cm);
    r.accuracy = agg.accuracy;
    r.macro_f1 = agg.macro_f1;
    r.support_m = cm.tp_m + cm.fn_m;
    r.support_t = cm.tn_m + cm.fp_m;
    return r;
}

EvalReport evaluate(const TrainedModel &model, std::span<const LabeledVector> test) {
    std::vector<LabelClass> preds;
    std::vector<LabelClass> golds;
    preds.reserve(test.size());
    golds.reserve(test.size());
    for (const auto &ex : test) {
        preds.push_back(predict(model, ex.vector).label);
        golds.push_back(ex.label);
    }
    return make_report(confusion(preds, golds));
}

std::string report_to_json(const EvalReport &report, std::string_view model, std::string_view method) {
    const auto cls = [](const ClassMetrics &c, std::size_t support) {
        return nlohmann::json{{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", support}};
    };
    nlohmann::json j{{"model", model},
                     {"method", method},
                     {"per_class", {{"M", cls(report.m, report.support_m)}, {"T", cls(report.t, report.support_t)}}},
                     {"accuracy", report.accuracy},
                     {"macro_f1", report.macro_f1},
                     {"confusion",
                      {{"tp_m", report.matrix.tp_m},
                       {"fp_m", report.matrix.fp_m},
                       {"fn_m", report.matrix.fn_m},
                       {"tn_m", report.matrix.tn_m}}}};
    return j.dump();
}

// ---- grid ------------------------------------------------------------------

namespace {

std::size_t model_rank(ModelType type) {
    const auto order = all_model_types();
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), type) - order.begin());
}

std::size_t method_rank(const FeatureMethod &method) {
    const auto order = all_feature_methods();
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), method) - order.begin());
}

std::array<double, 8> row_values(const EvalReport &r) {
    return {r.m.precision, r.m.recall, r.m.f1, r.t.precision, r.t.recall, r.t.f1, r.accuracy, r.macro_f1};
}

constexpr std::array<const char *, 8> kValueColumns{"p_m", "r_m", "f1_m", "p_t", "r_t", "f1_t", "accuracy", "macro_f1"};

}  // namespace

std::vector<GridCell> grid_order(std::vector<GridCell> cells) {
    std::stable_sort(cells.begin(), cells.end(), [](const GridCell &a, const GridCell &b) {
        const auto ka = std::pair(model_rank(a.model), method_rank(a.method));
        const auto kb = std::pair(model_rank(b.model), method_rank(b.method));
        return ka < kb;
    });
    return cells;
}

std::string format_metric(double value, int decimals) {
    auto text = fmt::format("{:.{}f}", value, decimals);
    if (text.rfind("0.", 0) == 0 && decimals == 3) {
        text.erase(0, 1);
    }
    return text;
}

std::string render_grid_text(std::span<const GridCell> cells) {
    const std::array<std::string, 10> header{"Model", "Method", "M Prec", "M Rec", "M F1",
                                             "T Prec", "T Rec", "T F1", "Accuracy", "Macro-F1"};
    std::vector<std::array<std::string, 10>> rows;
    std::string last_model;
    for (const auto &cell : grid_order({cells.begin(), cells.end()})) {
        std::array<std::string, 10> row;
        const std::string model(display_name(cell.model));
        row[0] = model == last_model ? "" : model;
        last_model = model;
        row[1] = cell.method.display_name();
        if (cell.report) {
            const auto v = row_values(*cell.report);
            for (std::size_t i = 0; i < 8; ++i) {
                row[i + 2] = format_metric(v[i], i == 6 ? 2 : 3);
            }
        } else {
            for (std::size_t i = 2; i < 10; ++i) {
                row[i] = "error";
            }
        }
        rows.push_back(row);
    }
    std::array<std::size_t, 10> width{};
    for (std::size_t c = 0; c < 10; ++c) {
        width[c] = header[c].size();
        for (const auto &row : rows) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::string out;
    const auto emit = [&](const std::array<std::string, 10> &row) {
        std::string line;
        for (std::size_t c = 0; c < 10; ++c) {
            if (c > 0) {
                line += "  ";
            }
            // Labels left-aligned, numbers right-aligned.
            line += c < 2 ? fmt::format("{:<{}}", row[c], width[c]) : fmt::format("{:>{}}", row[c], width[c]);
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out += line + "\n";
    };
    emit(header);
    std::size_t rule = 0;
    for (const auto w : width) {
        rule += w;
    }
    out += std::string(rule + 2 * 9, '-') + "\n";
    for (const auto &row : rows) {
        emit(row);
    }
    return out;
}

std::string render_grid_csv(std::span<const GridCell> cells) {
    std::string out = "model,method";
    for (const auto *col : kValueColumns) {
        out += ',';
        out += col;
    }
    out += '\n';
    for (const auto &cell : grid_order({cells.begin(), cells.end()})) {
        out += fmt::format("{},{}", display_name(cell.model), cell.method.display_name());
        if (cell.report) {
            for (const auto v : row_values(*cell.report)) {
                out += fmt::format(",{:.3f}", v);
            }
        } else {
            for (std::size_t i = 0; i < 8; ++i) {
                out += ",error";
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<GridRow> parse_grid_csv(std::string_view csv) {
    std::vector<GridRow> rows;
    const auto lines = split(csv, '\n');
    if (lines.empty() || trim(lines[0]) != "model,method,p_m,r_m,f1_m,p_t,r_t,f1_t,accuracy,macro_f1") {
        throw FormatError("grid CSV header not recognized");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 10) {
            throw FormatError(fmt::format("grid CSV line {}: expected 10 fields, got {}", i + 1, fields.size()));
        }
        GridRow row{fields[0], fields[1], std::nullopt};
        if (fields[2] != "error") {
            std::array<double, 8> values{};
            for (std::size_t k = 0; k < 8; ++k) {
                const std::string text(fields[k + 2]);
                char *end = nullptr;
                values[k] = std::strtod(text.c_str(), &end);
                if (text.empty() || *end != '\0') {
                    throw FormatError(fmt::format("grid CSV line {}: bad number '{}'", i + 1, text));
                }
            }
            row.values = values;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace misinfo
