#pragma once

// Reference implementations used only by tests. They work on dense rows and
// plain loops and share no code with the library kernels they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Example {
    std::vector<double> x;
    bool is_t = false;
};

// ---- Naive Bayes -----------------------------------------------------------

/// Unnormalized log joint log P(c) + log P(x | c), index 0 = M, 1 = T.
/// Multinomial: each count multiplies in P(w|c) = (N_cw + a) / (N_c + a F).
/// Bernoulli: every vocabulary entry contributes p or 1 - p with
/// p = (docs_c containing w + a) / (docs_c + 2a).
inline std::array<double, 2> nb_log_joint(const std::vector<Example> &train, const std::vector<double> &x,
                                          bool bernoulli, double alpha) {
    const std::size_t f = x.size();
    std::array<double, 2> out{};
    for (int c = 0; c < 2; ++c) {
        double docs = 0;
        std::vector<double> counts(f, 0.0);
        for (const auto &ex : train) {
            if (static_cast<int>(ex.is_t) != c) {
                continue;
            }
            docs += 1;
            for (std::size_t j = 0; j < f; ++j) {
                counts[j] += bernoulli ? (ex.x[j] > 0 ? 1.0 : 0.0) : ex.x[j];
            }
        }
        double score = std::log(docs / static_cast<double>(train.size()));
        if (bernoulli) {
            for (std::size_t j = 0; j < f; ++j) {
                const double p = (counts[j] + alpha) / (docs + 2 * alpha);
                score += x[j] > 0 ? std::log(p) : std::log(1 - p);
            }
        } else {
            double total = 0;
            for (const auto v : counts) {
                total += v;
            }
            for (std::size_t j = 0; j < f; ++j) {
                const double p = (counts[j] + alpha) / (total + alpha * static_cast<double>(f));
                for (int k = 0; k < static_cast<int>(x[j]); ++k) {
                    score += std::log(p);
                }
            }
        }
        out[c] = score;
    }
    return out;
}

// ---- CART split ------------------------------------------------------------

struct Split {
    std::size_t feature = 0;
    double threshold = 0;
    double gain = 0;
};

inline double gini_of(double m, double t) {
    const double n = m + t;
    if (n == 0) {
        return 0;
    }
    return 1 - (m / n) * (m / n) - (t / n) * (t / n);
}

/// Tries every feature and every midpoint between adjacent distinct values,
/// scanning features and thresholds in increasing order and keeping a
/// candidate only when it beats the incumbent by more than `tol`.
inline std::optional<Split> exhaustive_split(const std::vector<Example> &rows, double tol = 1e-12) {
    double m = 0;
    double t = 0;
    for (const auto &r : rows) {
        (r.is_t ? t : m) += 1;
    }
    const double parent = gini_of(m, t);
    const double n = m + t;
    std::optional<Split> best;
    const std::size_t f = rows.empty() ? 0 : rows[0].x.size();
    for (std::size_t j = 0; j < f; ++j) {
        std::set<double> values;
        for (const auto &r : rows) {
            values.insert(r.x[j]);
        }
        const std::vector<double> sorted(values.begin(), values.end());
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
            const double threshold = (sorted[k] + sorted[k + 1]) / 2;
            double lm = 0;
            double lt = 0;
            double rm = 0;
            double rt = 0;
            for (const auto &r : rows) {
                if (r.x[j] <= threshold) {
                    (r.is_t ? lt : lm) += 1;
                } else {
                    (r.is_t ? rt : rm) += 1;
                }
            }
            const double gain = parent - ((lm + lt) / n) * gini_of(lm, lt) - ((rm + rt) / n) * gini_of(rm, rt);
            if (gain <= tol) {
                continue;
            }
            if (!best || gain > best->gain + tol) {
                best = Split{j, threshold, gain};
            }
        }
    }
    return best;
}

// ---- logistic regression ---------------------------------------------------

/// Mean -log P(y | x) with P(T | x) = 1 / (1 + exp(-(w.x + b))), plus l2/2 |w|^2.
inline double logistic_objective(const std::vector<double> &w, double b, const std::vector<Example> &batch, double l2) {
    double loss = 0;
    for (const auto &ex : batch) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) {
            z += w[j] * ex.x[j];
        }
        const double y = ex.is_t ? 1.0 : -1.0;
        loss += std::log1p(std::exp(-y * z));
    }
    double reg = 0;
    for (const auto v : w) {
        reg += v * v;
    }
    return loss / static_cast<double>(batch.size()) + l2 / 2 * reg;
}

/// Central differences of logistic_objective; the last entry is the bias.
inline std::vector<double> finite_difference(const std::vector<double> &w, double b, const std::vector<Example> &batch,
                                             double l2, double h = 1e-6) {
    std::vector<double> g(w.size() + 1);
    for (std::size_t j = 0; j <= w.size(); ++j) {
        auto wp = w;
        auto wm = w;
        double bp = b;
        double bm = b;
        if (j < w.size()) {
            wp[j] += h;
            wm[j] -= h;
        } else {
            bp += h;
            bm -= h;
        }
        g[j] = (logistic_objective(wp, bp, batch, l2) - logistic_objective(wm, bm, batch, l2)) / (2 * h);
    }
    return g;
}

// ---- SVM -------------------------------------------------------------------

/// lambda/2 (|w|^2 + b^2) + mean max(0, 1 - y (w.x + b)).
inline double hinge_objective(const std::vector<double> &w, double b, const std::vector<Example> &data, double lambda) {
    double loss = 0;
    for (const auto &ex : data) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) {
            z += w[j] * ex.x[j];
        }
        const double y = ex.is_t ? 1.0 : -1.0;
        loss += std::max(0.0, 1 - y * z);
    }
    double reg = b * b;
    for (const auto v : w) {
        reg += v * v;
    }
    return lambda / 2 * reg + loss / static_cast<double>(data.size());
}

// ---- votes -----------------------------------------------------------------

/// Label with a strict plurality of votes, or nullopt on a tie for first place.
inline std::optional<char> plurality(const std::vector<char> &votes) {
    std::map<char, int> counts;
    for (const auto v : votes) {
        ++counts[v];
    }
    std::optional<char> winner;
    int best = 0;
    bool tie = false;
    for (const auto &[label, n] : counts) {
        if (n > best) {
            best = n;
            winner = label;
            tie = false;
        } else if (n == best) {
            tie = true;
        }
    }
    if (tie) {
        return std::nullopt;
    }
    return winner;
}

// ---- metrics ---------------------------------------------------------------

struct PRF {
    double p = 0;
    double r = 0;
    double f1 = 0;
};

inline PRF prf(double tp, double fp, double fn) {
    PRF out;
    out.p = tp + fp > 0 ? tp / (tp + fp) : 0;
    out.r = tp + fn > 0 ? tp / (tp + fn) : 0;
    out.f1 = out.p + out.r > 0 ? 2 * out.p * out.r / (out.p + out.r) : 0;
    return out;
}

}  // namespace oracle
