#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace senti {

double accuracy(const std::vector<int>& gold, const std::vector<int>& pred) {
    require(!gold.empty(), "accuracy of an empty prediction list");
    require(gold.size() == pred.size(), "accuracy: gold/pred length mismatch");
    size_t hits = 0;
    for (size_t i = 0; i < gold.size(); ++i) hits += gold[i] == pred[i];
    return static_cast<double>(hits) / gold.size();
}

double macro_average(const std::vector<double>& per_dataset, int expected_count) {
    require(!per_dataset.empty(), "macro average of an empty accuracy list");
    if (expected_count > 0) {
        require(static_cast<int>(per_dataset.size()) == expected_count,
                "macro average: expected " + std::to_string(expected_count) +
                    " datasets, got " + std::to_string(per_dataset.size()));
    }
    double s = 0.0;
    for (double v : per_dataset) s += v;
    return s / per_dataset.size();
}

std::vector<std::vector<int64_t>> confusion_matrix(const std::vector<int>& gold,
                                                   const std::vector<int>& pred,
                                                   int num_classes) {
    require(gold.size() == pred.size(), "confusion matrix: gold/pred length mismatch");
    std::vector<std::vector<int64_t>> m(num_classes, std::vector<int64_t>(num_classes, 0));
    for (size_t i = 0; i < gold.size(); ++i) {
        require(gold[i] >= 0 && gold[i] < num_classes, "confusion matrix: gold label out of range");
        require(pred[i] >= 0 && pred[i] < num_classes, "confusion matrix: prediction out of range");
        ++m[gold[i]][pred[i]];
    }
    return m;
}

RunStats run_stats(const std::vector<double>& values) {
    require(!values.empty(), "run stats of an empty list");
    RunStats r;
    for (double v : values) r.mean += v;
    r.mean /= values.size();
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.mean) * (v - r.mean);
        r.stddev = std::sqrt(ss / (values.size() - 1));
    }
    return r;
}

double approx_rand_test(const std::vector<int>& pred_a, const std::vector<int>& pred_b,
                        const std::vector<int>& gold, int iterations, Rng& rng) {
    const size_t n = gold.size();
    require(n >= 1, "randomization test on empty predictions");
    require(pred_a.size() == n && pred_b.size() == n,
            "randomization test: prediction length mismatch");
    require(iterations >= 1, "randomization test needs at least one iteration");

    // Per-pair contribution to (correct_a - correct_b); swapping a pair flips
    // its sign, so the permuted statistic is a random signed sum. Working in
    // integers makes the >= comparison exact.
    std::vector<int> diff(n);
    int64_t observed = 0;
    for (size_t i = 0; i < n; ++i) {
        diff[i] = static_cast<int>(pred_a[i] == gold[i]) - static_cast<int>(pred_b[i] == gold[i]);
        observed += diff[i];
    }
    const int64_t obs_abs = std::llabs(observed);

    int64_t count = 0;
    for (int it = 0; it < iterations; ++it) {
        int64_t sum = 0;
        size_t i = 0;
        while (i < n) {
            uint64_t bits = rng.next_u64();
            const size_t block = std::min<size_t>(64, n - i);
            for (size_t k = 0; k < block; ++k, ++i) {
                sum += (bits & 1) ? -diff[i] : diff[i];
                bits >>= 1;
            }
        }
        if (std::llabs(sum) >= obs_abs) ++count;
    }
    return static_cast<double>(count + 1) / (iterations + 1);
}

bool verdict_from_pvalues(const std::vector<double>& p_values, double threshold, int majority) {
    int below = 0;
    for (double p : p_values) below += p < threshold;
    return below >= majority;
}

SignificanceResult runs_significance(const std::vector<std::vector<int>>& preds_a,
                                     const std::vector<std::vector<int>>& preds_b,
                                     const std::vector<int>& gold, int iterations, uint64_t seed,
                                     double threshold) {
    require(preds_a.size() == preds_b.size(),
            "runs significance: run count mismatch between the two models");
    require(!preds_a.empty(), "runs significance: no runs given");
    SignificanceResult r;
    for (size_t i = 0; i < preds_a.size(); ++i) {
        Rng rng(seed + i);
        r.p_values.push_back(approx_rand_test(preds_a[i], preds_b[i], gold, iterations, rng));
    }
    const int majority = static_cast<int>(preds_a.size() / 2 + 1);
    r.significant = verdict_from_pvalues(r.p_values, threshold, majority);
    return r;
}

// Regularized incomplete gamma, Numerical-Recipes style: series expansion for
// x < s + 1, Lentz continued fraction otherwise.
namespace {

double gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_q_contfrac(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double gamma_p(double s, double x) {
    require(s > 0.0 && x >= 0.0, "incomplete gamma: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_contfrac(s, x);
}

double gamma_q(double s, double x) {
    require(s > 0.0 && x >= 0.0, "incomplete gamma: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_contfrac(s, x);
}

double chi_squared_upper_tail(double chi2, int df) {
    require(df >= 1, "chi-squared needs df >= 1");
    require(chi2 >= 0.0, "chi-squared statistic must be >= 0");
    return gamma_q(df / 2.0, chi2 / 2.0);
}

const std::vector<std::string>& emoticon_list() {
    static const std::vector<std::string> list = {":)", ":(", ":-)", ":-(", ":D", "=)"};
    return list;
}

std::vector<int64_t> emoticon_counts(const DatasetSplit& split) {
    const auto& emo = emoticon_list();
    std::vector<int64_t> counts(emo.size(), 0);
    for (const auto* part : {&split.train, &split.dev, &split.test}) {
        for (const auto& ex : *part) {
            for (size_t k = 0; k < emo.size(); ++k) {
                counts[k] += static_cast<int64_t>(count_occurrences(ex.text, emo[k]));
            }
        }
    }
    return counts;
}

ChiSquaredResult chi_squared_from_table(const std::vector<std::vector<int64_t>>& table) {
    require(table.size() == 2, "contingency table must have exactly two rows");
    const size_t K = table[0].size();
    require(K >= 2 && table[1].size() == K, "contingency table rows must agree and have >= 2 columns");

    int64_t row_total[2] = {0, 0};
    std::vector<int64_t> col_total(K, 0);
    int64_t grand = 0;
    for (int r = 0; r < 2; ++r) {
        for (size_t k = 0; k < K; ++k) {
            require(table[r][k] >= 0, "contingency counts must be >= 0");
            row_total[r] += table[r][k];
            col_total[k] += table[r][k];
            grand += table[r][k];
        }
    }
    for (int r = 0; r < 2; ++r) {
        if (row_total[r] == 0) {
            std::ostringstream msg;
            msg << "degenerate contingency table: group " << (r == 0 ? "a" : "b")
                << " has zero total count (per-category:";
            for (size_t k = 0; k < K; ++k) msg << ' ' << table[r][k];
            msg << ")";
            fail(msg.str());
        }
    }

    ChiSquaredResult res;
    res.table = table;
    res.df = static_cast<int>(K) - 1;
    for (int r = 0; r < 2; ++r) {
        for (size_t k = 0; k < K; ++k) {
            if (col_total[k] == 0) continue;  // category absent from both groups
            const double expected = static_cast<double>(row_total[r]) * col_total[k] / grand;
            const double d = table[r][k] - expected;
            res.chi2 += d * d / expected;
        }
    }
    res.p = chi_squared_upper_tail(res.chi2, res.df);
    return res;
}

ChiSquaredResult chi_squared_emoticons(const DatasetSplit& a, const DatasetSplit& b) {
    return chi_squared_from_table({emoticon_counts(a), emoticon_counts(b)});
}

size_t select_best(size_t count, const std::function<double(size_t)>& score) {
    require(count >= 1, "selection over an empty candidate list");
    size_t best = 0;
    double best_score = score(0);
    for (size_t i = 1; i < count; ++i) {
        const double s = score(i);
        if (s > best_score) {  // strict: ties keep the earliest candidate
            best = i;
            best_score = s;
        }
    }
    return best;
}

}  // namespace senti
