#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace senti {

// Fraction of positions where pred matches gold. Errors on empty or
// mismatched lengths.
double accuracy(const std::vector<int>& gold, const std::vector<int>& pred);

// Unweighted mean of per-dataset accuracies. `expected_count` > 0 enforces
// that exactly that many values are present (a missing dataset is an error).
double macro_average(const std::vector<double>& per_dataset, int expected_count = -1);

// Entry (i, j) counts gold class i predicted as class j.
std::vector<std::vector<int64_t>> confusion_matrix(const std::vector<int>& gold,
                                                   const std::vector<int>& pred, int num_classes);

struct RunStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1) standard deviation; 0 when n == 1
};
RunStats run_stats(const std::vector<double>& values);

// Approximate randomization test on paired predictions. The statistic is the
// absolute accuracy difference; every iteration swaps each prediction pair
// independently with probability 1/2, and the p-value is
// (#{permuted statistic >= observed} + 1) / (iterations + 1).
double approx_rand_test(const std::vector<int>& pred_a, const std::vector<int>& pred_b,
                        const std::vector<int>& gold, int iterations, Rng& rng);

// Majority-of-runs rule: true iff at least `majority` of the p-values are
// below `threshold`.
bool verdict_from_pvalues(const std::vector<double>& p_values, double threshold = 0.01,
                          int majority = 3);

struct SignificanceResult {
    std::vector<double> p_values;  // one per run pair (run i of A vs run i of B)
    bool significant = false;
};

// Pairs run i of A with run i of B, tests each pair, and applies the
// majority rule (at least 3 of 5 below 0.01 for the standard 5-run setup).
SignificanceResult runs_significance(const std::vector<std::vector<int>>& preds_a,
                                     const std::vector<std::vector<int>>& preds_b,
                                     const std::vector<int>& gold, int iterations, uint64_t seed,
                                     double threshold = 0.01);

// Regularized incomplete gamma functions (series + continued fraction),
// accurate to ~1e-10; used for chi-squared tail probabilities.
double gamma_p(double s, double x);  // lower: P(s, x)
double gamma_q(double s, double x);  // upper: Q(s, x) = 1 - P(s, x)

// Upper-tail probability of the chi-squared distribution with `df` degrees
// of freedom.
double chi_squared_upper_tail(double chi2, int df);

// The emoticons counted in the frequency analysis, in report column order.
const std::vector<std::string>& emoticon_list();

// Non-overlapping substring counts of the six emoticons over every raw text
// (all three partitions) of the dataset.
std::vector<int64_t> emoticon_counts(const DatasetSplit& split);

struct ChiSquaredResult {
    double chi2 = 0.0;
    double p = 1.0;
    int df = 0;
    std::vector<std::vector<int64_t>> table;  // observed counts, one row per group
};

// Pearson chi-squared on a 2 x K contingency table with df = K - 1.
// A group with an all-zero row is a degenerate table and errors.
ChiSquaredResult chi_squared_from_table(const std::vector<std::vector<int64_t>>& table);

// Builds the 2 x 6 emoticon table for the two datasets and tests it.
ChiSquaredResult chi_squared_emoticons(const DatasetSplit& a, const DatasetSplit& b);

// Evaluates score(0..count-1) and returns the index of the maximum; exact
// ties keep the earliest index, so candidate order encodes the tie rule
// (smaller configurations first).
size_t select_best(size_t count, const std::function<double(size_t)>& score);

}  // namespace senti
