#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "rng.hpp"
#include "text.hpp"

using namespace senti;

namespace {

double round1(double v) { return std::round(v * 10.0) / 10.0; }

// Exact randomization p-value for small n: enumerate all 2^n sign patterns of
// the per-pair correctness differences and count |permuted sum| >= |observed|.
double exhaustive_rand_p(const std::vector<int>& pred_a, const std::vector<int>& pred_b,
                         const std::vector<int>& gold) {
    const size_t n = gold.size();
    REQUIRE(n <= 16);
    std::vector<int> diff(n);
    int64_t observed = 0;
    for (size_t i = 0; i < n; ++i) {
        diff[i] = (pred_a[i] == gold[i] ? 1 : 0) - (pred_b[i] == gold[i] ? 1 : 0);
        observed += diff[i];
    }
    const int64_t obs_abs = std::llabs(observed);
    const uint64_t total = uint64_t{1} << n;
    uint64_t count = 0;
    for (uint64_t mask = 0; mask < total; ++mask) {
        int64_t sum = 0;
        for (size_t i = 0; i < n; ++i) {
            sum += (mask >> i) & 1 ? -diff[i] : diff[i];
        }
        if (std::llabs(sum) >= obs_abs) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
}

LabeledExample example(std::string text, int label = 0) {
    LabeledExample ex;
    ex.tokens = tokenize(text);
    ex.text = std::move(text);
    ex.label = label;
    return ex;
}

DatasetSplit three_part_split(std::string name, const std::vector<std::string>& train,
                              const std::vector<std::string>& dev,
                              const std::vector<std::string>& test) {
    DatasetSplit s;
    s.name = std::move(name);
    s.scheme = LabelScheme::for_num_labels(2);
    for (const auto& t : train) s.train.push_back(example(t));
    for (const auto& t : dev) s.dev.push_back(example(t));
    for (const auto& t : test) s.test.push_back(example(t));
    return s;
}

// Closed-form chi-squared upper tails for small degrees of freedom, written
// from the textbook recurrences so they share nothing with the library code.
double chi2_tail_closed_form(double x, int df) {
    const double u = std::sqrt(x / 2.0);
    switch (df) {
        case 1: return std::erfc(u);
        case 2: return std::exp(-x / 2.0);
        case 3: return std::erfc(u) + 2.0 / std::sqrt(M_PI) * u * std::exp(-u * u);
        case 4: return std::exp(-x / 2.0) * (1.0 + x / 2.0);
        case 5:
            return std::erfc(u) +
                   2.0 / std::sqrt(M_PI) * std::exp(-u * u) * (u + 2.0 * u * u * u / 3.0);
        case 6: return std::exp(-x / 2.0) * (1.0 + x / 2.0 + x * x / 8.0);
        default: FAIL("unsupported df in closed form"); return 0.0;
    }
}

}  // namespace

TEST_CASE("accuracy counts matches and rejects deformed inputs") {
    CHECK(accuracy({1, 0, 1}, {1, 1, 1}) == 2.0 / 3.0);
    CHECK(accuracy({4, 2, 0, 3}, {4, 2, 0, 3}) == 1.0);
    CHECK(accuracy({0, 0, 0}, {1, 1, 1}) == 0.0);
    CHECK_THROWS_AS(accuracy({}, {}), Error);
    CHECK_THROWS_AS(accuracy({1, 2}, {1}), Error);
}

TEST_CASE("macro average reproduces the published row summaries") {
    const std::vector<double> bilstm300{45.6, 82.6, 82.5, 59.3, 66.2, 65.1};
    CHECK(round1(macro_average(bilstm300, 6)) == 66.9);

    // Recomputing this row from its printed one-decimal inputs lands on 66.6.
    const std::vector<double> lstm600{44.5, 83.1, 81.2, 57.4, 65.7, 67.5};
    CHECK(round1(macro_average(lstm600, 6)) == 66.6);

    CHECK(macro_average({0.25, 0.25, 0.25, 0.25, 0.25, 0.25}) == 0.25);

    CHECK_THROWS_AS(macro_average({}), Error);
    CHECK_THROWS_WITH_AS(macro_average({1.0, 2.0}, 6),
                         doctest::Contains("expected 6"), Error);
}

TEST_CASE("confusion matrix counts pairs and conserves the total") {
    const auto ident = confusion_matrix({0, 1}, {0, 1}, 2);
    CHECK(ident == std::vector<std::vector<int64_t>>{{1, 0}, {0, 1}});

    // Everything predicted class 0: one nonzero column.
    const auto col = confusion_matrix({0, 1, 2, 1}, {0, 0, 0, 0}, 3);
    CHECK(col == std::vector<std::vector<int64_t>>{{1, 0, 0}, {2, 0, 0}, {1, 0, 0}});

    const std::vector<int> gold{0, 1, 2, 1, 0, 2, 2, 1};
    const std::vector<int> pred{0, 2, 2, 1, 1, 0, 2, 1};
    const auto m = confusion_matrix(gold, pred, 3);
    int64_t total = 0;
    int64_t trace = 0;
    for (int r = 0; r < 3; ++r) {
        int64_t row_sum = 0;
        for (int c = 0; c < 3; ++c) {
            total += m[r][c];
            row_sum += m[r][c];
        }
        trace += m[r][r];
        int64_t gold_count = 0;
        for (int g : gold) gold_count += g == r;
        CHECK(row_sum == gold_count);
    }
    CHECK(total == static_cast<int64_t>(gold.size()));
    CHECK(accuracy(gold, pred) == static_cast<double>(trace) / static_cast<double>(total));

    CHECK_THROWS_AS(confusion_matrix({0, 3}, {0, 1}, 2), Error);
    CHECK_THROWS_AS(confusion_matrix({0, 1}, {0, -1}, 2), Error);
    CHECK_THROWS_AS(confusion_matrix({0, 1}, {0}, 2), Error);
}

TEST_CASE("run statistics use the sample standard deviation") {
    const RunStats r = run_stats({0.5, 0.6, 0.7, 0.8, 0.9});
    CHECK(r.mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.stddev == doctest::Approx(0.15811388300841897).epsilon(1e-9));

    const RunStats single = run_stats({0.42});
    CHECK(single.mean == 0.42);
    CHECK(single.stddev == 0.0);

    const RunStats flat = run_stats({0.7, 0.7, 0.7, 0.7, 0.7});
    CHECK(flat.mean == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(flat.stddev < 1e-12);

    CHECK_THROWS_AS(run_stats({}), Error);
}

TEST_CASE("identical predictions give randomization p exactly 1") {
    const std::vector<int> gold{0, 1, 0, 1, 1, 0};
    const std::vector<int> pred{0, 1, 1, 1, 0, 0};
    Rng rng(13);
    CHECK(approx_rand_test(pred, pred, gold, 500, rng) == 1.0);
}

TEST_CASE("randomization p is symmetric in the two models") {
    const std::vector<int> gold{0, 1, 0, 1, 1, 0, 0, 1, 0, 0};
    const std::vector<int> a{0, 1, 0, 1, 1, 1, 0, 1, 1, 0};
    const std::vector<int> b{1, 1, 0, 0, 1, 0, 0, 0, 0, 0};
    Rng ra(99);
    Rng rb(99);
    const double pab = approx_rand_test(a, b, gold, 2000, ra);
    const double pba = approx_rand_test(b, a, gold, 2000, rb);
    CHECK(pab == pba);
    CHECK(pab >= 1.0 / 2001.0);
    CHECK(pab <= 1.0);
}

TEST_CASE("sampled randomization p tracks the exhaustive enumeration at n=12") {
    const size_t n = 12;

    // Perfect model against an always-wrong one.
    std::vector<int> gold(n), perfect(n), wrong(n);
    for (size_t i = 0; i < n; ++i) {
        gold[i] = static_cast<int>(i % 2);
        perfect[i] = gold[i];
        wrong[i] = 1 - gold[i];
    }
    const double exact = exhaustive_rand_p(perfect, wrong, gold);
    CHECK(exact == 2.0 / 4096.0);  // only the all-swap and no-swap patterns tie
    Rng rng(7);
    const double sampled = approx_rand_test(perfect, wrong, gold, 10000, rng);
    CHECK(std::abs(sampled - exact) <= 0.02);

    // Randomly disagreeing models, several draws.
    for (const uint64_t seed : {21ULL, 22ULL, 23ULL}) {
        Rng data(seed);
        std::vector<int> a(n), b(n);
        for (size_t i = 0; i < n; ++i) {
            gold[i] = static_cast<int>(data.next_u64() & 1);
            a[i] = data.next_double() < 0.75 ? gold[i] : 1 - gold[i];
            b[i] = data.next_double() < 0.55 ? gold[i] : 1 - gold[i];
        }
        const double ex = exhaustive_rand_p(a, b, gold);
        Rng perm(seed * 1000);
        const double sp = approx_rand_test(a, b, gold, 10000, perm);
        CHECK(std::abs(sp - ex) <= 0.02);
        CHECK(sp >= 1.0 / 10001.0);
        CHECK(sp <= 1.0);
    }

    CHECK_THROWS_AS([&] {
        Rng r(1);
        approx_rand_test({0, 1}, {0}, {0, 1}, 10, r);
    }(), Error);
    CHECK_THROWS_AS([&] {
        Rng r(1);
        approx_rand_test({}, {}, {}, 10, r);
    }(), Error);
}

TEST_CASE("randomization test rejects at roughly its nominal rate under the null") {
    // Two models guessing independently at random: the exchangeability null
    // holds exactly, so p < 0.05 should fire for about 5% of trials. Keeping
    // the iteration count high makes the +1/+1 smoothing negligible, and fully
    // random predictions keep the permutation distribution fine-grained enough
    // that tie inclusion costs little. Everything is seeded, so the observed
    // rate is one fixed number, not a flaky sample.
    const int n = 400;
    const int trials = 500;
    const int iterations = 999;

    Rng data(20260816);
    std::vector<int> gold(n);
    for (int i = 0; i < n; ++i) gold[i] = static_cast<int>(data.next_u64() & 1);

    int rejections = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<int>(data.next_u64() & 1);
            b[i] = static_cast<int>(data.next_u64() & 1);
        }
        Rng perm(40000 + static_cast<uint64_t>(t));
        const double p = approx_rand_test(a, b, gold, iterations, perm);
        rejections += p < 0.05;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.07);
}

TEST_CASE("majority verdict needs at least three small p-values") {
    CHECK_FALSE(verdict_from_pvalues({1.0, 1.0, 1.0, 1.0, 1.0}));
    CHECK_FALSE(verdict_from_pvalues({0.001, 0.002, 1.0, 1.0, 1.0}));
    CHECK(verdict_from_pvalues({0.001, 0.002, 0.0099, 1.0, 1.0}));
    CHECK(verdict_from_pvalues({0.001, 0.001, 0.001, 0.001, 0.001}));

    // The threshold is strict: p exactly 0.01 does not count.
    CHECK_FALSE(verdict_from_pvalues({0.01, 0.01, 0.01, 0.01, 0.01}));

    CHECK(verdict_from_pvalues({0.04, 0.04, 1.0}, 0.05, 2));
    CHECK_FALSE(verdict_from_pvalues({0.04, 1.0, 1.0}, 0.05, 2));
}

TEST_CASE("five-run significance pairs run i with run i") {
    const int n = 100;
    std::vector<int> gold(n), flipped(n);
    for (int i = 0; i < n; ++i) {
        gold[i] = i % 2;
        flipped[i] = 1 - gold[i];
    }

    // Identical runs: every pair ties, never significant.
    const std::vector<std::vector<int>> same(5, gold);
    const SignificanceResult tie = runs_significance(same, same, gold, 500, 11);
    REQUIRE(tie.p_values.size() == 5);
    for (double p : tie.p_values) CHECK(p == 1.0);
    CHECK_FALSE(tie.significant);

    // A perfect model against an always-wrong one: every pair maximally
    // separated, p at the smoothing floor.
    const std::vector<std::vector<int>> perfect(5, gold);
    const std::vector<std::vector<int>> wrong(5, flipped);
    const SignificanceResult sep = runs_significance(perfect, wrong, gold, 1000, 11);
    for (double p : sep.p_values) CHECK(p == 1.0 / 1001.0);
    CHECK(sep.significant);

    // Two extreme pairs and three tied pairs stay below the majority.
    std::vector<std::vector<int>> mixed_b{flipped, flipped, gold, gold, gold};
    const SignificanceResult two = runs_significance(perfect, mixed_b, gold, 1000, 11);
    int below = 0;
    for (double p : two.p_values) below += p < 0.01;
    CHECK(below == 2);
    CHECK_FALSE(two.significant);

    std::vector<std::vector<int>> four(4, gold);
    CHECK_THROWS_AS(runs_significance(perfect, four, gold, 100, 11), Error);
    CHECK_THROWS_AS(runs_significance({}, {}, gold, 100, 11), Error);
}

TEST_CASE("incomplete gamma matches closed forms and stays complementary") {
    for (const double s : {0.5, 1.0, 2.5, 7.0}) {
        CHECK(gamma_p(s, 0.0) == 0.0);
        CHECK(gamma_q(s, 0.0) == 1.0);
        for (const double x : {0.1, 1.0, 3.0, 10.0}) {
            CHECK(gamma_p(s, x) + gamma_q(s, x) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(gamma_p(s, x) > 0.0);
            CHECK(gamma_q(s, x) > 0.0);
        }
    }
    for (const double x : {0.04, 0.25, 1.0, 2.25, 9.0}) {
        CHECK(gamma_q(0.5, x) == doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-10));
        CHECK(gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gamma_p(0.0, 1.0), Error);
    CHECK_THROWS_AS(gamma_q(1.0, -0.5), Error);
}

TEST_CASE("chi-squared tail probabilities match the published table") {
    // The two tail values reported alongside the emoticon analysis.
    CHECK(chi_squared_upper_tail(9.305, 5) == doctest::Approx(0.097).epsilon(5e-3));
    CHECK(chi_squared_upper_tail(19.408, 5) == doctest::Approx(0.002).epsilon(5e-3));

    for (const double x : {0.5, 2.3, 9.305, 19.408}) {
        for (int df = 1; df <= 6; ++df) {
            CHECK(chi_squared_upper_tail(x, df) ==
                  doctest::Approx(chi2_tail_closed_form(x, df)).epsilon(1e-9));
        }
    }
    CHECK(chi_squared_upper_tail(0.0, 5) == 1.0);
    CHECK_THROWS_AS(chi_squared_upper_tail(1.0, 0), Error);
    CHECK_THROWS_AS(chi_squared_upper_tail(-1.0, 5), Error);
}

TEST_CASE("contingency table statistic, symmetry, and degeneracy handling") {
    // Hand-checked 2x2: all expected counts are 15, chi2 = 4 * 25/15.
    const auto hand = chi_squared_from_table({{10, 20}, {20, 10}});
    CHECK(hand.chi2 == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
    CHECK(hand.df == 1);
    CHECK(hand.p == doctest::Approx(std::erfc(std::sqrt(10.0 / 3.0))).epsilon(1e-9));
    CHECK(hand.table == std::vector<std::vector<int64_t>>{{10, 20}, {20, 10}});

    // Identical rows: exact zero statistic.
    const auto same = chi_squared_from_table({{5, 3, 2}, {5, 3, 2}});
    CHECK(same.chi2 == 0.0);
    CHECK(same.p == 1.0);
    CHECK(same.df == 2);

    const auto six = chi_squared_from_table({{1, 2, 3, 4, 5, 6}, {6, 5, 4, 3, 2, 1}});
    CHECK(six.df == 5);

    const auto fwd = chi_squared_from_table({{7, 1, 4}, {2, 9, 3}});
    const auto rev = chi_squared_from_table({{2, 9, 3}, {7, 1, 4}});
    CHECK(fwd.chi2 == doctest::Approx(rev.chi2).epsilon(1e-12));
    CHECK(fwd.p == doctest::Approx(rev.p).epsilon(1e-12));

    // A category absent from both groups contributes nothing to the statistic
    // (though it still widens the table).
    const auto with_gap = chi_squared_from_table({{1, 0, 2}, {3, 0, 4}});
    const auto without = chi_squared_from_table({{1, 2}, {3, 4}});
    CHECK(with_gap.chi2 == doctest::Approx(without.chi2).epsilon(1e-12));
    CHECK(with_gap.df == 2);
    CHECK(without.df == 1);

    CHECK_THROWS_AS(chi_squared_from_table({{1, 2}}), Error);
    CHECK_THROWS_AS(chi_squared_from_table({{1, 2}, {3, 4}, {5, 6}}), Error);
    CHECK_THROWS_AS(chi_squared_from_table({{1, 2}, {3}}), Error);
    CHECK_THROWS_AS(chi_squared_from_table({{1}, {2}}), Error);
    CHECK_THROWS_AS(chi_squared_from_table({{1, -2}, {3, 4}}), Error);
    CHECK_THROWS_WITH_AS(chi_squared_from_table({{0, 0, 0}, {1, 2, 3}}),
                         doctest::Contains("degenerate"), Error);
    CHECK_THROWS_WITH_AS(chi_squared_from_table({{1, 2, 3}, {0, 0, 0}}),
                         doctest::Contains("per-category: 0 0 0"), Error);
}

TEST_CASE("emoticon counting is substring-based over all raw partitions") {
    const auto& emo = emoticon_list();
    CHECK(emo == std::vector<std::string>{":)", ":(", ":-)", ":-(", ":D", "=)"});

    // Tokenization would shatter every one of these; counts must come from the
    // raw text. ":-)" must not also count as ":)".
    const DatasetSplit a = three_part_split(
        "a", {"i love this :)", "so happy :):)"}, {"meh"}, {"grinning :D here"});
    CHECK(emoticon_counts(a) == std::vector<int64_t>{3, 0, 0, 0, 1, 0});

    const DatasetSplit b = three_part_split(
        "b", {"nose smiley :-) yay"}, {"sad :-( end:-("}, {"equals =) =) and :("});
    CHECK(emoticon_counts(b) == std::vector<int64_t>{0, 1, 1, 2, 0, 2});

    const auto direct = chi_squared_from_table({emoticon_counts(a), emoticon_counts(b)});
    const auto via = chi_squared_emoticons(a, b);
    CHECK(via.chi2 == direct.chi2);
    CHECK(via.p == direct.p);
    CHECK(via.df == 5);
    CHECK(via.table == direct.table);

    const auto swapped = chi_squared_emoticons(b, a);
    CHECK(swapped.chi2 == doctest::Approx(via.chi2).epsilon(1e-12));

    const DatasetSplit none = three_part_split("plain", {"no faces here"}, {"none"}, {"nada"});
    CHECK_THROWS_WITH_AS(chi_squared_emoticons(a, none), doctest::Contains("degenerate"), Error);
}

TEST_CASE("grid selection keeps the earliest candidate on exact ties") {
    const std::vector<double> scores{1.0, 3.0, 3.0, 2.0};
    CHECK(select_best(scores.size(), [&](size_t i) { return scores[i]; }) == 1);
    CHECK(select_best(3, [](size_t) { return 0.5; }) == 0);
    CHECK(select_best(4, [](size_t i) { return static_cast<double>(i); }) == 3);
    CHECK(select_best(1, [](size_t) { return -2.0; }) == 0);

    // Every candidate is visited exactly once, in order.
    std::vector<size_t> visited;
    select_best(4, [&](size_t i) {
        visited.push_back(i);
        return 0.0;
    });
    CHECK(visited == std::vector<size_t>{0, 1, 2, 3});

    CHECK_THROWS_AS(select_best(0, [](size_t) { return 0.0; }), Error);
}
