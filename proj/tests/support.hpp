#pragma once

// Shared helpers for the test suites: a temporary-directory guard, small file
// utilities, a central-difference gradient checker with kink detection, and
// synthetic sentiment corpora that are separable by construction.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "joint.hpp"
#include "rng.hpp"
#include "tensor.hpp"
#include "text.hpp"

namespace testsupport {

// RAII temporary directory; removed recursively on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = "/tmp/sentibench-test-XXXXXX";
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Finite-difference gradient checking
// ---------------------------------------------------------------------------

struct GradCheck {
    double max_rel_err = 0.0;
    int compared = 0;  // coordinates actually compared
    int skipped = 0;   // coordinates skipped near non-differentiable kinks
};

// Central-difference check of every coordinate of every parameter.
//
// `loss(with_grad)` must run a full forward pass and return the scalar loss;
// when `with_grad` is true it must also populate the parameters' gradients
// (overwriting, not accumulating on top of stale values).
//
// A coordinate is skipped when the symmetric second difference
// |f(x+h) + f(x-h) - 2 f(x)| exceeds `kink_tol`: for smooth losses that
// quantity is O(h^2), while straddling a kink (relu corner, hinge margin,
// hard-tanh edge) makes it O(h), so the threshold cleanly separates the two.
inline GradCheck check_gradients(const std::vector<senti::Parameter*>& params,
                                 const std::function<double(bool)>& loss, double h = 1e-5,
                                 double kink_tol = 1e-7) {
    GradCheck result;
    const double f0 = loss(true);
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (auto* p : params) analytic.push_back(p->grad.data);

    for (size_t pi = 0; pi < params.size(); ++pi) {
        auto& value = params[pi]->value.data;
        for (size_t k = 0; k < value.size(); ++k) {
            const double saved = value[k];
            value[k] = saved + h;
            const double f_plus = loss(false);
            value[k] = saved - h;
            const double f_minus = loss(false);
            value[k] = saved;

            if (std::abs(f_plus + f_minus - 2.0 * f0) > kink_tol) {
                ++result.skipped;
                continue;
            }
            const double numeric = (f_plus - f_minus) / (2.0 * h);
            const double a = analytic[pi][k];
            const double scale = std::max(std::abs(a), std::abs(numeric));
            if (scale < 1e-7) {
                ++result.compared;  // both effectively zero
                continue;
            }
            const double rel = std::abs(a - numeric) / scale;
            result.max_rel_err = std::max(result.max_rel_err, rel);
            ++result.compared;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

// Word banks ordered most-negative to most-positive; disjoint across classes
// so any bag-of-words or embedding model can separate them.
inline const std::vector<std::vector<std::string>>& polarity_banks() {
    static const std::vector<std::vector<std::string>> banks = {
        {"terrible", "awful", "horrible", "dreadful"},
        {"weak", "boring", "flawed", "tedious"},
        {"okay", "average", "watchable", "ordinary"},
        {"solid", "enjoyable", "pleasant", "charming"},
        {"great", "fantastic", "wonderful", "superb"},
    };
    return banks;
}

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {"the", "movie",  "was", "plot", "acting",
                                                   "film", "story", "a",   "with", "and"};
    return words;
}

// Which banks a C-class scheme draws from, most negative first.
inline std::vector<int> bank_indices(int num_labels) {
    switch (num_labels) {
        case 2: return {0, 4};
        case 3: return {0, 2, 4};
        case 4: return {0, 1, 3, 4};
        case 5: return {0, 1, 2, 3, 4};
        default: throw std::runtime_error("toy_dataset supports 2..5 labels");
    }
}

inline senti::LabeledExample toy_example(int label, int num_labels, senti::Rng& rng) {
    const auto& banks = polarity_banks();
    const auto& filler = filler_words();
    const auto& bank = banks[static_cast<size_t>(bank_indices(num_labels)[label])];

    std::vector<std::string> words;
    const int n_filler = 3 + static_cast<int>(rng.next_below(4));  // 3..6
    const int n_signal = 2 + static_cast<int>(rng.next_below(2));  // 2..3
    for (int i = 0; i < n_filler; ++i) words.push_back(filler[rng.next_below(filler.size())]);
    for (int i = 0; i < n_signal; ++i) {
        // Signal words go at random positions so order-sensitive models see
        // them anywhere in the sequence.
        auto pos = words.begin() + static_cast<long>(rng.next_below(words.size() + 1));
        words.insert(pos, bank[rng.next_below(bank.size())]);
    }

    std::string text;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        text += words[i];
    }
    senti::LabeledExample ex;
    ex.text = text;
    ex.tokens = senti::tokenize(text);
    ex.label = label;
    return ex;
}

inline std::vector<senti::LabeledExample> toy_partition(int count, int num_labels,
                                                        senti::Rng& rng) {
    std::vector<senti::LabeledExample> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(toy_example(i % num_labels, num_labels, rng));
    return out;
}

// Balanced, separable synthetic dataset: class c's examples contain signal
// words drawn from a bank unique to c, mixed into shared filler.
inline senti::DatasetSplit toy_dataset(int num_labels, int train_n, int dev_n, int test_n,
                                       uint64_t seed) {
    senti::Rng rng(seed);
    senti::DatasetSplit split;
    split.name = "toy";
    split.scheme = senti::LabelScheme::for_num_labels(num_labels);
    split.train = toy_partition(train_n, num_labels, rng);
    split.dev = toy_partition(dev_n, num_labels, rng);
    split.test = toy_partition(test_n, num_labels, rng);
    return split;
}

// Writes the dataset in the TSV container format under `dir`.
inline void write_toy_dataset(const senti::DatasetSplit& split, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto dump = [&](const std::vector<senti::LabeledExample>& part, const std::string& name) {
        std::ostringstream out;
        for (const auto& ex : part) out << ex.label << '\t' << ex.text << '\n';
        write_file(dir + "/" + name, out.str());
    };
    dump(split.train, "train.tsv");
    dump(split.dev, "dev.tsv");
    dump(split.test, "test.tsv");
}

// Distantly-labeled polarity corpus shaped so that every extracted window
// is centered on a polarity-unique signature word ("great" only in +1
// texts, "terrible" only in -1 texts): each text is exactly one window
// long with shared filler at the edges. Corrupting a center therefore
// always produces a cross-polarity or filler replacement, never an
// interchangeable same-polarity sibling, so the sentiment hinge has a
// consistent perfect ranking to learn.
inline std::vector<senti::DistantExample> polarity_corpus(int count, uint64_t seed,
                                                          int window = 3) {
    senti::Rng rng(seed);
    const auto& filler = filler_words();
    std::vector<senti::DistantExample> corpus;
    corpus.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int polarity = (i % 2 == 0) ? 1 : -1;
        senti::DistantExample ex;
        ex.polarity = polarity;
        for (int t = 0; t < window; ++t) {
            if (t == window / 2) {
                ex.tokens.push_back(polarity > 0 ? "great" : "terrible");
            } else {
                ex.tokens.push_back(filler[rng.next_below(filler.size())]);
            }
        }
        corpus.push_back(std::move(ex));
    }
    return corpus;
}

// Synonym-pair lexicon over the toy banks (edges within each bank).
inline std::string toy_lexicon_text() {
    std::ostringstream out;
    for (const auto& bank : polarity_banks())
        for (size_t i = 0; i + 1 < bank.size(); ++i) out << bank[i] << '\t' << bank[i + 1] << '\n';
    return out.str();
}

}  // namespace testsupport
