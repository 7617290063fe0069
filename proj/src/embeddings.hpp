#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace senti {

// Vocabulary-indexed dense matrix of 64-bit word vectors. Out-of-vocabulary
// lookups synthesize a deterministic pseudo-random vector in [-0.25, 0.25]
// keyed by (oov_seed, word); the matrix itself is never mutated by lookups.
struct EmbeddingMatrix {
    Vocabulary vocab;
    int dim = 0;
    std::vector<double> data;  // row-major |vocab| x dim
    uint64_t oov_seed = 0x5eedULL;

    std::span<const double> row(int word_id) const {
        return {data.data() + static_cast<size_t>(word_id) * dim, static_cast<size_t>(dim)};
    }
    std::span<double> row(int word_id) {
        return {data.data() + static_cast<size_t>(word_id) * dim, static_cast<size_t>(dim)};
    }

    // In-vocabulary: the stored row. OOV: deterministic uniform [-0.25, 0.25].
    std::vector<double> lookup(const std::string& word) const;

    void validate() const;
};

std::vector<double> oov_vector(uint64_t oov_seed, const std::string& word, int dim);

struct SkipgramConfig {
    int dim = 50;
    int window = 10;
    int negatives = 5;
    double subsample = 1e-4;
    int iterations = 5;
    double learning_rate = 0.025;
    int64_t min_count = 1;
    uint64_t seed = 1;

    void validate() const;
};

// Skip-gram with negative sampling, single-threaded and bitwise deterministic
// for a fixed seed. Exposed as a class so callers can probe the training
// objective on a fixed batch before and after training.
class SkipgramTrainer {
public:
    SkipgramTrainer(const std::vector<std::vector<std::string>>& corpus,
                    const SkipgramConfig& config);

    void train();

    // Mean negative-sampling loss over (center, context) probe pairs with
    // `negatives` fixed negative samples each, drawn once at construction.
    double probe_loss() const;

    EmbeddingMatrix embeddings() const;
    const Vocabulary& vocab() const { return vocab_; }

private:
    void train_pair(int center, int context, double lr);
    double pair_loss(int center, int context, const std::vector<int>& negs) const;
    int sample_negative(Rng& rng) const;

    SkipgramConfig config_;
    Vocabulary vocab_;
    std::vector<std::vector<int>> sentences_;  // corpus as vocab ids, OOV dropped
    std::vector<double> syn0_, syn1_;          // input / output vectors
    std::vector<double> unigram_cdf_;          // negative-sampling distribution
    std::vector<double> keep_prob_;            // subsampling keep probability
    int64_t total_tokens_ = 0;
    Rng rng_;
    std::vector<std::array<int, 2>> probe_pairs_;
    std::vector<std::vector<int>> probe_negs_;
};

EmbeddingMatrix train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                               const SkipgramConfig& config);

// Text format: optional first header line `<vocab> <dim>`, then one line per
// word: `word v1 v2 ... vd`, space separated, period decimal separator.
// Reads a corpus file with one text per line, tokenizes each line, and drops
// lines with no tokens. Errors when the file cannot be opened.
std::vector<std::vector<std::string>> load_corpus(const std::string& path);

EmbeddingMatrix load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path);

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace senti
