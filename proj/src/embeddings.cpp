#include "embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace senti {

std::vector<double> oov_vector(uint64_t oov_seed, const std::string& word, int dim) {
    uint64_t state = oov_seed ^ fnv1a64(word);
    Rng rng(state);
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform(-0.25, 0.25);
    return v;
}

std::vector<double> EmbeddingMatrix::lookup(const std::string& word) const {
    const int id = vocab.id(word);
    if (id >= 0) {
        auto r = row(id);
        return {r.begin(), r.end()};
    }
    return oov_vector(oov_seed, word, dim);
}

void EmbeddingMatrix::validate() const {
    require(dim > 0, "embedding dim must be positive");
    require(data.size() == vocab.size() * static_cast<size_t>(dim),
            "embedding matrix size does not match vocabulary");
    for (double x : data) {
        require(std::isfinite(x), "embedding matrix contains a non-finite value");
    }
}

void SkipgramConfig::validate() const {
    require(dim > 0, "skipgram dim must be positive");
    require(window >= 1, "skipgram window must be >= 1");
    require(negatives >= 1, "skipgram negatives must be >= 1");
    require(subsample > 0.0 && subsample <= 1.0, "skipgram subsample must be in (0, 1]");
    require(iterations >= 0, "skipgram iterations must be >= 0");
    require(learning_rate > 0.0, "skipgram learning rate must be positive");
    require(min_count >= 1, "skipgram min_count must be >= 1");
}

namespace {

constexpr double kLrFloor = 1e-4;
constexpr size_t kProbePairs = 256;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SkipgramTrainer::SkipgramTrainer(const std::vector<std::vector<std::string>>& corpus,
                                 const SkipgramConfig& config)
    : config_(config), rng_(config.seed) {
    config_.validate();
    require(!corpus.empty(), "skipgram corpus is empty");
    vocab_ = build_vocabulary(corpus, config_.min_count);

    sentences_.reserve(corpus.size());
    for (const auto& sentence : corpus) {
        std::vector<int> ids;
        ids.reserve(sentence.size());
        for (const auto& token : sentence) {
            const int id = vocab_.id(token);
            if (id >= 0) ids.push_back(id);
        }
        total_tokens_ += static_cast<int64_t>(ids.size());
        if (!ids.empty()) sentences_.push_back(std::move(ids));
    }
    require(total_tokens_ > 0, "skipgram corpus has no in-vocabulary tokens");

    const size_t n = vocab_.size();
    syn0_.resize(n * config_.dim);
    syn1_.assign(n * config_.dim, 0.0);
    for (auto& x : syn0_) x = rng_.uniform(-0.5, 0.5) / config_.dim;

    // Negative sampling follows the unigram distribution raised to 3/4.
    unigram_cdf_.resize(n);
    double cum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cum += std::pow(static_cast<double>(vocab_.counts[i]), 0.75);
        unigram_cdf_[i] = cum;
    }
    for (auto& x : unigram_cdf_) x /= cum;

    keep_prob_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double freq = static_cast<double>(vocab_.counts[i]) / total_tokens_;
        const double ratio = freq / config_.subsample;
        keep_prob_[i] = std::min(1.0, (std::sqrt(ratio) + 1.0) / ratio);
    }

    // Fixed probe batch for objective monitoring, drawn before any training.
    Rng probe_rng(config_.seed ^ 0x9e3779b97f4a7c15ULL);
    for (size_t attempt = 0; attempt < kProbePairs * 4 && probe_pairs_.size() < kProbePairs;
         ++attempt) {
        const auto& sent = sentences_[probe_rng.next_below(sentences_.size())];
        if (sent.size() < 2) continue;
        const size_t i = probe_rng.next_below(sent.size());
        const int span = 1 + static_cast<int>(probe_rng.next_below(
                                 static_cast<uint64_t>(config_.window)));
        const int lo = std::max<int>(0, static_cast<int>(i) - span);
        const int hi = std::min<int>(static_cast<int>(sent.size()) - 1,
                                     static_cast<int>(i) + span);
        if (hi == lo) continue;
        int j = static_cast<int>(lo + probe_rng.next_below(hi - lo + 1));
        if (j == static_cast<int>(i)) continue;
        probe_pairs_.push_back({sent[i], sent[j]});
        std::vector<int> negs(config_.negatives);
        for (auto& neg : negs) neg = sample_negative(probe_rng);
        probe_negs_.push_back(std::move(negs));
    }
}

int SkipgramTrainer::sample_negative(Rng& rng) const {
    const double u = rng.next_double();
    const auto it = std::lower_bound(unigram_cdf_.begin(), unigram_cdf_.end(), u);
    return static_cast<int>(std::min<size_t>(it - unigram_cdf_.begin(),
                                             unigram_cdf_.size() - 1));
}

double SkipgramTrainer::pair_loss(int center, int context, const std::vector<int>& negs) const {
    const int d = config_.dim;
    const double* in = syn0_.data() + static_cast<size_t>(context) * d;
    const double* out = syn1_.data() + static_cast<size_t>(center) * d;
    double dot = 0.0;
    for (int k = 0; k < d; ++k) dot += in[k] * out[k];
    double loss = -std::log(std::max(sigmoid(dot), 1e-12));
    for (int neg : negs) {
        const double* nv = syn1_.data() + static_cast<size_t>(neg) * d;
        double ndot = 0.0;
        for (int k = 0; k < d; ++k) ndot += in[k] * nv[k];
        loss += -std::log(std::max(sigmoid(-ndot), 1e-12));
    }
    return loss;
}

double SkipgramTrainer::probe_loss() const {
    if (probe_pairs_.empty()) return 0.0;
    double total = 0.0;
    for (size_t p = 0; p < probe_pairs_.size(); ++p) {
        total += pair_loss(probe_pairs_[p][0], probe_pairs_[p][1], probe_negs_[p]);
    }
    return total / probe_pairs_.size();
}

void SkipgramTrainer::train_pair(int center, int context, double lr) {
    const int d = config_.dim;
    double* in = syn0_.data() + static_cast<size_t>(context) * d;
    std::vector<double> in_grad(d, 0.0);
    for (int s = 0; s <= config_.negatives; ++s) {
        int target;
        double label;
        if (s == 0) {
            target = center;
            label = 1.0;
        } else {
            target = sample_negative(rng_);
            if (target == center) continue;
            label = 0.0;
        }
        double* out = syn1_.data() + static_cast<size_t>(target) * d;
        double dot = 0.0;
        for (int k = 0; k < d; ++k) dot += in[k] * out[k];
        const double g = (label - sigmoid(dot)) * lr;
        for (int k = 0; k < d; ++k) {
            in_grad[k] += g * out[k];
            out[k] += g * in[k];
        }
    }
    for (int k = 0; k < d; ++k) in[k] += in_grad[k];
}

void SkipgramTrainer::train() {
    const int64_t planned = static_cast<int64_t>(config_.iterations) * total_tokens_;
    int64_t processed = 0;
    std::vector<int> kept;
    for (int iter = 0; iter < config_.iterations; ++iter) {
        for (const auto& sentence : sentences_) {
            kept.clear();
            for (int id : sentence) {
                if (keep_prob_[id] >= 1.0 || rng_.next_double() < keep_prob_[id]) {
                    kept.push_back(id);
                }
            }
            processed += static_cast<int64_t>(sentence.size());
            if (kept.size() < 2) continue;
            const double progress =
                planned > 0 ? static_cast<double>(processed) / planned : 1.0;
            const double lr = std::max(
                kLrFloor, config_.learning_rate * (1.0 - progress) + kLrFloor * progress);
            for (size_t i = 0; i < kept.size(); ++i) {
                const int span = 1 + static_cast<int>(rng_.next_below(
                                         static_cast<uint64_t>(config_.window)));
                const int lo = std::max<int>(0, static_cast<int>(i) - span);
                const int hi = std::min<int>(static_cast<int>(kept.size()) - 1,
                                             static_cast<int>(i) + span);
                for (int j = lo; j <= hi; ++j) {
                    if (j == static_cast<int>(i)) continue;
                    train_pair(kept[i], kept[j], lr);
                }
            }
        }
    }
}

EmbeddingMatrix SkipgramTrainer::embeddings() const {
    EmbeddingMatrix m;
    m.vocab = vocab_;
    m.dim = config_.dim;
    m.data = syn0_;
    m.oov_seed = config_.seed;
    m.validate();
    return m;
}

EmbeddingMatrix train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                               const SkipgramConfig& config) {
    SkipgramTrainer trainer(corpus, config);
    trainer.train();
    return trainer.embeddings();
}

std::vector<std::vector<std::string>> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open corpus file " + path);
    std::vector<std::vector<std::string>> corpus;
    std::string line;
    while (std::getline(in, line)) {
        auto tokens = tokenize(line);
        if (!tokens.empty()) corpus.push_back(std::move(tokens));
    }
    return corpus;
}

EmbeddingMatrix load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open embedding file " + path);
    EmbeddingMatrix m;
    std::string line;
    size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (first) {
            first = false;
            // Optional `<vocab> <dim>` header: exactly two integer fields.
            std::string a, b, extra;
            std::istringstream probe(line);
            if (probe >> a >> b && !(probe >> extra)) {
                char* end_a = nullptr;
                char* end_b = nullptr;
                const long va = std::strtol(a.c_str(), &end_a, 10);
                const long vb = std::strtol(b.c_str(), &end_b, 10);
                if (*end_a == '\0' && *end_b == '\0' && va > 0 && vb > 0) {
                    m.vocab.words.reserve(static_cast<size_t>(va));
                    continue;
                }
            }
        }
        std::string word;
        ss >> word;
        require(!word.empty(), path + ":" + std::to_string(lineno) + ": missing word");
        std::vector<double> values;
        double v;
        while (ss >> v) values.push_back(v);
        require(!values.empty(),
                path + ":" + std::to_string(lineno) + ": no vector values for '" + word + "'");
        if (m.dim == 0) {
            m.dim = static_cast<int>(values.size());
        } else if (static_cast<int>(values.size()) != m.dim) {
            fail(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(m.dim) +
                 " values, got " + std::to_string(values.size()));
        }
        if (m.vocab.contains(word)) {
            fail(path + ":" + std::to_string(lineno) + ": duplicate word '" + word + "'");
        }
        m.vocab.index.emplace(word, static_cast<int>(m.vocab.words.size()));
        m.vocab.words.push_back(word);
        m.vocab.counts.push_back(1);
        m.data.insert(m.data.end(), values.begin(), values.end());
    }
    require(m.dim > 0 && !m.vocab.words.empty(), "embedding file " + path + " has no vectors");
    m.validate();
    return m;
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path) {
    matrix.validate();
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write embedding file " + path);
    out << matrix.vocab.size() << ' ' << matrix.dim << '\n';
    char buf[64];
    for (size_t i = 0; i < matrix.vocab.size(); ++i) {
        out << matrix.vocab.words[i];
        const auto r = matrix.row(static_cast<int>(i));
        for (double v : r) {
            std::snprintf(buf, sizeof(buf), " %.10g", v);
            out << buf;
        }
        out << '\n';
    }
    require(out.good(), "write failed on embedding file " + path);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double denom = std::sqrt(na) * std::sqrt(nb);
    return denom == 0.0 ? 0.0 : dot / denom;
}

}  // namespace senti
