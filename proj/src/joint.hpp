#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embeddings.hpp"
#include "nn.hpp"

namespace senti {

// One distantly-labeled text: polarity comes from surface markers (emoticons
// or hashtags), not human annotation.
struct DistantExample {
    std::vector<std::string> tokens;
    int polarity = 0;  // +1 or -1
};

struct DistantMarkers {
    std::vector<std::string> positive;
    std::vector<std::string> negative;

    static DistantMarkers defaults();  // {":)", ":-)", ":D", "=)"} / {":(", ":-("}
};

// +1 if the text contains a positive marker and no negative one, -1 in the
// mirrored case, nothing when neither or both kinds appear. Substring match
// on the raw text (tokenization would split multi-character emoticons).
std::optional<int> distant_label(const std::string& text,
                                 const DistantMarkers& markers = DistantMarkers::defaults());

// One text per line; lines that distant_label cannot polarize are dropped.
std::vector<DistantExample> load_distant_corpus(
    const std::string& path, const DistantMarkers& markers = DistantMarkers::defaults());

struct JointConfig {
    int dim = 50;
    int window = 3;  // odd
    int hidden = 20;
    double alpha = 0.5;  // weight of the language-model loss in the combination
    double learning_rate = 0.025;
    int epochs = 5;
    int64_t min_count = 1;
    uint64_t seed = 1;

    void validate() const;
};

// Window scorer: the window's embeddings are concatenated, pass through a
// hard-tanh hidden layer, and feed two linear heads — a scalar language-model
// score f_cw and a 2-vector sentiment score f_s (f_s[0] enters the loss).
struct JointScorer {
    int dim = 0, window = 0, hidden = 0;
    Vocabulary vocab;
    Parameter emb;      // |V| x dim, trainable
    Dense hidden_layer;  // window*dim -> hidden, hard-tanh
    Dense cw_head;       // hidden -> 1
    Dense s_head;        // hidden -> 2

    void init(const Vocabulary& v, const JointConfig& config, Rng& rng);
    std::vector<Parameter*> parameters();
    void zero_grads();

    double f_cw(std::span<const int> window_ids) const;
    double f_s1(std::span<const int> window_ids) const;
};

// Replaces the center token by a uniformly drawn *different* vocabulary id.
// Errors when the vocabulary has a single word (no different id exists).
std::vector<int> corrupt_window(std::span<const int> window_ids, size_t vocab_size, Rng& rng);

struct JointLosses {
    double cw = 0.0;        // max(0, 1 - f_cw(t) + f_cw(t_r))
    double s = 0.0;         // max(0, 1 - d*f_s1(t) + d*f_s1(t_r))
    double combined = 0.0;  // alpha*cw + (1-alpha)*s
};

// Pure arithmetic of the two hinges and their combination.
JointLosses joint_losses_from_scores(double fcw_t, double fcw_r, double fs1_t, double fs1_r,
                                     int polarity, double alpha);

JointLosses joint_losses(const JointScorer& scorer, std::span<const int> t,
                         std::span<const int> t_r, int polarity, double alpha);

// Computes the losses and accumulates d(loss_combined)/d(parameter) into the
// scorer's gradient fields (embedding rows included).
JointLosses joint_backward(JointScorer& scorer, std::span<const int> t, std::span<const int> t_r,
                           int polarity, double alpha);

// Per-window stochastic gradient training of the combined loss.
class JointTrainer {
public:
    JointTrainer(const std::vector<DistantExample>& corpus, const JointConfig& config);

    void train();

    // Mean combined loss over a fixed probe batch of (window, corruption,
    // polarity) triples drawn at construction.
    double probe_loss() const;

    // Fraction of training windows whose sentiment hinge ranks the true
    // window above a (seeded) corruption: polarity*(f_s1(t) - f_s1(t_r)) > 0.
    double hinge_accuracy() const;

    EmbeddingMatrix embeddings() const;
    const JointScorer& scorer() const { return scorer_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Window {
        std::vector<int> ids;
        int polarity = 0;
    };

    JointConfig config_;
    JointScorer scorer_;
    std::vector<Window> windows_;
    std::vector<Window> probe_windows_;
    std::vector<std::vector<int>> probe_corruptions_;
    std::vector<std::string> warnings_;
    Rng rng_;
};

EmbeddingMatrix train_joint(const std::vector<DistantExample>& corpus, const JointConfig& config);

}  // namespace senti
