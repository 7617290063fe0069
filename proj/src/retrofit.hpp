#pragma once

#include <string>
#include <utility>
#include <vector>

#include "embeddings.hpp"

namespace senti {

// Undirected word graph over a vocabulary, stored as symmetric adjacency
// lists indexed by vocabulary id. No self-loops; each adjacency list is
// sorted ascending and duplicate-free.
struct LexiconGraph {
    std::vector<std::vector<int>> adjacency;
    size_t num_edges = 0;  // undirected edges, each counted once

    size_t num_vertices() const { return adjacency.size(); }
    int degree(int i) const { return static_cast<int>(adjacency[i].size()); }
    void validate() const;
};

// Builds a graph from (word, word) pairs, keeping only pairs where both
// words are in `vocab`; self-loops dropped, duplicates merged.
LexiconGraph lexicon_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                const Vocabulary& vocab);

// Same, from vocabulary-id pairs (handy for generated graphs).
LexiconGraph lexicon_from_id_pairs(const std::vector<std::pair<int, int>>& pairs,
                                   size_t num_vertices);

// Reads one edge per line, `word1<TAB>word2` (single space also accepted).
// Lines that do not contain exactly two fields are errors naming the line.
LexiconGraph load_lexicon(const std::string& path, const Vocabulary& vocab);

struct RetrofitConfig {
    int iterations = 10;
    double alpha = 1.0;  // attachment strength toward the original vectors

    // Edge weight rule. `inverse_degree` uses the mean of the two endpoint
    // inverse degrees, which keeps the weight symmetric in (i, j); symmetry
    // is what makes the coordinate update below an exact minimizer of the
    // shared objective, giving a monotone descent guarantee.
    enum class BetaRule { inverse_degree, constant };
    BetaRule beta_rule = BetaRule::inverse_degree;
    double beta_constant = 1.0;  // used when beta_rule == constant

    void validate() const;
};

// Weight of edge (i, j); symmetric. Both endpoints must have degree >= 1.
double edge_beta(const LexiconGraph& graph, const RetrofitConfig& config, int i, int j);

// Psi(Q) = sum_i [ alpha_i ||q_i - qhat_i||^2 + sum_{(i,j) in E} beta_ij ||q_i - q_j||^2 ]
// with each undirected edge counted once. Always >= 0.
double retrofit_objective(const EmbeddingMatrix& q, const EmbeddingMatrix& q_hat,
                          const LexiconGraph& graph, const RetrofitConfig& config);

// Runs `iterations` Gauss-Seidel sweeps (ascending vertex index) of
//   q_i <- (alpha_i qhat_i + sum_j beta_ij q_j) / (alpha_i + sum_j beta_ij),
// starting from Q = Qhat. Isolated vertices are returned bitwise unchanged;
// the objective is non-increasing per sweep.
EmbeddingMatrix retrofit_embeddings(const EmbeddingMatrix& matrix, const LexiconGraph& graph,
                                    const RetrofitConfig& config);

}  // namespace senti
