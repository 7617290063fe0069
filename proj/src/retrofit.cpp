#include "retrofit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace senti {

void LexiconGraph::validate() const {
    size_t directed = 0;
    for (size_t i = 0; i < adjacency.size(); ++i) {
        const auto& nbrs = adjacency[i];
        require(std::is_sorted(nbrs.begin(), nbrs.end()), "adjacency list not sorted");
        require(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end(),
                "duplicate edge in adjacency list");
        for (int j : nbrs) {
            require(j >= 0 && j < static_cast<int>(adjacency.size()),
                    "adjacency index out of range");
            require(j != static_cast<int>(i), "self-loop in lexicon graph");
            const auto& back = adjacency[j];
            require(std::binary_search(back.begin(), back.end(), static_cast<int>(i)),
                    "asymmetric adjacency in lexicon graph");
        }
        directed += nbrs.size();
    }
    require(directed % 2 == 0, "odd directed-edge count");
    require(directed / 2 == num_edges, "edge count mismatch");
}

LexiconGraph lexicon_from_id_pairs(const std::vector<std::pair<int, int>>& pairs,
                                   size_t num_vertices) {
    LexiconGraph g;
    g.adjacency.resize(num_vertices);
    for (const auto& [a, b] : pairs) {
        require(a >= 0 && a < static_cast<int>(num_vertices) && b >= 0 &&
                    b < static_cast<int>(num_vertices),
                "lexicon vertex id out of range");
        if (a == b) continue;
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    }
    for (auto& nbrs : g.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        g.num_edges += nbrs.size();
    }
    g.num_edges /= 2;
    return g;
}

LexiconGraph lexicon_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                const Vocabulary& vocab) {
    std::vector<std::pair<int, int>> id_pairs;
    id_pairs.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const int ia = vocab.id(a);
        const int ib = vocab.id(b);
        if (ia < 0 || ib < 0) continue;  // restrict to the vocabulary
        id_pairs.emplace_back(ia, ib);
    }
    return lexicon_from_id_pairs(id_pairs, vocab.size());
}

LexiconGraph load_lexicon(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open lexicon file " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a >> b) || (ss >> extra)) {
            fail(path + ":" + std::to_string(lineno) +
                 ": expected exactly two whitespace-separated words");
        }
        pairs.emplace_back(std::move(a), std::move(b));
    }
    return lexicon_from_pairs(pairs, vocab);
}

void RetrofitConfig::validate() const {
    require(iterations >= 0, "retrofit iterations must be >= 0");
    require(alpha > 0.0, "retrofit alpha must be positive");
    if (beta_rule == BetaRule::constant) {
        require(beta_constant > 0.0, "retrofit beta must be positive");
    }
}

double edge_beta(const LexiconGraph& graph, const RetrofitConfig& config, int i, int j) {
    if (config.beta_rule == RetrofitConfig::BetaRule::constant) return config.beta_constant;
    return 0.5 * (1.0 / graph.degree(i) + 1.0 / graph.degree(j));
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

}  // namespace

double retrofit_objective(const EmbeddingMatrix& q, const EmbeddingMatrix& q_hat,
                          const LexiconGraph& graph, const RetrofitConfig& config) {
    config.validate();
    require(q.dim == q_hat.dim && q.vocab.size() == q_hat.vocab.size(),
            "retrofit objective: matrix shapes differ");
    require(graph.num_vertices() == q.vocab.size(),
            "retrofit objective: graph size does not match vocabulary");
    double psi = 0.0;
    for (int i = 0; i < static_cast<int>(q.vocab.size()); ++i) {
        psi += config.alpha * sq_dist(q.row(i), q_hat.row(i));
        for (int j : graph.adjacency[i]) {
            if (j <= i) continue;  // each undirected edge contributes once
            psi += edge_beta(graph, config, i, j) * sq_dist(q.row(i), q.row(j));
        }
    }
    return psi;
}

EmbeddingMatrix retrofit_embeddings(const EmbeddingMatrix& matrix, const LexiconGraph& graph,
                                    const RetrofitConfig& config) {
    config.validate();
    matrix.validate();
    require(graph.num_vertices() == matrix.vocab.size(),
            "retrofit: graph size does not match vocabulary");
    EmbeddingMatrix q = matrix;  // Q starts at Qhat
    const int n = static_cast<int>(matrix.vocab.size());
    const int d = matrix.dim;
    std::vector<double> numer(d);
    for (int sweep = 0; sweep < config.iterations; ++sweep) {
        for (int i = 0; i < n; ++i) {
            const auto& nbrs = graph.adjacency[i];
            if (nbrs.empty()) continue;  // isolated words stay bitwise unchanged
            const auto q_hat_i = matrix.row(i);
            for (int k = 0; k < d; ++k) numer[k] = config.alpha * q_hat_i[k];
            double denom = config.alpha;
            for (int j : nbrs) {
                const double b = edge_beta(graph, config, i, j);
                denom += b;
                const auto q_j = q.row(j);
                for (int k = 0; k < d; ++k) numer[k] += b * q_j[k];
            }
            auto q_i = q.row(i);
            for (int k = 0; k < d; ++k) q_i[k] = numer[k] / denom;
        }
    }
    return q;
}

}  // namespace senti
