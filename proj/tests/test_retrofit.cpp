#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "retrofit.hpp"
#include "rng.hpp"
#include "support.hpp"

using namespace senti;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

// Hand-assembled vocabulary of n words "w0".."w<n-1>" with ids in order.
Vocabulary indexed_vocab(int n) {
    Vocabulary v;
    for (int i = 0; i < n; ++i) {
        const std::string w = "w" + std::to_string(i);
        v.index.emplace(w, i);
        v.words.push_back(w);
        v.counts.push_back(1);
    }
    return v;
}

EmbeddingMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    EmbeddingMatrix m;
    m.vocab = indexed_vocab(static_cast<int>(rows.size()));
    m.dim = static_cast<int>(rows.front().size());
    for (const auto& r : rows) m.data.insert(m.data.end(), r.begin(), r.end());
    return m;
}

// Independent brute-force reference: literal Gauss-Seidel sweeps in the
// naive formulation, no shortcuts shared with the implementation.
EmbeddingMatrix brute_retrofit(const EmbeddingMatrix& input, const LexiconGraph& graph,
                               const RetrofitConfig& config) {
    EmbeddingMatrix q = input;
    const int d = q.dim;
    for (int sweep = 0; sweep < config.iterations; ++sweep) {
        for (size_t i = 0; i < graph.num_vertices(); ++i) {
            if (graph.adjacency[i].empty()) continue;
            std::vector<double> numer(input.row(static_cast<int>(i)).begin(),
                                      input.row(static_cast<int>(i)).end());
            for (auto& x : numer) x *= config.alpha;
            double denom = config.alpha;
            for (int j : graph.adjacency[i]) {
                const double beta = edge_beta(graph, config, static_cast<int>(i), j);
                for (int k = 0; k < d; ++k) numer[static_cast<size_t>(k)] += beta * q.row(j)[k];
                denom += beta;
            }
            for (int k = 0; k < d; ++k) q.row(static_cast<int>(i))[k] = numer[static_cast<size_t>(k)] / denom;
        }
    }
    return q;
}

RetrofitConfig constant_beta(int iterations) {
    RetrofitConfig c;
    c.iterations = iterations;
    c.beta_rule = RetrofitConfig::BetaRule::constant;
    c.beta_constant = 1.0;
    return c;
}

LexiconGraph random_graph(int n, Rng& rng) {
    std::vector<std::pair<int, int>> pairs;
    const int edges = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(2 * n)));
    for (int e = 0; e < edges; ++e) {
        const int a = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        const int b = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        if (a != b) pairs.emplace_back(a, b);
    }
    return lexicon_from_id_pairs(pairs, static_cast<size_t>(n));
}

EmbeddingMatrix random_matrix(int n, int dim, Rng& rng) {
    std::vector<std::vector<double>> rows(static_cast<size_t>(n));
    for (auto& r : rows) {
        r.resize(static_cast<size_t>(dim));
        for (auto& x : r) x = rng.uniform(-1.0, 1.0);
    }
    return matrix_from_rows(rows);
}

}  // namespace

TEST_CASE("lexicon construction dedups, symmetrizes, and restricts to vocab") {
    Vocabulary vocab = build_vocabulary({{"a", "b"}}, 1);

    SUBCASE("duplicate direction and self-loop collapse to one edge") {
        const auto g = lexicon_from_pairs({{"a", "b"}, {"b", "a"}, {"a", "a"}}, vocab);
        CHECK(g.num_edges == 1);
        CHECK(g.degree(vocab.id("a")) == 1);
        CHECK(g.degree(vocab.id("b")) == 1);
        g.validate();
    }
    SUBCASE("pair with an OOV word is dropped") {
        const auto g = lexicon_from_pairs({{"a", "zzz"}}, vocab);
        CHECK(g.num_edges == 0);
    }
}

TEST_CASE("load_lexicon parses edge lines and reports bad ones") {
    Vocabulary vocab = build_vocabulary({{"a", "b", "c"}}, 1);
    TempDir dir;

    SUBCASE("tab and space separators both accepted") {
        write_file(dir.file("lex.txt"), "a\tb\nb c\n");
        const auto g = load_lexicon(dir.file("lex.txt"), vocab);
        CHECK(g.num_edges == 2);
    }
    SUBCASE("empty file gives an empty edge set") {
        write_file(dir.file("lex.txt"), "");
        const auto g = load_lexicon(dir.file("lex.txt"), vocab);
        CHECK(g.num_edges == 0);
        CHECK(g.num_vertices() == vocab.size());
    }
    SUBCASE("line without two fields names the line") {
        write_file(dir.file("lex.txt"), "a b\nlonely\n");
        try {
            (void)load_lexicon(dir.file("lex.txt"), vocab);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
}

TEST_CASE("retrofit objective matches hand computation") {
    // Two 1-d nodes joined by one edge, alpha = beta = 1.
    const auto q_hat = matrix_from_rows({{0.0}, {3.0}});
    const auto graph = lexicon_from_id_pairs({{0, 1}}, 2);
    const auto config = constant_beta(10);

    SUBCASE("at Q = Qhat the attachment term vanishes: psi = (0-3)^2 = 9") {
        CHECK(retrofit_objective(q_hat, q_hat, graph, config) == doctest::Approx(9.0));
    }
    SUBCASE("constant Q across vertices with Q = Qhat gives zero") {
        const auto flat = matrix_from_rows({{1.5}, {1.5}});
        CHECK(retrofit_objective(flat, flat, graph, config) == doctest::Approx(0.0));
    }
    SUBCASE("edge term is linear in beta") {
        auto doubled = config;
        doubled.beta_constant = 2.0;
        const auto q = matrix_from_rows({{1.0}, {2.0}});
        const double base = retrofit_objective(q, q_hat, graph, config);
        const double twice = retrofit_objective(q, q_hat, graph, doubled);
        // Attachment part: (1-0)^2 + (2-3)^2 = 2; edge part: (1-2)^2 = 1.
        CHECK(base == doctest::Approx(3.0));
        CHECK(twice == doctest::Approx(4.0));
    }
}

TEST_CASE("two-node chain converges to the analytic fixed point (1, 2)") {
    // qhat = (0, 3), alpha = beta = 1. The Gauss-Seidel iterates are exact
    // dyadic rationals: after sweep k, q0 = 1 + 2*4^-k and q1 = 2 + 4^-k.
    const auto q_hat = matrix_from_rows({{0.0}, {3.0}});
    const auto graph = lexicon_from_id_pairs({{0, 1}}, 2);

    SUBCASE("per-sweep iterates are bitwise exact") {
        for (int k : {1, 2, 3, 10}) {
            const auto q = retrofit_embeddings(q_hat, graph, constant_beta(k));
            CHECK(q.row(0)[0] == 1.0 + 2.0 * std::pow(4.0, -k));
            CHECK(q.row(1)[0] == 2.0 + std::pow(4.0, -k));
        }
    }
    SUBCASE("ten sweeps land within 1e-6 squared distance of (1, 2)") {
        const auto q = retrofit_embeddings(q_hat, graph, constant_beta(10));
        const double e0 = q.row(0)[0] - 1.0;
        const double e1 = q.row(1)[0] - 2.0;
        CHECK(e0 * e0 + e1 * e1 < 1e-6);
        // Largest per-coordinate gap after ten sweeps is exactly 2*4^-10.
        CHECK(std::max(std::abs(e0), std::abs(e1)) == 0x1p-19);
    }
    SUBCASE("the symmetric inverse-degree default gives the same weights here") {
        // Both endpoints have degree 1, so mean inverse degree is also 1.
        RetrofitConfig def;
        def.iterations = 10;
        const auto q_def = retrofit_embeddings(q_hat, graph, def);
        const auto q_const = retrofit_embeddings(q_hat, graph, constant_beta(10));
        CHECK(q_def.data == q_const.data);
    }
}

TEST_CASE("retrofit identities: no edges, zero iterations") {
    Rng rng(17);
    const auto m = random_matrix(8, 5, rng);

    SUBCASE("empty edge set returns the input bitwise") {
        const auto g = lexicon_from_id_pairs({}, 8);
        const auto out = retrofit_embeddings(m, g, constant_beta(10));
        CHECK(out.data == m.data);
    }
    SUBCASE("iterations = 0 returns the input bitwise") {
        const auto g = lexicon_from_id_pairs({{0, 1}, {2, 3}}, 8);
        const auto out = retrofit_embeddings(m, g, constant_beta(0));
        CHECK(out.data == m.data);
    }
    SUBCASE("isolated vertices are bitwise unchanged") {
        const auto g = lexicon_from_id_pairs({{0, 1}}, 8);
        const auto out = retrofit_embeddings(m, g, constant_beta(10));
        for (int i = 2; i < 8; ++i) {
            const auto a = m.row(i);
            const auto b = out.row(i);
            CHECK(std::equal(a.begin(), a.end(), b.begin()));
        }
    }
}

TEST_CASE("retrofit matches the brute-force sweep oracle bitwise") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(10));
        const auto m = random_matrix(n, 4, rng);
        const auto g = random_graph(n, rng);
        for (auto rule : {RetrofitConfig::BetaRule::constant,
                          RetrofitConfig::BetaRule::inverse_degree}) {
            RetrofitConfig cfg;
            cfg.iterations = 3;
            cfg.alpha = 0.7;
            cfg.beta_rule = rule;
            cfg.beta_constant = 0.4;
            const auto ours = retrofit_embeddings(m, g, cfg);
            const auto ref = brute_retrofit(m, g, cfg);
            REQUIRE(ours.data.size() == ref.data.size());
            for (size_t k = 0; k < ours.data.size(); ++k) CHECK(ours.data[k] == ref.data[k]);
        }
    }
}

TEST_CASE("objective is non-increasing per sweep on random graphs") {
    // Running k sweeps from the same start equals extending a (k-1)-sweep
    // run by one sweep, so Psi over increasing iteration counts traces the
    // per-sweep trajectory.
    Rng rng(31);
    int graphs_checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(49));  // up to 50 nodes
        const auto m = random_matrix(n, 3, rng);
        const auto g = random_graph(n, rng);
        for (auto rule :
             {RetrofitConfig::BetaRule::constant, RetrofitConfig::BetaRule::inverse_degree}) {
            RetrofitConfig cfg;
            cfg.alpha = 0.5 + rng.next_double();
            cfg.beta_rule = rule;
            double prev = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 6; ++k) {
                cfg.iterations = k;
                const auto q = retrofit_embeddings(m, g, cfg);
                const double psi = retrofit_objective(q, m, g, cfg);
                CHECK(psi <= prev + 1e-12);
                prev = psi;
            }
        }
        ++graphs_checked;
    }
    CHECK(graphs_checked == 30);
}

TEST_CASE("updated coordinates stay inside the original coordinate range") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(20));
        const auto m = random_matrix(n, 3, rng);
        const auto g = random_graph(n, rng);
        const auto out = retrofit_embeddings(m, g, constant_beta(10));
        for (int k = 0; k < m.dim; ++k) {
            double lo = m.data[static_cast<size_t>(k)], hi = lo;
            for (int i = 0; i < n; ++i) {
                lo = std::min(lo, m.row(i)[k]);
                hi = std::max(hi, m.row(i)[k]);
            }
            for (int i = 0; i < n; ++i) {
                CHECK(out.row(i)[k] >= lo - 1e-12);
                CHECK(out.row(i)[k] <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("retrofit is equivariant under vertex relabeling at convergence") {
    // Reverse-order relabeling: vertex i of the original becomes n-1-i.
    // Individual Gauss-Seidel sweeps depend on update order, so equivariance
    // is asserted at the (unique, order-independent) fixed point: 200 sweeps
    // converge both runs to machine precision.
    const int n = 6;
    Rng rng(53);
    const auto m = random_matrix(n, 3, rng);
    const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 5}, {3, 4}};
    const auto g = lexicon_from_id_pairs(edges, n);

    std::vector<std::vector<double>> permuted_rows(n);
    std::vector<std::pair<int, int>> permuted_edges;
    for (int i = 0; i < n; ++i)
        permuted_rows[static_cast<size_t>(n - 1 - i)] = {m.row(i)[0], m.row(i)[1], m.row(i)[2]};
    for (auto [a, b] : edges) permuted_edges.emplace_back(n - 1 - a, n - 1 - b);
    const auto m_perm = matrix_from_rows(permuted_rows);
    const auto g_perm = lexicon_from_id_pairs(permuted_edges, n);

    const auto out = retrofit_embeddings(m, g, constant_beta(200));
    const auto out_perm = retrofit_embeddings(m_perm, g_perm, constant_beta(200));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(out.row(i)[k] ==
                  doctest::Approx(out_perm.row(n - 1 - i)[k]).epsilon(1e-10));
}

TEST_CASE("edge_beta rules") {
    // Path a-b-c: degree(b) = 2, others 1.
    const auto g = lexicon_from_id_pairs({{0, 1}, {1, 2}}, 3);
    RetrofitConfig cfg;

    cfg.beta_rule = RetrofitConfig::BetaRule::inverse_degree;
    CHECK(edge_beta(g, cfg, 0, 1) == doctest::Approx(0.75));  // (1/1 + 1/2) / 2
    CHECK(edge_beta(g, cfg, 1, 0) == doctest::Approx(0.75));  // symmetric

    cfg.beta_rule = RetrofitConfig::BetaRule::constant;
    cfg.beta_constant = 0.3;
    CHECK(edge_beta(g, cfg, 0, 1) == doctest::Approx(0.3));
}

TEST_CASE("retrofit config validation") {
    RetrofitConfig cfg;
    cfg.iterations = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
