#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "embeddings.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "support.hpp"

using namespace senti;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

template <typename F>
std::string error_message(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// Two word families that co-occur only within themselves, so skip-gram must
// place family members closer than cross-family pairs.
std::vector<std::vector<std::string>> two_topic_corpus() {
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 300; ++i) {
        corpus.push_back({"cat", "dog", "purrs"});
        corpus.push_back({"rock", "pebble", "sits"});
    }
    return corpus;
}

SkipgramConfig small_config(uint64_t seed = 11) {
    SkipgramConfig cfg;
    cfg.dim = 16;
    cfg.iterations = 5;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("splitmix64-seeded rng is deterministic and bounded") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const uint64_t x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_diff = any_diff || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);

    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const double d = r.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        CHECK(r.next_below(13) < 13);
        const double u = r.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
    }
}

TEST_CASE("fnv1a64 matches the published reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("lookup returns stored rows in-vocab and seeded vectors OOV") {
    EmbeddingMatrix m;
    m.vocab = build_vocabulary({{"alpha", "beta"}}, 1);
    m.dim = 3;
    m.data = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    m.validate();

    SUBCASE("in-vocabulary word returns its row exactly") {
        const auto row = m.lookup(m.vocab.words[0]);
        CHECK(row == std::vector<double>{1.0, 2.0, 3.0});
    }
    SUBCASE("OOV lookups are deterministic and leave the matrix untouched") {
        const auto before = m.data;
        const auto v1 = m.lookup("missing");
        const auto v2 = m.lookup("missing");
        CHECK(v1 == v2);
        CHECK(v1.size() == 3);
        CHECK(m.data == before);
        // A different word gets a different vector.
        CHECK(m.lookup("othermissing") != v1);
        // A different oov_seed changes the vector.
        EmbeddingMatrix m2 = m;
        m2.oov_seed ^= 0xdeadbeefULL;
        CHECK(m2.lookup("missing") != v1);
    }
    SUBCASE("OOV coordinates are uniform in [-0.25, 0.25]") {
        double sum = 0.0;
        int n = 0;
        for (int w = 0; w < 500; ++w) {
            const auto v = oov_vector(m.oov_seed, "oov" + std::to_string(w), 20);
            for (double x : v) {
                CHECK(x >= -0.25);
                CHECK(x <= 0.25);
                sum += x;
                ++n;
            }
        }
        CHECK(n == 10000);
        CHECK(std::abs(sum / n) < 0.01);
    }
}

TEST_CASE("cosine similarity basics") {
    const std::vector<double> x = {1.0, 0.0};
    const std::vector<double> y = {0.0, 2.0};
    const std::vector<double> z = {3.0, 0.0};
    CHECK(cosine(x, y) == doctest::Approx(0.0));
    CHECK(cosine(x, z) == doctest::Approx(1.0));
    CHECK(cosine(y, y) == doctest::Approx(1.0));
}

TEST_CASE("skip-gram training separates co-occurrence families") {
    const auto corpus = two_topic_corpus();
    const auto m = train_skipgram(corpus, small_config());

    const auto cat = m.lookup("cat");
    const auto dog = m.lookup("dog");
    const auto rock = m.lookup("rock");
    CHECK(cosine(cat, dog) > cosine(cat, rock));

    for (double x : m.data) CHECK(std::isfinite(x));
    CHECK(m.dim == 16);
    CHECK(m.vocab.size() == 6);
}

TEST_CASE("skip-gram is deterministic and zero iterations is a no-op") {
    const auto corpus = two_topic_corpus();

    SUBCASE("same seed twice is bitwise identical") {
        const auto a = train_skipgram(corpus, small_config(5));
        const auto b = train_skipgram(corpus, small_config(5));
        CHECK(a.data == b.data);
        const auto c = train_skipgram(corpus, small_config(6));
        CHECK(a.data != c.data);
    }
    SUBCASE("iterations=0 equals the random initialization") {
        auto cfg = small_config(5);
        cfg.iterations = 0;
        SkipgramTrainer untouched(corpus, cfg);
        const auto init = untouched.embeddings();
        const auto trained = train_skipgram(corpus, cfg);
        CHECK(trained.data == init.data);
    }
}

TEST_CASE("skip-gram probe loss decreases over training") {
    const auto corpus = two_topic_corpus();
    SkipgramTrainer trainer(corpus, small_config(3));
    const double before = trainer.probe_loss();
    trainer.train();
    const double after = trainer.probe_loss();
    CHECK(after < before);
}

TEST_CASE("skip-gram rejects degenerate inputs") {
    CHECK_THROWS_AS((void)train_skipgram({}, small_config()), Error);
    auto cfg = small_config();
    cfg.min_count = 100;
    CHECK_THROWS_AS((void)train_skipgram({{"one", "two"}}, cfg), Error);
    cfg = small_config();
    cfg.window = 0;
    CHECK_THROWS_AS((void)train_skipgram({{"one", "two"}}, cfg), Error);
}

TEST_CASE("embedding text format parses exactly") {
    TempDir dir;
    SUBCASE("two words, three dims, no header") {
        write_file(dir.file("e.txt"), "up 1 2 3\ndown -1 -2.5 0.125\n");
        const auto m = load_embeddings(dir.file("e.txt"));
        CHECK(m.dim == 3);
        CHECK(m.vocab.size() == 2);
        CHECK(m.lookup("up") == std::vector<double>{1.0, 2.0, 3.0});
        CHECK(m.lookup("down") == std::vector<double>{-1.0, -2.5, 0.125});
    }
    SUBCASE("header line is accepted and checked") {
        write_file(dir.file("e.txt"), "2 3\nup 1 2 3\ndown 4 5 6\n");
        const auto m = load_embeddings(dir.file("e.txt"));
        CHECK(m.dim == 3);
        CHECK(m.vocab.size() == 2);
    }
    SUBCASE("inconsistent dimensionality names the line") {
        write_file(dir.file("e.txt"), "up 1 2 3\ndown 4 5\n");
        const auto msg = error_message([&] { (void)load_embeddings(dir.file("e.txt")); });
        CHECK(contains(msg, ":2"));
    }
    SUBCASE("duplicate word names the line") {
        write_file(dir.file("e.txt"), "up 1 2\nup 3 4\n");
        const auto msg = error_message([&] { (void)load_embeddings(dir.file("e.txt")); });
        CHECK(contains(msg, "duplicate"));
        CHECK(contains(msg, "up"));
    }
    SUBCASE("missing file is an error") {
        CHECK_THROWS_AS((void)load_embeddings(dir.file("absent.txt")), Error);
    }
}

TEST_CASE("save then load round-trips within 1e-6") {
    Rng rng(21);
    EmbeddingMatrix m;
    m.dim = 50;
    std::vector<std::vector<std::string>> words_corpus(1);
    for (int i = 0; i < 10; ++i) words_corpus[0].push_back("w" + std::to_string(i));
    m.vocab = build_vocabulary(words_corpus, 1);
    m.data.resize(m.vocab.size() * 50);
    for (auto& x : m.data) x = rng.uniform(-2.0, 2.0);

    TempDir dir;
    save_embeddings(m, dir.file("round.txt"));
    const auto back = load_embeddings(dir.file("round.txt"));
    REQUIRE(back.dim == m.dim);
    REQUIRE(back.vocab.size() == m.vocab.size());
    double max_diff = 0.0;
    for (const auto& w : m.vocab.words) {
        const auto a = m.lookup(w);
        const auto b = back.lookup(w);
        for (size_t k = 0; k < a.size(); ++k) max_diff = std::max(max_diff, std::abs(a[k] - b[k]));
    }
    CHECK(max_diff < 1e-6);
}

TEST_CASE("load_corpus tokenizes lines and drops empty ones") {
    TempDir dir;
    write_file(dir.file("c.txt"), "Good Movie!\n\n   \nanother line\n");
    const auto corpus = load_corpus(dir.file("c.txt"));
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0] == std::vector<std::string>{"good", "movie", "!"});
    CHECK(corpus[1] == std::vector<std::string>{"another", "line"});
    CHECK_THROWS_AS((void)load_corpus(dir.file("missing.txt")), Error);
}
