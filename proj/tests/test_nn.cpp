#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "nn.hpp"
#include "support.hpp"
#include "tensor.hpp"

using namespace senti;
using testsupport::check_gradients;

namespace {

Tensor vec(std::vector<double> v) { return Tensor::vector(std::move(v)); }

// Loss used by the gradient checks: a fixed random linear functional of the
// layer output, so the loss surface inherits exactly the layer's smoothness.
double weighted_sum(const Tensor& y, const Tensor& weights) {
    double s = 0.0;
    for (int i = 0; i < y.numel(); ++i) s += y.data[static_cast<size_t>(i)] * weights.data[static_cast<size_t>(i)];
    return s;
}

}  // namespace

TEST_CASE("tensor shape accessors and fill") {
    Tensor t({2, 3});
    CHECK(t.numel() == 6);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    t(1, 2) = 5.0;
    CHECK(t.data[5] == 5.0);
    t.fill(1.5);
    for (double x : t.data) CHECK(x == 1.5);

    Parameter p(Tensor({2, 2}));
    p.grad.fill(3.0);
    p.zero_grad();
    for (double x : p.grad.data) CHECK(x == 0.0);

    CHECK(glorot_bound(2, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("activation values and slopes") {
    CHECK(activate_value(-1.0, Activation::relu) == 0.0);
    CHECK(activate_value(2.5, Activation::relu) == 2.5);
    CHECK(activate_value(3.0, Activation::hard_tanh) == 1.0);
    CHECK(activate_value(-3.0, Activation::hard_tanh) == -1.0);
    CHECK(activate_value(0.25, Activation::hard_tanh) == 0.25);
    CHECK(activate_value(0.0, Activation::sigmoid) == doctest::Approx(0.5));
    CHECK(activate_value(1.0, Activation::tanh_fn) == doctest::Approx(std::tanh(1.0)));
    CHECK(activate_value(0.7, Activation::identity) == 0.7);

    // Slopes at representative points.
    CHECK(activate_slope(2.0, 2.0, Activation::relu) == 1.0);
    CHECK(activate_slope(-2.0, 0.0, Activation::relu) == 0.0);
    CHECK(activate_slope(0.5, 0.5, Activation::hard_tanh) == 1.0);
    CHECK(activate_slope(2.0, 1.0, Activation::hard_tanh) == 0.0);
    const double y = std::tanh(0.3);
    CHECK(activate_slope(0.3, y, Activation::tanh_fn) == doctest::Approx(1.0 - y * y));
}

TEST_CASE("dense forward matches hand computations") {
    Rng rng(1);
    Dense layer;
    layer.init(2, 2, Activation::identity, rng);

    SUBCASE("identity weights pass the input through") {
        layer.W.value.data = {1.0, 0.0, 0.0, 1.0};
        layer.b.value.data = {0.0, 0.0};
        DenseCache cache;
        const auto y = dense_forward(layer, vec({3.0, -4.0}), cache);
        CHECK(y.data == std::vector<double>{3.0, -4.0});
    }
    SUBCASE("1x1 case: y = 2*3 + 1 = 7") {
        Dense one;
        one.init(1, 1, Activation::identity, rng);
        one.W.value.data = {2.0};
        one.b.value.data = {1.0};
        DenseCache cache;
        const auto y = dense_forward(one, vec({3.0}), cache);
        CHECK(y.data == std::vector<double>{7.0});
    }
    SUBCASE("explicit 2x2 with bias") {
        layer.W.value.data = {1.0, 2.0, 3.0, 4.0};
        layer.b.value.data = {0.5, -0.5};
        DenseCache cache;
        const auto y = dense_forward(layer, vec({1.0, 1.0}), cache);
        CHECK(y.data[0] == doctest::Approx(3.5));
        CHECK(y.data[1] == doctest::Approx(6.5));
    }
    SUBCASE("shape mismatch is an error") {
        DenseCache cache;
        CHECK_THROWS_AS((void)dense_forward(layer, vec({1.0, 2.0, 3.0}), cache), Error);
    }
}

TEST_CASE("dense gradients match finite differences across activations") {
    Rng rng(7);
    const Activation acts[] = {Activation::identity, Activation::relu, Activation::tanh_fn,
                               Activation::hard_tanh, Activation::sigmoid};
    int instances = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const int out_dim = 1 + static_cast<int>(rng.next_below(4));
        const int in_dim = 1 + static_cast<int>(rng.next_below(5));
        Dense layer;
        layer.init(out_dim, in_dim, acts[trial % 5], rng);
        Parameter x(Tensor::uniform({in_dim}, rng, -1.0, 1.0));
        const Tensor cw = Tensor::uniform({out_dim}, rng, -1.0, 1.0);

        auto loss = [&](bool with_grad) {
            if (with_grad) {
                layer.W.zero_grad();
                layer.b.zero_grad();
                x.zero_grad();
            }
            DenseCache cache;
            const Tensor y = dense_forward(layer, x.value, cache);
            if (with_grad) x.grad = dense_backward(layer, cache, cw);
            return weighted_sum(y, cw);
        };
        const auto res = check_gradients({&layer.W, &layer.b, &x}, loss);
        CHECK(res.max_rel_err < 1e-4);
        CHECK(res.compared > 0);
        ++instances;
    }
    CHECK(instances == 25);
}

TEST_CASE("softmax is stable and sums to one") {
    SUBCASE("zero logits give the uniform distribution, loss ln C") {
        const auto sx = softmax_xent(vec({0.0, 0.0, 0.0, 0.0}), 2);
        for (double p : sx.probs.data) CHECK(p == doctest::Approx(0.25));
        CHECK(sx.loss == doctest::Approx(std::log(4.0)));
    }
    SUBCASE("huge logits do not overflow") {
        const auto sx = softmax_xent(vec({1000.0, 0.0}), 0);
        CHECK(sx.probs.data[0] == doctest::Approx(1.0));
        CHECK(sx.probs.data[1] == doctest::Approx(0.0));
        CHECK(std::isfinite(sx.loss));
        CHECK(sx.loss == doctest::Approx(0.0));
    }
    SUBCASE("probabilities sum to 1") {
        Rng rng(5);
        for (int t = 0; t < 50; ++t) {
            const Tensor logits = Tensor::uniform({5}, rng, -10.0, 10.0);
            const Tensor p = softmax(logits);
            double sum = 0.0;
            for (double v : p.data) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("softmax is permutation-equivariant in the logits") {
        const Tensor p = softmax(vec({0.3, -1.2, 2.0}));
        const Tensor q = softmax(vec({2.0, 0.3, -1.2}));
        CHECK(p.data[0] == doctest::Approx(q.data[1]));
        CHECK(p.data[1] == doctest::Approx(q.data[2]));
        CHECK(p.data[2] == doctest::Approx(q.data[0]));
    }
    SUBCASE("gold out of range is an error") {
        CHECK_THROWS_AS((void)softmax_xent(vec({0.0, 0.0}), 2), Error);
        CHECK_THROWS_AS((void)softmax_xent(vec({0.0, 0.0}), -1), Error);
    }
}

TEST_CASE("softmax cross-entropy gradient matches finite differences") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int classes = 2 + static_cast<int>(rng.next_below(4));
        const int gold = static_cast<int>(rng.next_below(static_cast<uint64_t>(classes)));
        Parameter logits(Tensor::uniform({classes}, rng, -2.0, 2.0));

        auto loss = [&](bool with_grad) {
            const auto sx = softmax_xent(logits.value, gold);
            if (with_grad) logits.grad = softmax_xent_backward(sx.probs, gold);
            return sx.loss;
        };
        const auto res = check_gradients({&logits}, loss);
        CHECK(res.max_rel_err < 1e-4);
        CHECK(res.skipped == 0);  // smooth everywhere
    }
}

TEST_CASE("inverted dropout") {
    Rng rng(13);
    const Tensor x = Tensor::uniform({64}, rng, -1.0, 1.0);
    Tensor mask;

    SUBCASE("inference mode is the identity") {
        const Tensor y = dropout_forward(x, 0.5, /*training=*/false, rng, mask);
        CHECK(y.data == x.data);
    }
    SUBCASE("p = 0 is the identity in training mode too") {
        const Tensor y = dropout_forward(x, 0.0, /*training=*/true, rng, mask);
        CHECK(y.data == x.data);
    }
    SUBCASE("mask entries are 0 or 1/(1-p) and survivors are scaled") {
        const double p = 0.25;
        const Tensor y = dropout_forward(x, p, /*training=*/true, rng, mask);
        REQUIRE(mask.numel() == x.numel());
        for (int i = 0; i < x.numel(); ++i) {
            const double m = mask.data[static_cast<size_t>(i)];
            CHECK((m == 0.0 || m == doctest::Approx(1.0 / (1.0 - p))));
            CHECK(y.data[static_cast<size_t>(i)] ==
                  doctest::Approx(x.data[static_cast<size_t>(i)] * m));
        }
    }
    SUBCASE("training mean is preserved within 2 percent") {
        Tensor ones({100000});
        ones.fill(1.0);
        const Tensor y = dropout_forward(ones, 0.5, /*training=*/true, rng, mask);
        double mean = 0.0;
        for (double v : y.data) mean += v;
        mean /= static_cast<double>(y.numel());
        CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("backward routes gradients through the mask") {
        const Tensor y = dropout_forward(x, 0.5, /*training=*/true, rng, mask);
        Tensor dy({64});
        dy.fill(1.0);
        const Tensor dx = dropout_backward(dy, mask);
        for (int i = 0; i < 64; ++i)
            CHECK(dx.data[static_cast<size_t>(i)] == mask.data[static_cast<size_t>(i)]);
    }
    SUBCASE("invalid p is an error") {
        CHECK_THROWS_AS((void)dropout_forward(x, 1.0, true, rng, mask), Error);
        CHECK_THROWS_AS((void)dropout_forward(x, -0.1, true, rng, mask), Error);
    }
}

TEST_CASE("adam first step moves by about the learning rate") {
    Parameter theta(vec({0.0}));
    Adam adam;
    adam.learning_rate = 0.01;
    adam.attach({&theta});
    theta.grad.data = {3.7};
    adam.step();
    CHECK(std::abs(theta.value.data[0] + adam.learning_rate) < 1e-8);

    SUBCASE("zero gradient leaves the parameter unchanged") {
        Parameter frozen(vec({1.25}));
        Adam a2;
        a2.attach({&frozen});
        frozen.grad.data = {0.0};
        a2.step();
        CHECK(frozen.value.data[0] == 1.25);
    }
}

TEST_CASE("adam hand-traced trajectory with simplified coefficients") {
    // With beta1 = beta2 = 0.5, eps = 0, lr = 1 and a constant gradient 2,
    // the bias-corrected moments give mhat = 2, vhat = 4 at every step, so
    // each update is exactly -1.
    Parameter theta(vec({0.0}));
    Adam adam;
    adam.learning_rate = 1.0;
    adam.beta1 = 0.5;
    adam.beta2 = 0.5;
    adam.eps = 0.0;
    adam.attach({&theta});

    theta.grad.data = {2.0};
    adam.step();
    CHECK(theta.value.data[0] == -1.0);
    theta.grad.data = {2.0};
    adam.step();
    CHECK(theta.value.data[0] == -2.0);
    theta.grad.data = {2.0};
    adam.step();
    CHECK(theta.value.data[0] == -3.0);
    CHECK(adam.steps == 3);
}

TEST_CASE("adam respects the trainable flag and is deterministic") {
    SUBCASE("non-trainable parameters are skipped") {
        Parameter theta(vec({5.0}));
        theta.trainable = false;
        Adam adam;
        adam.attach({&theta});
        theta.grad.data = {1.0};
        adam.step();
        CHECK(theta.value.data[0] == 5.0);
    }
    SUBCASE("identical runs produce identical trajectories") {
        auto run = [] {
            Rng rng(3);
            Parameter theta(Tensor::uniform({8}, rng, -1.0, 1.0));
            Adam adam;
            adam.attach({&theta});
            for (int step = 0; step < 5; ++step) {
                for (int i = 0; i < 8; ++i)
                    theta.grad.data[static_cast<size_t>(i)] =
                        std::sin(0.1 * (step + 1) * (i + 1));
                adam.step();
            }
            return theta.value.data;
        };
        CHECK(run() == run());
    }
}

TEST_CASE("forward and backward stay finite on bounded inputs") {
    Rng rng(17);
    Dense layer;
    layer.init(4, 6, Activation::tanh_fn, rng);
    for (int t = 0; t < 20; ++t) {
        const Tensor x = Tensor::uniform({6}, rng, -10.0, 10.0);
        DenseCache cache;
        const Tensor y = dense_forward(layer, x, cache);
        y.check_finite("dense output");
        Tensor dy({4});
        dy.fill(1.0);
        const Tensor dx = dense_backward(layer, cache, dy);
        dx.check_finite("dense input gradient");
        layer.W.grad.check_finite("dense weight gradient");
    }
}
