#pragma once

#include <utility>
#include <vector>

#include "tensor.hpp"

namespace senti {

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class Activation { identity, relu, tanh_fn, hard_tanh, sigmoid };

double activate_value(double x, Activation act);
// Derivative dy/dx given pre-activation x and output y = activate_value(x).
double activate_slope(double x, double y, Activation act);

Tensor activate(const Tensor& x, Activation act);

// ---------------------------------------------------------------------------
// Dense layer: y = act(W x + b) on a single vector
// ---------------------------------------------------------------------------

struct Dense {
    Parameter W;  // [out x in]
    Parameter b;  // [out]
    Activation act = Activation::identity;

    void init(int out_dim, int in_dim, Activation a, Rng& rng);
    int in_dim() const { return W.value.cols(); }
    int out_dim() const { return W.value.rows(); }
    std::vector<Parameter*> parameters() { return {&W, &b}; }
};

struct DenseCache {
    Tensor x;    // input
    Tensor pre;  // W x + b
    Tensor out;  // act(pre)
};

Tensor dense_forward(const Dense& layer, const Tensor& x, DenseCache& cache);
// Accumulates into layer gradients; returns dL/dx.
Tensor dense_backward(Dense& layer, const DenseCache& cache, const Tensor& dout);

// ---------------------------------------------------------------------------
// Softmax cross-entropy
// ---------------------------------------------------------------------------

Tensor softmax(const Tensor& logits);  // max-subtraction stable; sums to 1

struct SoftmaxXent {
    Tensor probs;
    double loss = 0.0;  // -log probs[gold]
};

SoftmaxXent softmax_xent(const Tensor& logits, int gold);
// dL/dlogits = probs - onehot(gold), scaled by dloss.
Tensor softmax_xent_backward(const Tensor& probs, int gold, double dloss = 1.0);

// ---------------------------------------------------------------------------
// Inverted dropout
// ---------------------------------------------------------------------------

// Training mode zeroes each element with probability p and scales survivors
// by 1/(1-p); inference mode is the identity. `mask` receives the applied
// per-element factor so backward is an elementwise product.
Tensor dropout_forward(const Tensor& x, double p, bool training, Rng& rng, Tensor& mask);
Tensor dropout_backward(const Tensor& dy, const Tensor& mask);

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct Adam {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int64_t steps = 0;

    void attach(std::vector<Parameter*> params);
    // One bias-corrected update from the currently accumulated gradients.
    // Does not clear the gradients.
    void step();

    std::vector<Parameter*> params_;
    std::vector<Tensor> m_, v_;  // first/second moment per parameter
};

}  // namespace senti
