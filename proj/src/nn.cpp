#include "nn.hpp"

#include <algorithm>
#include <cmath>

namespace senti {

double activate_value(double x, Activation act) {
    switch (act) {
        case Activation::identity: return x;
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::tanh_fn: return std::tanh(x);
        case Activation::hard_tanh: return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    }
    fail("unknown activation");
}

double activate_slope(double x, double y, Activation act) {
    switch (act) {
        case Activation::identity: return 1.0;
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::tanh_fn: return 1.0 - y * y;
        case Activation::hard_tanh: return (x > -1.0 && x < 1.0) ? 1.0 : 0.0;
        case Activation::sigmoid: return y * (1.0 - y);
    }
    fail("unknown activation");
}

Tensor activate(const Tensor& x, Activation act) {
    Tensor y = x;
    for (auto& v : y.data) v = activate_value(v, act);
    return y;
}

void Dense::init(int out_dim, int in_dim, Activation a, Rng& rng) {
    require(out_dim > 0 && in_dim > 0, "dense dimensions must be positive");
    const double bound = glorot_bound(in_dim, out_dim);
    W = Parameter(Tensor::uniform({out_dim, in_dim}, rng, -bound, bound));
    b = Parameter(Tensor::zeros({out_dim}));
    act = a;
}

Tensor dense_forward(const Dense& layer, const Tensor& x, DenseCache& cache) {
    const int in = layer.W.value.cols();
    const int out = layer.W.value.rows();
    require(x.numel() == in, "dense forward: input size mismatch");
    cache.x = x;
    cache.pre = Tensor::zeros({out});
    for (int o = 0; o < out; ++o) {
        const double* wr = layer.W.value.row_ptr(o);
        double s = layer.b.value(o);
        for (int i = 0; i < in; ++i) s += wr[i] * x.data[i];
        cache.pre(o) = s;
    }
    cache.out = activate(cache.pre, layer.act);
    return cache.out;
}

Tensor dense_backward(Dense& layer, const DenseCache& cache, const Tensor& dout) {
    const int in = layer.W.value.cols();
    const int out = layer.W.value.rows();
    require(dout.numel() == out, "dense backward: gradient size mismatch");
    Tensor dx = Tensor::zeros({in});
    for (int o = 0; o < out; ++o) {
        const double dpre = dout(o) * activate_slope(cache.pre(o), cache.out(o), layer.act);
        layer.b.grad(o) += dpre;
        double* wg = layer.W.grad.row_ptr(o);
        const double* wr = layer.W.value.row_ptr(o);
        for (int i = 0; i < in; ++i) {
            wg[i] += dpre * cache.x.data[i];
            dx.data[i] += dpre * wr[i];
        }
    }
    return dx;
}

Tensor softmax(const Tensor& logits) {
    require(logits.numel() >= 1, "softmax on empty logits");
    Tensor p = logits;
    const double mx = *std::max_element(p.data.begin(), p.data.end());
    double z = 0.0;
    for (auto& v : p.data) {
        v = std::exp(v - mx);
        z += v;
    }
    for (auto& v : p.data) v /= z;
    return p;
}

SoftmaxXent softmax_xent(const Tensor& logits, int gold) {
    require(gold >= 0 && gold < logits.numel(), "softmax gold label out of range");
    SoftmaxXent r;
    r.probs = softmax(logits);
    r.loss = -std::log(std::max(r.probs(gold), 1e-300));
    return r;
}

Tensor softmax_xent_backward(const Tensor& probs, int gold, double dloss) {
    require(gold >= 0 && gold < probs.numel(), "softmax gold label out of range");
    Tensor d = probs;
    d(gold) -= 1.0;
    for (auto& v : d.data) v *= dloss;
    return d;
}

Tensor dropout_forward(const Tensor& x, double p, bool training, Rng& rng, Tensor& mask) {
    require(p >= 0.0 && p < 1.0, "dropout probability must be in [0, 1)");
    mask = Tensor(x.shape);
    Tensor y = x;
    if (!training || p == 0.0) {
        mask.fill(1.0);
        return y;
    }
    const double scale = 1.0 / (1.0 - p);
    for (size_t i = 0; i < y.data.size(); ++i) {
        if (rng.next_double() < p) {
            mask.data[i] = 0.0;
            y.data[i] = 0.0;
        } else {
            mask.data[i] = scale;
            y.data[i] *= scale;
        }
    }
    return y;
}

Tensor dropout_backward(const Tensor& dy, const Tensor& mask) {
    require(dy.same_shape(mask), "dropout backward: shape mismatch");
    Tensor dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= mask.data[i];
    return dx;
}

void Adam::attach(std::vector<Parameter*> params) {
    params_ = std::move(params);
    m_.clear();
    v_.clear();
    for (const Parameter* p : params_) {
        m_.push_back(Tensor::zeros(p->value.shape));
        v_.push_back(Tensor::zeros(p->value.shape));
    }
    steps = 0;
}

void Adam::step() {
    ++steps;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
    for (size_t k = 0; k < params_.size(); ++k) {
        Parameter& p = *params_[k];
        if (!p.trainable) continue;
        for (size_t i = 0; i < p.value.data.size(); ++i) {
            const double g = p.grad.data[i];
            double& m = m_[k].data[i];
            double& v = v_[k].data[i];
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            const double mhat = m / c1;
            const double vhat = v / c2;
            p.value.data[i] -= learning_rate * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

}  // namespace senti
