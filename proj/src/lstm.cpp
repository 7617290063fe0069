#include "lstm.hpp"

#include <cmath>

namespace senti {

void LstmParams::init(int hidden_dim, int input_dim, Rng& rng) {
    require(hidden_dim > 0 && input_dim > 0, "lstm dimensions must be positive");
    input = input_dim;
    hidden = hidden_dim;
    const double bx = glorot_bound(input_dim, hidden_dim);
    const double bh = glorot_bound(hidden_dim, hidden_dim);
    Wx = Parameter(Tensor::uniform({4 * hidden_dim, input_dim}, rng, -bx, bx));
    Wh = Parameter(Tensor::uniform({4 * hidden_dim, hidden_dim}, rng, -bh, bh));
    b = Parameter(Tensor::zeros({4 * hidden_dim}));
    for (int k = 0; k < hidden_dim; ++k) b.value(hidden_dim + k) = 1.0;  // forget gate
}

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

Tensor lstm_forward(const LstmParams& p, const Tensor& x, LstmCache& cache) {
    const int T = x.rows();
    const int d = x.cols();
    const int h = p.hidden;
    require(T >= 1, "lstm forward: empty sequence");
    require(d == p.input, "lstm forward: input dimension mismatch");

    cache.T = T;
    cache.x = x;
    cache.gates = Tensor::zeros({T, 4 * h});
    cache.cs = Tensor::zeros({T, h});
    cache.hs = Tensor::zeros({T, h});
    cache.tanh_c = Tensor::zeros({T, h});

    std::vector<double> pre(4 * h);
    for (int t = 0; t < T; ++t) {
        const double* xt = x.row_ptr(t);
        const double* hprev = t > 0 ? cache.hs.row_ptr(t - 1) : nullptr;
        for (int r = 0; r < 4 * h; ++r) {
            double s = p.b.value(r);
            const double* wx = p.Wx.value.row_ptr(r);
            for (int i = 0; i < d; ++i) s += wx[i] * xt[i];
            if (hprev) {
                const double* wh = p.Wh.value.row_ptr(r);
                for (int j = 0; j < h; ++j) s += wh[j] * hprev[j];
            }
            pre[r] = s;
        }
        double* gate = cache.gates.row_ptr(t);
        for (int k = 0; k < h; ++k) {
            gate[k] = sigmoid(pre[k]);                  // input
            gate[h + k] = sigmoid(pre[h + k]);          // forget
            gate[2 * h + k] = sigmoid(pre[2 * h + k]);  // output
            gate[3 * h + k] = std::tanh(pre[3 * h + k]);  // candidate
        }
        const double* cprev = t > 0 ? cache.cs.row_ptr(t - 1) : nullptr;
        double* ct = cache.cs.row_ptr(t);
        double* ht = cache.hs.row_ptr(t);
        double* tc = cache.tanh_c.row_ptr(t);
        for (int k = 0; k < h; ++k) {
            const double prev = cprev ? cprev[k] : 0.0;
            ct[k] = gate[h + k] * prev + gate[k] * gate[3 * h + k];
            tc[k] = std::tanh(ct[k]);
            ht[k] = gate[2 * h + k] * tc[k];
        }
    }
    Tensor final_h = Tensor::zeros({h});
    const double* last = cache.hs.row_ptr(T - 1);
    for (int k = 0; k < h; ++k) final_h(k) = last[k];
    return final_h;
}

Tensor lstm_backward(LstmParams& p, const LstmCache& cache, const Tensor& dhs) {
    const int T = cache.T;
    const int d = p.input;
    const int h = p.hidden;
    require(dhs.rows() == T && dhs.cols() == h, "lstm backward: dhs shape mismatch");

    Tensor dx = Tensor::zeros({T, d});
    std::vector<double> dh(h, 0.0), dc(h, 0.0), da(4 * h);
    for (int t = T - 1; t >= 0; --t) {
        const double* gate = cache.gates.row_ptr(t);
        const double* tc = cache.tanh_c.row_ptr(t);
        const double* cprev = t > 0 ? cache.cs.row_ptr(t - 1) : nullptr;
        const double* hprev = t > 0 ? cache.hs.row_ptr(t - 1) : nullptr;
        const double* up = dhs.row_ptr(t);
        for (int k = 0; k < h; ++k) {
            const double dht = dh[k] + up[k];
            const double i = gate[k], f = gate[h + k], o = gate[2 * h + k], g = gate[3 * h + k];
            const double dct = dht * o * (1.0 - tc[k] * tc[k]) + dc[k];
            const double prev = cprev ? cprev[k] : 0.0;
            da[k] = dct * g * i * (1.0 - i);
            da[h + k] = dct * prev * f * (1.0 - f);
            da[2 * h + k] = dht * tc[k] * o * (1.0 - o);
            da[3 * h + k] = dct * i * (1.0 - g * g);
            dc[k] = dct * f;
        }
        double* dxt = dx.row_ptr(t);
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int r = 0; r < 4 * h; ++r) {
            const double dar = da[r];
            p.b.grad(r) += dar;
            double* wxg = p.Wx.grad.row_ptr(r);
            const double* wx = p.Wx.value.row_ptr(r);
            const double* xt = cache.x.row_ptr(t);
            for (int i = 0; i < d; ++i) {
                wxg[i] += dar * xt[i];
                dxt[i] += dar * wx[i];
            }
            if (hprev) {
                double* whg = p.Wh.grad.row_ptr(r);
                const double* wh = p.Wh.value.row_ptr(r);
                for (int j = 0; j < h; ++j) {
                    whg[j] += dar * hprev[j];
                    dh[j] += dar * wh[j];
                }
            }
        }
    }
    return dx;
}

void BiLstmParams::init(int hidden_dim, int input_dim, Rng& rng) {
    fwd.init(hidden_dim, input_dim, rng);
    bwd.init(hidden_dim, input_dim, rng);
}

std::vector<Parameter*> BiLstmParams::parameters() {
    std::vector<Parameter*> ps = fwd.parameters();
    for (Parameter* p : bwd.parameters()) ps.push_back(p);
    return ps;
}

namespace {
Tensor reverse_rows(const Tensor& x) {
    Tensor r(x.shape);
    const int T = x.rows();
    const int d = x.cols();
    for (int t = 0; t < T; ++t) {
        const double* src = x.row_ptr(t);
        double* dst = r.row_ptr(T - 1 - t);
        for (int i = 0; i < d; ++i) dst[i] = src[i];
    }
    return r;
}
}  // namespace

Tensor bilstm_forward(const BiLstmParams& p, const Tensor& x, BiLstmCache& cache) {
    cache.x_rev = reverse_rows(x);
    const Tensor hf = lstm_forward(p.fwd, x, cache.fwd);
    const Tensor hb = lstm_forward(p.bwd, cache.x_rev, cache.bwd);
    const int h = p.fwd.hidden;
    Tensor out = Tensor::zeros({2 * h});
    for (int k = 0; k < h; ++k) {
        out(k) = hf(k);
        out(h + k) = hb(k);
    }
    return out;
}

Tensor bilstm_backward(BiLstmParams& p, const BiLstmCache& cache, const Tensor& dout) {
    const int h = p.fwd.hidden;
    require(dout.numel() == 2 * h, "bilstm backward: gradient size mismatch");
    const int T = cache.fwd.T;
    Tensor dhs_f = Tensor::zeros({T, h});
    Tensor dhs_b = Tensor::zeros({T, h});
    for (int k = 0; k < h; ++k) {
        dhs_f(T - 1, k) = dout(k);
        dhs_b(T - 1, k) = dout(h + k);
    }
    Tensor dx = lstm_backward(p.fwd, cache.fwd, dhs_f);
    const Tensor dx_rev = lstm_backward(p.bwd, cache.bwd, dhs_b);
    const Tensor dx_b = reverse_rows(dx_rev);
    for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dx_b.data[i];
    return dx;
}

}  // namespace senti
