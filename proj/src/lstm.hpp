#pragma once

#include <vector>

#include "tensor.hpp"

namespace senti {

// Standard single-layer LSTM. Gate blocks are stacked in the order
// input, forget, output, candidate; the initial hidden and cell states are
// zero and the forget-gate bias is initialized to 1.
struct LstmParams {
    int input = 0;
    int hidden = 0;
    Parameter Wx;  // [4h x d]
    Parameter Wh;  // [4h x h]
    Parameter b;   // [4h]

    void init(int hidden_dim, int input_dim, Rng& rng);
    std::vector<Parameter*> parameters() { return {&Wx, &Wh, &b}; }
};

struct LstmCache {
    int T = 0;
    Tensor x;       // T x d
    Tensor gates;   // T x 4h, post-activation (i, f, o, g)
    Tensor cs;      // T x h cell states
    Tensor hs;      // T x h hidden states
    Tensor tanh_c;  // T x h, tanh(c_t)
};

// Runs the recurrence over the full sequence (T >= 1); fills `cache` and
// returns the final hidden state (h vector).
Tensor lstm_forward(const LstmParams& p, const Tensor& x, LstmCache& cache);

// dhs holds the upstream gradient for every hidden state (T x h); callers
// that only consume the final state pass zeros elsewhere. Accumulates
// parameter gradients and returns dL/dx (T x d).
Tensor lstm_backward(LstmParams& p, const LstmCache& cache, const Tensor& dhs);

// Bidirectional wrapper: an independent backward-direction LSTM runs over the
// reversed input; the output is [fwd final ; bwd final] (2h vector).
struct BiLstmParams {
    LstmParams fwd, bwd;

    void init(int hidden_dim, int input_dim, Rng& rng);
    std::vector<Parameter*> parameters();
};

struct BiLstmCache {
    LstmCache fwd, bwd;
    Tensor x_rev;  // reversed input fed to the backward direction
};

Tensor bilstm_forward(const BiLstmParams& p, const Tensor& x, BiLstmCache& cache);
// dout is the gradient on the concatenated output (2h); returns dL/dx.
Tensor bilstm_backward(BiLstmParams& p, const BiLstmCache& cache, const Tensor& dout);

}  // namespace senti
