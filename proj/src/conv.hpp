#pragma once

#include <vector>

#include "nn.hpp"
#include "tensor.hpp"

namespace senti {

// 1-D convolution bank over a token-vector sequence, one filter group per
// window width, each group followed by length-2 stride-2 max pooling (an odd
// tail is kept as a singleton max). Per-width pooled maps are flattened
// position-major and concatenated in width order.
struct ConvPoolParams {
    struct Group {
        int width = 0;
        Parameter W;  // [filters x (width * input_dim)]
        Parameter b;  // [filters]
    };
    std::vector<Group> groups;  // ascending width
    int input_dim = 0;
    Activation act = Activation::identity;

    void init(const std::vector<int>& widths, int filters, int in_dim, Activation a, Rng& rng);
    int max_width() const;
    // Length of the concatenated feature vector for an n-row input.
    int feature_dim(int n) const;
    std::vector<Parameter*> parameters();
};

struct ConvPoolCache {
    Tensor x;  // n x d
    int true_len = 0;
    struct Group {
        Tensor pre;               // positions x filters, pre-activation
        Tensor post;              // after activation and masking
        std::vector<int> argmax;  // winning position per pooled output
        int positions = 0;
        int pooled = 0;
    };
    std::vector<Group> groups;
};

// x has n rows (n >= largest filter width, else error). Positions whose
// window extends past `true_len` rows are masked to exactly 0 (no gradient),
// so zero-padded tails never leak into the features.
Tensor conv_pool_forward(const ConvPoolParams& p, const Tensor& x, int true_len,
                         ConvPoolCache& cache);
// Accumulates filter gradients; returns dL/dx (n x d).
Tensor conv_pool_backward(ConvPoolParams& p, const ConvPoolCache& cache, const Tensor& dfeat);

}  // namespace senti
