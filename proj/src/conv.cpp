#include "conv.hpp"

#include <algorithm>

namespace senti {

void ConvPoolParams::init(const std::vector<int>& widths, int filters, int in_dim, Activation a,
                          Rng& rng) {
    require(!widths.empty(), "conv: at least one filter width required");
    require(filters > 0 && in_dim > 0, "conv: filters and input dim must be positive");
    require(std::is_sorted(widths.begin(), widths.end()), "conv: widths must be ascending");
    input_dim = in_dim;
    act = a;
    groups.clear();
    for (int w : widths) {
        require(w >= 1, "conv: width must be >= 1");
        Group g;
        g.width = w;
        const int fan_in = w * in_dim;
        const double bound = glorot_bound(fan_in, filters);
        g.W = Parameter(Tensor::uniform({filters, fan_in}, rng, -bound, bound));
        g.b = Parameter(Tensor::zeros({filters}));
        groups.push_back(std::move(g));
    }
}

int ConvPoolParams::max_width() const {
    int m = 0;
    for (const auto& g : groups) m = std::max(m, g.width);
    return m;
}

int ConvPoolParams::feature_dim(int n) const {
    int total = 0;
    for (const auto& g : groups) {
        const int positions = n - g.width + 1;
        require(positions >= 1, "conv: input shorter than largest filter width");
        const int pooled = (positions + 1) / 2;
        total += pooled * g.W.value.rows();
    }
    return total;
}

Tensor conv_pool_forward(const ConvPoolParams& p, const Tensor& x, int true_len,
                         ConvPoolCache& cache) {
    const int n = x.rows();
    const int d = x.cols();
    require(d == p.input_dim, "conv forward: input dimension mismatch");
    require(n >= p.max_width(), "conv forward: input shorter than largest filter width");
    require(true_len >= 1 && true_len <= n, "conv forward: bad true length");

    cache.x = x;
    cache.true_len = true_len;
    cache.groups.clear();
    Tensor feat = Tensor::zeros({p.feature_dim(n)});
    int offset = 0;
    for (const auto& g : p.groups) {
        const int filters = g.W.value.rows();
        const int positions = n - g.width + 1;
        const int pooled = (positions + 1) / 2;
        ConvPoolCache::Group cg;
        cg.positions = positions;
        cg.pooled = pooled;
        cg.pre = Tensor::zeros({positions, filters});
        cg.post = Tensor::zeros({positions, filters});
        for (int pos = 0; pos < positions; ++pos) {
            const bool masked = pos + g.width > true_len;
            double* pre = cg.pre.row_ptr(pos);
            double* post = cg.post.row_ptr(pos);
            for (int f = 0; f < filters; ++f) {
                if (masked) {
                    pre[f] = 0.0;
                    post[f] = 0.0;
                    continue;
                }
                const double* wf = g.W.value.row_ptr(f);
                double s = g.b.value(f);
                int wi = 0;
                for (int r = 0; r < g.width; ++r) {
                    const double* xr = x.row_ptr(pos + r);
                    for (int c = 0; c < d; ++c) s += wf[wi++] * xr[c];
                }
                pre[f] = s;
                post[f] = activate_value(s, p.act);
            }
        }
        cg.argmax.assign(static_cast<size_t>(pooled) * filters, 0);
        for (int q = 0; q < pooled; ++q) {
            const int p0 = 2 * q;
            const int p1 = std::min(p0 + 1, positions - 1);  // odd tail: singleton window
            for (int f = 0; f < filters; ++f) {
                int best = p0;
                if (p1 != p0 && cg.post(p1, f) > cg.post(p0, f)) best = p1;
                cg.argmax[static_cast<size_t>(q) * filters + f] = best;
                feat(offset + q * filters + f) = cg.post(best, f);
            }
        }
        offset += pooled * filters;
        cache.groups.push_back(std::move(cg));
    }
    return feat;
}

Tensor conv_pool_backward(ConvPoolParams& p, const ConvPoolCache& cache, const Tensor& dfeat) {
    const int n = cache.x.rows();
    const int d = cache.x.cols();
    Tensor dx = Tensor::zeros({n, d});
    int offset = 0;
    for (size_t gi = 0; gi < p.groups.size(); ++gi) {
        auto& g = p.groups[gi];
        const auto& cg = cache.groups[gi];
        const int filters = g.W.value.rows();
        Tensor dpost = Tensor::zeros({cg.positions, filters});
        for (int q = 0; q < cg.pooled; ++q) {
            for (int f = 0; f < filters; ++f) {
                const int best = cg.argmax[static_cast<size_t>(q) * filters + f];
                dpost(best, f) += dfeat(offset + q * filters + f);
            }
        }
        for (int pos = 0; pos < cg.positions; ++pos) {
            if (pos + g.width > cache.true_len) continue;  // masked: constant 0
            for (int f = 0; f < filters; ++f) {
                const double dp = dpost(pos, f);
                if (dp == 0.0) continue;
                const double dpre =
                    dp * activate_slope(cg.pre(pos, f), cg.post(pos, f), p.act);
                g.b.grad(f) += dpre;
                double* wg = g.W.grad.row_ptr(f);
                const double* wf = g.W.value.row_ptr(f);
                int wi = 0;
                for (int r = 0; r < g.width; ++r) {
                    const double* xr = cache.x.row_ptr(pos + r);
                    double* dxr = dx.row_ptr(pos + r);
                    for (int c = 0; c < d; ++c) {
                        wg[wi] += dpre * xr[c];
                        dxr[c] += dpre * wf[wi];
                        ++wi;
                    }
                }
            }
        }
        offset += cg.pooled * filters;
    }
    return dx;
}

std::vector<Parameter*> ConvPoolParams::parameters() {
    std::vector<Parameter*> ps;
    for (auto& g : groups) {
        ps.push_back(&g.W);
        ps.push_back(&g.b);
    }
    return ps;
}

}  // namespace senti
