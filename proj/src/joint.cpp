#include "joint.hpp"

#include <algorithm>
#include <fstream>

#include "error.hpp"
#include "text.hpp"

namespace senti {

DistantMarkers DistantMarkers::defaults() {
    return {{":)", ":-)", ":D", "=)"}, {":(", ":-("}};
}

std::optional<int> distant_label(const std::string& text, const DistantMarkers& markers) {
    bool pos = false, neg = false;
    for (const auto& m : markers.positive) {
        if (count_occurrences(text, m) > 0) {
            pos = true;
            break;
        }
    }
    for (const auto& m : markers.negative) {
        if (count_occurrences(text, m) > 0) {
            neg = true;
            break;
        }
    }
    if (pos == neg) return std::nullopt;  // neither, or conflicting markers
    return pos ? 1 : -1;
}

std::vector<DistantExample> load_distant_corpus(const std::string& path,
                                                const DistantMarkers& markers) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open distant corpus " + path);
    std::vector<DistantExample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto polarity = distant_label(line, markers);
        if (!polarity) continue;
        DistantExample ex;
        ex.tokens = tokenize(line);
        ex.polarity = *polarity;
        if (!ex.tokens.empty()) out.push_back(std::move(ex));
    }
    return out;
}

void JointConfig::validate() const {
    require(dim > 0, "joint dim must be positive");
    require(window >= 1 && window % 2 == 1, "joint window must be odd and >= 1");
    require(hidden > 0, "joint hidden size must be positive");
    require(alpha >= 0.0 && alpha <= 1.0, "joint alpha must be in [0, 1]");
    require(learning_rate > 0.0, "joint learning rate must be positive");
    require(epochs >= 0, "joint epochs must be >= 0");
    require(min_count >= 1, "joint min_count must be >= 1");
}

void JointScorer::init(const Vocabulary& v, const JointConfig& config, Rng& rng) {
    dim = config.dim;
    window = config.window;
    hidden = config.hidden;
    vocab = v;
    emb = Parameter(Tensor::uniform({static_cast<int>(v.size()), dim}, rng, -0.25, 0.25));
    hidden_layer.init(hidden, window * dim, Activation::hard_tanh, rng);
    cw_head.init(1, hidden, Activation::identity, rng);
    s_head.init(2, hidden, Activation::identity, rng);
}

std::vector<Parameter*> JointScorer::parameters() {
    return {&emb,         &hidden_layer.W, &hidden_layer.b, &cw_head.W,
            &cw_head.b,   &s_head.W,       &s_head.b};
}

void JointScorer::zero_grads() {
    for (Parameter* p : parameters()) p->zero_grad();
}

namespace {

Tensor concat_window(const JointScorer& s, std::span<const int> ids) {
    require(static_cast<int>(ids.size()) == s.window, "window length mismatch");
    Tensor x = Tensor::zeros({s.window * s.dim});
    for (int w = 0; w < s.window; ++w) {
        const int id = ids[w];
        require(id >= 0 && id < s.emb.value.rows(), "window id out of range");
        const double* row = s.emb.value.row_ptr(id);
        for (int k = 0; k < s.dim; ++k) x(w * s.dim + k) = row[k];
    }
    return x;
}

struct WindowForward {
    Tensor concat;
    DenseCache hid, cw, sh;
    double f_cw = 0.0;
    double f_s1 = 0.0;
};

WindowForward window_forward(const JointScorer& s, std::span<const int> ids) {
    WindowForward f;
    f.concat = concat_window(s, ids);
    const Tensor h = dense_forward(s.hidden_layer, f.concat, f.hid);
    f.f_cw = dense_forward(s.cw_head, h, f.cw)(0);
    f.f_s1 = dense_forward(s.s_head, h, f.sh)(0);
    return f;
}

// Backpropagates (d_cw * df_cw + d_s1 * df_s1) through one window's forward
// pass, accumulating parameter gradients including the embedding rows.
void window_backward(JointScorer& s, std::span<const int> ids, const WindowForward& f,
                     double d_cw, double d_s1) {
    Tensor dh = Tensor::zeros({s.hidden});
    if (d_cw != 0.0) {
        Tensor dcw = Tensor::vector({d_cw});
        const Tensor dh1 = dense_backward(s.cw_head, f.cw, dcw);
        for (int k = 0; k < s.hidden; ++k) dh(k) += dh1(k);
    }
    if (d_s1 != 0.0) {
        Tensor ds = Tensor::vector({d_s1, 0.0});
        const Tensor dh2 = dense_backward(s.s_head, f.sh, ds);
        for (int k = 0; k < s.hidden; ++k) dh(k) += dh2(k);
    }
    const Tensor dconcat = dense_backward(s.hidden_layer, f.hid, dh);
    for (int w = 0; w < s.window; ++w) {
        double* grow = s.emb.grad.row_ptr(ids[w]);
        for (int k = 0; k < s.dim; ++k) grow[k] += dconcat(w * s.dim + k);
    }
}

}  // namespace

double JointScorer::f_cw(std::span<const int> window_ids) const {
    return window_forward(*this, window_ids).f_cw;
}

double JointScorer::f_s1(std::span<const int> window_ids) const {
    return window_forward(*this, window_ids).f_s1;
}

std::vector<int> corrupt_window(std::span<const int> window_ids, size_t vocab_size, Rng& rng) {
    require(vocab_size >= 2, "corrupt_window: vocabulary must have at least two words");
    std::vector<int> out(window_ids.begin(), window_ids.end());
    const size_t center = out.size() / 2;
    const int old = out[center];
    // One draw over the vocab minus the center word keeps this uniform.
    int pick = static_cast<int>(rng.next_below(vocab_size - 1));
    if (pick >= old) ++pick;
    out[center] = pick;
    return out;
}

JointLosses joint_losses_from_scores(double fcw_t, double fcw_r, double fs1_t, double fs1_r,
                                     int polarity, double alpha) {
    require(alpha >= 0.0 && alpha <= 1.0, "joint alpha must be in [0, 1]");
    require(polarity == 1 || polarity == -1, "polarity must be +1 or -1");
    JointLosses l;
    l.cw = std::max(0.0, 1.0 - fcw_t + fcw_r);
    l.s = std::max(0.0, 1.0 - polarity * fs1_t + polarity * fs1_r);
    l.combined = alpha * l.cw + (1.0 - alpha) * l.s;
    return l;
}

JointLosses joint_losses(const JointScorer& scorer, std::span<const int> t,
                         std::span<const int> t_r, int polarity, double alpha) {
    require(t.size() == t_r.size(), "joint windows must have the same length");
    const WindowForward ft = window_forward(scorer, t);
    const WindowForward fr = window_forward(scorer, t_r);
    return joint_losses_from_scores(ft.f_cw, fr.f_cw, ft.f_s1, fr.f_s1, polarity, alpha);
}

JointLosses joint_backward(JointScorer& scorer, std::span<const int> t, std::span<const int> t_r,
                           int polarity, double alpha) {
    require(t.size() == t_r.size(), "joint windows must have the same length");
    const WindowForward ft = window_forward(scorer, t);
    const WindowForward fr = window_forward(scorer, t_r);
    const JointLosses l =
        joint_losses_from_scores(ft.f_cw, fr.f_cw, ft.f_s1, fr.f_s1, polarity, alpha);
    const double d_cw = l.cw > 0.0 ? alpha : 0.0;
    const double d_s = l.s > 0.0 ? (1.0 - alpha) * polarity : 0.0;
    // d combined / d f_cw(t) = -d_cw, / d f_cw(t_r) = +d_cw; same shape for f_s1.
    if (d_cw != 0.0 || d_s != 0.0) {
        window_backward(scorer, t, ft, -d_cw, -d_s);
        window_backward(scorer, t_r, fr, d_cw, d_s);
    }
    return l;
}

JointTrainer::JointTrainer(const std::vector<DistantExample>& corpus, const JointConfig& config)
    : config_(config), rng_(config.seed) {
    config_.validate();
    require(!corpus.empty(), "joint corpus is empty");
    bool has_pos = false, has_neg = false;
    std::vector<std::vector<std::string>> token_seqs;
    token_seqs.reserve(corpus.size());
    for (const auto& ex : corpus) {
        require(ex.polarity == 1 || ex.polarity == -1, "polarity must be +1 or -1");
        (ex.polarity == 1 ? has_pos : has_neg) = true;
        token_seqs.push_back(ex.tokens);
    }
    if (!(has_pos && has_neg)) {
        warnings_.push_back(
            "joint corpus has a single polarity; the sentiment hinge is degenerate");
    }
    const Vocabulary vocab = build_vocabulary(token_seqs, config_.min_count);
    scorer_.init(vocab, config_, rng_);

    for (const auto& ex : corpus) {
        std::vector<int> ids;
        ids.reserve(ex.tokens.size());
        for (const auto& tok : ex.tokens) {
            const int id = vocab.id(tok);
            if (id >= 0) ids.push_back(id);
        }
        if (static_cast<int>(ids.size()) < config_.window) continue;  // no complete window
        for (size_t start = 0; start + config_.window <= ids.size(); ++start) {
            Window w;
            w.ids.assign(ids.begin() + start, ids.begin() + start + config_.window);
            w.polarity = ex.polarity;
            windows_.push_back(std::move(w));
        }
    }
    require(!windows_.empty(), "joint corpus has no window of the configured length");

    // Fixed probe batch, drawn before training.
    Rng probe_rng(config_.seed ^ 0x9e3779b97f4a7c15ULL);
    const size_t probe_count = std::min<size_t>(windows_.size(), 256);
    for (size_t k = 0; k < probe_count; ++k) {
        const auto& w = windows_[probe_rng.next_below(windows_.size())];
        probe_windows_.push_back(w);
        probe_corruptions_.push_back(corrupt_window(w.ids, vocab.size(), probe_rng));
    }
}

double JointTrainer::probe_loss() const {
    if (probe_windows_.empty()) return 0.0;
    double total = 0.0;
    for (size_t k = 0; k < probe_windows_.size(); ++k) {
        total += joint_losses(scorer_, probe_windows_[k].ids, probe_corruptions_[k],
                              probe_windows_[k].polarity, config_.alpha)
                     .combined;
    }
    return total / probe_windows_.size();
}

double JointTrainer::hinge_accuracy() const {
    Rng rng(config_.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    size_t correct = 0;
    for (const auto& w : windows_) {
        const auto corrupted = corrupt_window(w.ids, scorer_.vocab.size(), rng);
        const double margin = scorer_.f_s1(w.ids) - scorer_.f_s1(corrupted);
        if (w.polarity * margin > 0.0) ++correct;
    }
    return static_cast<double>(correct) / windows_.size();
}

void JointTrainer::train() {
    std::vector<size_t> order(windows_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<Parameter*> dense_params = scorer_.parameters();
    dense_params.erase(dense_params.begin());  // the embedding matrix is handled row-wise
    const double lr = config_.learning_rate;
    std::vector<int> touched;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        // Fisher-Yates reshuffle per epoch, driven by the trainer RNG.
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng_.next_below(i)]);
        }
        for (const size_t wi : order) {
            const Window& w = windows_[wi];
            const auto corrupted = corrupt_window(w.ids, scorer_.vocab.size(), rng_);
            touched.assign(w.ids.begin(), w.ids.end());
            touched.insert(touched.end(), corrupted.begin(), corrupted.end());
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

            for (Parameter* p : dense_params) p->zero_grad();
            for (const int id : touched) {
                double* grow = scorer_.emb.grad.row_ptr(id);
                std::fill(grow, grow + config_.dim, 0.0);
            }
            joint_backward(scorer_, w.ids, corrupted, w.polarity, config_.alpha);
            for (Parameter* p : dense_params) {
                for (size_t k = 0; k < p->value.data.size(); ++k) {
                    p->value.data[k] -= lr * p->grad.data[k];
                }
            }
            for (const int id : touched) {
                double* row = scorer_.emb.value.row_ptr(id);
                const double* grow = scorer_.emb.grad.row_ptr(id);
                for (int k = 0; k < config_.dim; ++k) row[k] -= lr * grow[k];
            }
        }
    }
}

EmbeddingMatrix JointTrainer::embeddings() const {
    EmbeddingMatrix m;
    m.vocab = scorer_.vocab;
    m.dim = config_.dim;
    m.data = scorer_.emb.value.data;
    m.oov_seed = config_.seed;
    m.validate();
    return m;
}

EmbeddingMatrix train_joint(const std::vector<DistantExample>& corpus,
                            const JointConfig& config) {
    JointTrainer trainer(corpus, config);
    trainer.train();
    return trainer.embeddings();
}

}  // namespace senti
