#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "checkpoint.hpp"
#include "error.hpp"
#include "eval.hpp"

namespace senti {

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::BOW: return "BOW";
        case ModelKind::AVE: return "AVE";
        case ModelKind::RETROFIT: return "RETROFIT";
        case ModelKind::JOINT: return "JOINT";
        case ModelKind::LSTM: return "LSTM";
        case ModelKind::BILSTM: return "BILSTM";
        case ModelKind::CNN: return "CNN";
    }
    fail("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    for (ModelKind k : {ModelKind::BOW, ModelKind::AVE, ModelKind::RETROFIT, ModelKind::JOINT,
                        ModelKind::LSTM, ModelKind::BILSTM, ModelKind::CNN}) {
        if (name == model_kind_name(k)) return k;
    }
    fail("unknown model kind '" + name + "'");
}

bool model_kind_is_neural(ModelKind kind) {
    return kind == ModelKind::LSTM || kind == ModelKind::BILSTM || kind == ModelKind::CNN;
}

void ModelSpec::validate() const {
    if (kind != ModelKind::BOW) require(dim > 0, "model dim must be positive");
    if (kind == ModelKind::RETROFIT) {
        require(!lexicon_path.empty(), "RETROFIT requires a lexicon path");
    }
    require(hidden >= 0, "hidden must be >= 0 (0 tunes on dev)");
    require(epochs >= -1, "epochs must be >= -1 (-1 uses early stopping)");
    require(retrofit_iterations >= 0, "retrofit iterations must be >= 0");
    require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
    if (kind == ModelKind::CNN) require(filters > 0, "CNN filters must be positive");
    if (kind == ModelKind::JOINT) {
        require(joint_alpha >= 0.0 && joint_alpha <= 1.0, "joint alpha must be in [0, 1]");
        require(joint_window >= 1 && joint_window % 2 == 1, "joint window must be odd");
        require(joint_hidden > 0, "joint hidden must be positive");
        require(joint_epochs >= 0, "joint epochs must be >= 0");
        require(joint_learning_rate > 0.0, "joint learning rate must be positive");
    }
}

const std::vector<int>& hidden_grid() {
    static const std::vector<int> grid = {50, 100, 200};
    return grid;
}

const std::vector<double>& lambda_grid() {
    static const std::vector<double> grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    return grid;
}

// ---------------------------------------------------------------------------
// Feature builders
// ---------------------------------------------------------------------------

FeatureRow bow_features(const LabeledExample& example, const Vocabulary& vocab) {
    std::vector<std::pair<int, double>> counts;
    for (const auto& tok : example.tokens) {
        const int id = vocab.id(tok);
        if (id >= 0) counts.emplace_back(id, 1.0);
    }
    std::sort(counts.begin(), counts.end());
    FeatureRow row;
    for (const auto& [idx, v] : counts) {
        if (!row.entries.empty() && row.entries.back().first == idx) {
            row.entries.back().second += v;
        } else {
            row.entries.emplace_back(idx, v);
        }
    }
    return row;
}

std::vector<double> ave_features(const std::vector<std::string>& tokens,
                                 const EmbeddingMatrix& embeddings) {
    require(!tokens.empty(), "average features of an empty example");
    std::vector<double> mean(embeddings.dim, 0.0);
    for (const auto& tok : tokens) {
        const auto v = embeddings.lookup(tok);
        for (int k = 0; k < embeddings.dim; ++k) mean[k] += v[k];
    }
    for (auto& m : mean) m /= tokens.size();
    return mean;
}

std::vector<double> minmaxavg_features(const std::vector<std::string>& tokens,
                                       const EmbeddingMatrix& embeddings) {
    require(!tokens.empty(), "min/max/avg features of an empty example");
    const int d = embeddings.dim;
    std::vector<double> mx(d, -1e300), mn(d, 1e300), mean(d, 0.0);
    for (const auto& tok : tokens) {
        const auto v = embeddings.lookup(tok);
        for (int k = 0; k < d; ++k) {
            mx[k] = std::max(mx[k], v[k]);
            mn[k] = std::min(mn[k], v[k]);
            mean[k] += v[k];
        }
    }
    std::vector<double> out;
    out.reserve(3 * d);
    out.insert(out.end(), mx.begin(), mx.end());
    out.insert(out.end(), mn.begin(), mn.end());
    for (double m : mean) out.push_back(m / tokens.size());
    return out;
}

// ---------------------------------------------------------------------------
// Neural classifier
// ---------------------------------------------------------------------------

void NeuralClassifier::init(ModelKind k, const EmbeddingMatrix& base,
                            const Vocabulary& train_vocab, int hidden_dim, int classes,
                            int cnn_filters, int cnn_fixed_len, double dropout, uint64_t seed,
                            Rng& rng) {
    require(model_kind_is_neural(k), "neural init on a non-neural kind");
    kind = k;
    dim = base.dim;
    hidden = hidden_dim;
    num_classes = classes;
    filters = cnn_filters;
    dropout_p = dropout;
    oov_seed = seed;
    vocab = train_vocab;

    // The embedding layer covers the training vocabulary; rows come from the
    // base matrix (its own OOV policy fills words it does not know).
    Tensor e({static_cast<int>(vocab.size()), dim});
    for (size_t i = 0; i < vocab.size(); ++i) {
        const auto v = base.lookup(vocab.words[i]);
        double* row = e.row_ptr(static_cast<int>(i));
        for (int kk = 0; kk < dim; ++kk) row[kk] = v[kk];
    }
    emb = Parameter(std::move(e));

    if (kind == ModelKind::LSTM) {
        lstm.init(hidden, dim, rng);
        dense.init(hidden, hidden, Activation::tanh_fn, rng);
    } else if (kind == ModelKind::BILSTM) {
        bilstm.init(hidden, dim, rng);
        dense.init(hidden, 2 * hidden, Activation::tanh_fn, rng);
    } else {
        cnn_len = std::max(4, cnn_fixed_len);
        conv.init({2, 3, 4}, filters, dim, Activation::relu, rng);
        dense.init(hidden, conv.feature_dim(cnn_len), Activation::relu, rng);
    }
    out.init(num_classes, hidden, Activation::identity, rng);
}

std::vector<Parameter*> NeuralClassifier::parameters() {
    std::vector<Parameter*> ps = {&emb};
    if (kind == ModelKind::LSTM) {
        for (Parameter* p : lstm.parameters()) ps.push_back(p);
    } else if (kind == ModelKind::BILSTM) {
        for (Parameter* p : bilstm.parameters()) ps.push_back(p);
    } else {
        for (Parameter* p : conv.parameters()) ps.push_back(p);
    }
    for (Parameter* p : dense.parameters()) ps.push_back(p);
    for (Parameter* p : out.parameters()) ps.push_back(p);
    return ps;
}

Tensor NeuralClassifier::input_matrix(const std::vector<std::string>& tokens,
                                      std::vector<int>& ids, int& true_len) const {
    require(!tokens.empty(), "neural input on an empty example");
    const int n = kind == ModelKind::CNN ? cnn_len
                                         : static_cast<int>(tokens.size());
    const int used = std::min<int>(static_cast<int>(tokens.size()), n);
    true_len = used;
    ids.assign(n, -1);
    Tensor x({n, dim});
    for (int t = 0; t < used; ++t) {
        const int id = vocab.id(tokens[t]);
        ids[t] = id;
        double* row = x.row_ptr(t);
        if (id >= 0) {
            const double* src = emb.value.row_ptr(id);
            for (int k = 0; k < dim; ++k) row[k] = src[k];
        } else {
            const auto v = oov_vector(oov_seed, tokens[t], dim);
            for (int k = 0; k < dim; ++k) row[k] = v[k];
        }
    }
    return x;  // padding rows (CNN) stay zero
}

namespace {

struct ForwardPass {
    std::vector<int> ids;
    int true_len = 0;
    Tensor x, x_drop, mask_in;
    LstmCache lstm_c;
    BiLstmCache bilstm_c;
    ConvPoolCache conv_c;
    Tensor feat, feat_drop, mask_feat;
    DenseCache dense_c, out_c;
    Tensor logits;
};

ForwardPass neural_forward(const NeuralClassifier& net, const std::vector<std::string>& tokens,
                           bool training, Rng* rng) {
    ForwardPass f;
    f.x = net.input_matrix(tokens, f.ids, f.true_len);
    if (training) {
        f.x_drop = dropout_forward(f.x, net.dropout_p, true, *rng, f.mask_in);
    } else {
        f.x_drop = f.x;
    }
    if (net.kind == ModelKind::LSTM) {
        f.feat = lstm_forward(net.lstm, f.x_drop, f.lstm_c);
    } else if (net.kind == ModelKind::BILSTM) {
        f.feat = bilstm_forward(net.bilstm, f.x_drop, f.bilstm_c);
    } else {
        const Tensor pooled = conv_pool_forward(net.conv, f.x_drop, f.true_len, f.conv_c);
        if (training) {
            f.feat = dropout_forward(pooled, net.dropout_p, true, *rng, f.mask_feat);
        } else {
            f.feat = pooled;
        }
    }
    // Recurrent kinds reuse feat directly; CNN stores the post-dropout vector.
    const Tensor h = dense_forward(net.dense, f.feat, f.dense_c);
    f.logits = dense_forward(net.out, h, f.out_c);
    return f;
}

void neural_backward(NeuralClassifier& net, ForwardPass& f, const Tensor& dlogits) {
    const Tensor dh = dense_backward(net.out, f.out_c, dlogits);
    Tensor dfeat = dense_backward(net.dense, f.dense_c, dh);
    Tensor dx;
    if (net.kind == ModelKind::LSTM) {
        Tensor dhs = Tensor::zeros({f.lstm_c.T, net.lstm.hidden});
        for (int k = 0; k < net.lstm.hidden; ++k) dhs(f.lstm_c.T - 1, k) = dfeat(k);
        dx = lstm_backward(net.lstm, f.lstm_c, dhs);
    } else if (net.kind == ModelKind::BILSTM) {
        dx = bilstm_backward(net.bilstm, f.bilstm_c, dfeat);
    } else {
        const Tensor dpooled = dropout_backward(dfeat, f.mask_feat);
        dx = conv_pool_backward(net.conv, f.conv_c, dpooled);
    }
    const Tensor dx_in = dropout_backward(dx, f.mask_in);
    for (size_t t = 0; t < f.ids.size(); ++t) {
        const int id = f.ids[t];
        if (id < 0) continue;  // OOV or padding: nothing to train
        double* grow = net.emb.grad.row_ptr(id);
        const double* src = dx_in.row_ptr(static_cast<int>(t));
        for (int k = 0; k < net.dim; ++k) grow[k] += src[k];
    }
}

}  // namespace

Tensor NeuralClassifier::logits(const std::vector<std::string>& tokens) const {
    return neural_forward(*this, tokens, false, nullptr).logits;
}

int NeuralClassifier::predict(const std::vector<std::string>& tokens) const {
    const Tensor l = logits(tokens);
    int best = 0;
    for (int c = 1; c < num_classes; ++c) {
        if (l(c) > l(best)) best = c;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

EmbeddingMatrix resolve_base_embeddings(const ModelSpec& spec, const DatasetSplit& data) {
    if (!spec.embeddings_path.empty()) {
        EmbeddingMatrix m = load_embeddings(spec.embeddings_path);
        require(m.dim == spec.dim, "embedding file " + spec.embeddings_path + " has dim " +
                                       std::to_string(m.dim) + ", spec wants " +
                                       std::to_string(spec.dim));
        return m;
    }
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(data.train.size());
    for (const auto& ex : data.train) corpus.push_back(ex.tokens);
    SkipgramConfig cfg;
    cfg.dim = spec.dim;
    cfg.seed = spec.seed;
    return train_skipgram(corpus, cfg);
}

std::vector<DistantExample> distant_from_gold(const DatasetSplit& data) {
    const double mid = (data.scheme.num_labels - 1) / 2.0;
    std::vector<DistantExample> out;
    for (const auto& ex : data.train) {
        if (ex.label == mid) continue;
        DistantExample d;
        d.tokens = ex.tokens;
        d.polarity = ex.label < mid ? -1 : 1;
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

std::vector<Tensor> snapshot_values(NeuralClassifier& net) {
    std::vector<Tensor> vals;
    for (Parameter* p : net.parameters()) vals.push_back(p->value);
    return vals;
}

void restore_values(NeuralClassifier& net, const std::vector<Tensor>& vals) {
    auto params = net.parameters();
    require(params.size() == vals.size(), "snapshot size mismatch");
    for (size_t i = 0; i < params.size(); ++i) params[i]->value = vals[i];
}

double dev_accuracy_of(const NeuralClassifier& net, const std::vector<LabeledExample>& dev) {
    size_t hits = 0;
    for (const auto& ex : dev) hits += net.predict(ex.tokens) == ex.label;
    return static_cast<double>(hits) / dev.size();
}

struct NeuralRun {
    std::shared_ptr<NeuralClassifier> net;
    double dev_accuracy = 0.0;
    int epochs_used = 0;
};

NeuralRun train_neural_config(const ModelSpec& spec, int hidden, const DatasetSplit& data,
                              const EmbeddingMatrix& base, const Vocabulary& vocab) {
    constexpr int kEpochCap = 30;
    constexpr int kPatience = 5;
    constexpr int kBatch = 32;

    Rng rng(spec.seed);
    int cnn_len = 4;
    for (const auto& ex : data.train) {
        cnn_len = std::max(cnn_len, static_cast<int>(ex.tokens.size()));
    }
    NeuralRun run;
    run.net = std::make_shared<NeuralClassifier>();
    run.net->init(spec.kind, base, vocab, hidden, data.scheme.num_labels, spec.filters, cnn_len,
                  spec.dropout, spec.seed, rng);
    NeuralClassifier& net = *run.net;

    const bool early = spec.epochs < 0;
    const int max_epochs = early ? kEpochCap : spec.epochs;
    if (max_epochs == 0) {
        run.dev_accuracy = dev_accuracy_of(net, data.dev);
        return run;
    }

    Adam adam;
    adam.attach(net.parameters());

    std::vector<size_t> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<Tensor> best_values;
    double best_acc = -1.0;
    int best_epoch = 0;
    for (int epoch = 1; epoch <= max_epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.next_below(i)]);
        }
        for (size_t start = 0; start < order.size(); start += kBatch) {
            const size_t end = std::min(order.size(), start + kBatch);
            for (Parameter* p : net.parameters()) p->zero_grad();
            const double scale = 1.0 / static_cast<double>(end - start);
            for (size_t i = start; i < end; ++i) {
                const LabeledExample& ex = data.train[order[i]];
                ForwardPass f = neural_forward(net, ex.tokens, true, &rng);
                const SoftmaxXent sm = softmax_xent(f.logits, ex.label);
                const Tensor dlogits = softmax_xent_backward(sm.probs, ex.label, scale);
                neural_backward(net, f, dlogits);
            }
            adam.step();
        }
        if (early) {
            const double acc = dev_accuracy_of(net, data.dev);
            if (acc > best_acc) {  // strict: the earliest best epoch wins ties
                best_acc = acc;
                best_epoch = epoch;
                best_values = snapshot_values(net);
            } else if (epoch - best_epoch >= kPatience) {
                break;
            }
        }
    }
    if (early) {
        restore_values(net, best_values);
        run.dev_accuracy = best_acc;
        run.epochs_used = best_epoch;
    } else {
        run.dev_accuracy = dev_accuracy_of(net, data.dev);
        run.epochs_used = max_epochs;
    }
    return run;
}

TrainedModel train_neural_kind(const ModelSpec& spec, const DatasetSplit& data) {
    TrainedModel model;
    model.spec = spec;
    model.scheme = data.scheme;
    model.dataset_name = data.name;

    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(data.train.size());
    for (const auto& ex : data.train) corpus.push_back(ex.tokens);
    const Vocabulary vocab = build_vocabulary(corpus, 1);
    const EmbeddingMatrix base = resolve_base_embeddings(spec, data);

    const std::vector<int> hiddens =
        spec.hidden > 0 ? std::vector<int>{spec.hidden} : hidden_grid();
    std::vector<NeuralRun> runs;
    runs.reserve(hiddens.size());
    for (int h : hiddens) {
        runs.push_back(train_neural_config(spec, h, data, base, vocab));
    }
    const size_t best =
        select_best(runs.size(), [&](size_t i) { return runs[i].dev_accuracy; });
    model.neural = runs[best].net;
    model.spec.hidden = hiddens[best];
    model.spec.epochs = runs[best].epochs_used;
    return model;
}

FeatureMatrix linear_feature_rows(const TrainedModel& model,
                                  const std::vector<LabeledExample>& examples) {
    FeatureMatrix X;
    switch (model.spec.kind) {
        case ModelKind::BOW:
            X.dim = static_cast<int>(model.bow_vocab.size());
            for (const auto& ex : examples) {
                X.rows.push_back(bow_features(ex, model.bow_vocab));
            }
            break;
        case ModelKind::AVE:
        case ModelKind::RETROFIT:
            for (const auto& ex : examples) X.add_dense_row(ave_features(ex.tokens, model.embeddings));
            break;
        case ModelKind::JOINT:
            for (const auto& ex : examples) {
                X.add_dense_row(minmaxavg_features(ex.tokens, model.embeddings));
            }
            break;
        default:
            fail("linear features requested for a neural kind");
    }
    return X;
}

TrainedModel train_linear_kind(const ModelSpec& spec, const DatasetSplit& data) {
    TrainedModel model;
    model.spec = spec;
    model.scheme = data.scheme;
    model.dataset_name = data.name;

    switch (spec.kind) {
        case ModelKind::BOW: {
            std::vector<std::vector<std::string>> corpus;
            corpus.reserve(data.train.size());
            for (const auto& ex : data.train) corpus.push_back(ex.tokens);
            model.bow_vocab = build_vocabulary(corpus, 1);
            break;
        }
        case ModelKind::AVE:
            model.embeddings = resolve_base_embeddings(spec, data);
            break;
        case ModelKind::RETROFIT: {
            const EmbeddingMatrix base = resolve_base_embeddings(spec, data);
            const LexiconGraph graph = load_lexicon(spec.lexicon_path, base.vocab);
            RetrofitConfig rc;
            rc.iterations = spec.retrofit_iterations;
            model.embeddings = retrofit_embeddings(base, graph, rc);
            break;
        }
        case ModelKind::JOINT: {
            std::vector<DistantExample> corpus;
            if (!spec.distant_corpus_path.empty()) {
                corpus = load_distant_corpus(spec.distant_corpus_path);
            } else {
                corpus = distant_from_gold(data);
            }
            require(!corpus.empty(), "joint training corpus is empty after distant labeling");
            JointConfig jc;
            jc.dim = spec.dim;
            jc.window = spec.joint_window;
            jc.hidden = spec.joint_hidden;
            jc.alpha = spec.joint_alpha;
            jc.learning_rate = spec.joint_learning_rate;
            jc.epochs = spec.joint_epochs;
            jc.seed = spec.seed;
            JointTrainer trainer(corpus, jc);
            trainer.train();
            model.embeddings = trainer.embeddings();
            for (const auto& w : trainer.warnings()) model.warnings.push_back(w);
            break;
        }
        default:
            fail("linear training requested for a neural kind");
    }

    const FeatureMatrix X_train = linear_feature_rows(model, data.train);
    const FeatureMatrix X_dev = linear_feature_rows(model, data.dev);
    std::vector<int> y_train, y_dev;
    for (const auto& ex : data.train) y_train.push_back(ex.label);
    for (const auto& ex : data.dev) y_dev.push_back(ex.label);

    const std::vector<double> lambdas =
        spec.lambda >= 0.0 ? std::vector<double>{spec.lambda} : lambda_grid();
    LinearConfig lc;
    lc.num_classes = data.scheme.num_labels;
    std::vector<LinearModel> fits;
    fits.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (spec.kind == ModelKind::JOINT) {
            fits.push_back(train_svm(X_train, y_train, lambda, lc));
        } else {
            fits.push_back(train_logreg(X_train, y_train, lambda, lc));
        }
    }
    const size_t best = select_best(fits.size(), [&](size_t i) {
        return accuracy(y_dev, predict_linear(fits[i], X_dev));
    });
    model.linear = std::move(fits[best]);
    model.spec.lambda = lambdas[best];
    for (const auto& w : model.linear.warnings) model.warnings.push_back(w);
    return model;
}

}  // namespace

TrainedModel train_sentiment_model(const ModelSpec& spec, const DatasetSplit& data) {
    spec.validate();
    require(!data.train.empty() && !data.dev.empty(), "training needs train and dev partitions");
    if (model_kind_is_neural(spec.kind)) return train_neural_kind(spec, data);
    return train_linear_kind(spec, data);
}

std::vector<int> predict_labels(const TrainedModel& model,
                                const std::vector<LabeledExample>& examples) {
    std::vector<int> out;
    out.reserve(examples.size());
    if (model_kind_is_neural(model.spec.kind)) {
        require(model.neural != nullptr, "model is missing its neural network");
        for (const auto& ex : examples) out.push_back(model.neural->predict(ex.tokens));
        return out;
    }
    const FeatureMatrix X = linear_feature_rows(model, examples);
    return predict_linear(model.linear, X);
}

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------

namespace {

std::string join_lines(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        s += p;
        s += '\n';
    }
    return s;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void add_vocab(Checkpoint& ckpt, const std::string& prefix, const Vocabulary& vocab) {
    ckpt.add_text(prefix + "_words", join_lines(vocab.words));
    Tensor counts({static_cast<int>(vocab.counts.size())});
    for (size_t i = 0; i < vocab.counts.size(); ++i) {
        counts.data[i] = static_cast<double>(vocab.counts[i]);
    }
    ckpt.add(prefix + "_counts", std::move(counts));
}

Vocabulary read_vocab(const Checkpoint& ckpt, const std::string& prefix) {
    Vocabulary v;
    v.words = split_lines(ckpt.get_text(prefix + "_words"));
    const Tensor& counts = ckpt.get(prefix + "_counts");
    require(counts.data.size() == v.words.size(), "vocabulary block size mismatch");
    for (size_t i = 0; i < v.words.size(); ++i) {
        v.counts.push_back(static_cast<int64_t>(counts.data[i]));
        v.index.emplace(v.words[i], static_cast<int>(i));
    }
    return v;
}

std::string meta_string(const TrainedModel& model) {
    std::ostringstream os;
    const ModelSpec& s = model.spec;
    os << "kind=" << model_kind_name(s.kind) << '\n'
       << "dim=" << s.dim << '\n'
       << "hidden=" << s.hidden << '\n'
       << "epochs=" << s.epochs << '\n'
       << "lambda=" << s.lambda << '\n'
       << "dropout=" << s.dropout << '\n'
       << "filters=" << s.filters << '\n'
       << "seed=" << s.seed << '\n'
       << "num_labels=" << model.scheme.num_labels << '\n'
       << "dataset=" << model.dataset_name << '\n'
       << "loss=" << (model.linear.loss == LinearLoss::hinge ? "hinge" : "logistic") << '\n';
    if (model.neural) {
        os << "cnn_len=" << model.neural->cnn_len << '\n'
           << "oov_seed=" << model.neural->oov_seed << '\n';
    } else {
        os << "oov_seed=" << model.embeddings.oov_seed << '\n';
    }
    return os.str();
}

std::string meta_value(const std::vector<std::string>& lines, const std::string& key) {
    for (const auto& line : lines) {
        if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 &&
            line[key.size()] == '=') {
            return line.substr(key.size() + 1);
        }
    }
    fail("model checkpoint is missing meta key '" + key + "'");
}

void add_dense(Checkpoint& ckpt, const std::string& prefix, const Dense& d) {
    ckpt.add(prefix + "_W", d.W.value);
    ckpt.add(prefix + "_b", d.b.value);
}

void read_dense(const Checkpoint& ckpt, const std::string& prefix, Dense& d, Activation act) {
    d.W = Parameter(ckpt.get(prefix + "_W"));
    d.b = Parameter(ckpt.get(prefix + "_b"));
    d.act = act;
}

void add_lstm(Checkpoint& ckpt, const std::string& prefix, const LstmParams& p) {
    ckpt.add(prefix + "_Wx", p.Wx.value);
    ckpt.add(prefix + "_Wh", p.Wh.value);
    ckpt.add(prefix + "_b", p.b.value);
}

void read_lstm(const Checkpoint& ckpt, const std::string& prefix, LstmParams& p) {
    p.Wx = Parameter(ckpt.get(prefix + "_Wx"));
    p.Wh = Parameter(ckpt.get(prefix + "_Wh"));
    p.b = Parameter(ckpt.get(prefix + "_b"));
    p.hidden = p.Wh.value.cols();
    p.input = p.Wx.value.cols();
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    Checkpoint ckpt;
    ckpt.add_text("meta", meta_string(model));
    ckpt.add_text("scheme_names", join_lines(model.scheme.names));
    ckpt.add_text("warnings", join_lines(model.warnings));

    const ModelKind kind = model.spec.kind;
    if (model_kind_is_neural(kind)) {
        const NeuralClassifier& net = *model.neural;
        add_vocab(ckpt, "nn_vocab", net.vocab);
        ckpt.add("nn_emb", net.emb.value);
        if (kind == ModelKind::LSTM) {
            add_lstm(ckpt, "lstm", net.lstm);
        } else if (kind == ModelKind::BILSTM) {
            add_lstm(ckpt, "bilstm_fwd", net.bilstm.fwd);
            add_lstm(ckpt, "bilstm_bwd", net.bilstm.bwd);
        } else {
            for (const auto& g : net.conv.groups) {
                const std::string p = "conv" + std::to_string(g.width);
                ckpt.add(p + "_W", g.W.value);
                ckpt.add(p + "_b", g.b.value);
            }
        }
        add_dense(ckpt, "dense", net.dense);
        add_dense(ckpt, "out", net.out);
    } else {
        ckpt.add("linear_W", model.linear.W);
        ckpt.add("linear_b", model.linear.b);
        if (kind == ModelKind::BOW) {
            add_vocab(ckpt, "bow_vocab", model.bow_vocab);
        } else {
            add_vocab(ckpt, "emb_vocab", model.embeddings.vocab);
            Tensor e({static_cast<int>(model.embeddings.vocab.size()), model.embeddings.dim});
            e.data = model.embeddings.data;
            ckpt.add("emb_data", std::move(e));
        }
    }
    save_checkpoint(ckpt, path);
}

TrainedModel load_model(const std::string& path) {
    const Checkpoint ckpt = load_checkpoint(path);
    const auto meta = split_lines(ckpt.get_text("meta"));

    TrainedModel model;
    ModelSpec& s = model.spec;
    s.kind = model_kind_from_name(meta_value(meta, "kind"));
    s.dim = std::stoi(meta_value(meta, "dim"));
    s.hidden = std::stoi(meta_value(meta, "hidden"));
    s.epochs = std::stoi(meta_value(meta, "epochs"));
    s.lambda = std::stod(meta_value(meta, "lambda"));
    s.dropout = std::stod(meta_value(meta, "dropout"));
    s.filters = std::stoi(meta_value(meta, "filters"));
    s.seed = std::stoull(meta_value(meta, "seed"));
    model.dataset_name = meta_value(meta, "dataset");
    model.scheme.num_labels = std::stoi(meta_value(meta, "num_labels"));
    model.scheme.names = split_lines(ckpt.get_text("scheme_names"));
    model.warnings = split_lines(ckpt.get_text("warnings"));

    if (model_kind_is_neural(s.kind)) {
        auto net = std::make_shared<NeuralClassifier>();
        net->kind = s.kind;
        net->dim = s.dim;
        net->hidden = s.hidden;
        net->num_classes = model.scheme.num_labels;
        net->filters = s.filters;
        net->dropout_p = s.dropout;
        net->oov_seed = std::stoull(meta_value(meta, "oov_seed"));
        net->vocab = read_vocab(ckpt, "nn_vocab");
        net->emb = Parameter(ckpt.get("nn_emb"));
        if (s.kind == ModelKind::LSTM) {
            read_lstm(ckpt, "lstm", net->lstm);
        } else if (s.kind == ModelKind::BILSTM) {
            read_lstm(ckpt, "bilstm_fwd", net->bilstm.fwd);
            read_lstm(ckpt, "bilstm_bwd", net->bilstm.bwd);
        } else {
            net->cnn_len = std::stoi(meta_value(meta, "cnn_len"));
            net->conv.input_dim = s.dim;
            net->conv.act = Activation::relu;
            for (int w : {2, 3, 4}) {
                ConvPoolParams::Group g;
                g.width = w;
                const std::string p = "conv" + std::to_string(w);
                g.W = Parameter(ckpt.get(p + "_W"));
                g.b = Parameter(ckpt.get(p + "_b"));
                net->conv.groups.push_back(std::move(g));
            }
        }
        const Activation dense_act =
            s.kind == ModelKind::CNN ? Activation::relu : Activation::tanh_fn;
        read_dense(ckpt, "dense", net->dense, dense_act);
        read_dense(ckpt, "out", net->out, Activation::identity);
        model.neural = std::move(net);
    } else {
        model.linear.W = ckpt.get("linear_W");
        model.linear.b = ckpt.get("linear_b");
        model.linear.lambda = s.lambda;
        model.linear.loss =
            meta_value(meta, "loss") == "hinge" ? LinearLoss::hinge : LinearLoss::logistic;
        if (s.kind == ModelKind::BOW) {
            model.bow_vocab = read_vocab(ckpt, "bow_vocab");
        } else {
            model.embeddings.vocab = read_vocab(ckpt, "emb_vocab");
            const Tensor& e = ckpt.get("emb_data");
            model.embeddings.dim = e.cols();
            model.embeddings.data = e.data;
            model.embeddings.oov_seed = std::stoull(meta_value(meta, "oov_seed"));
        }
    }
    return model;
}

}  // namespace senti
