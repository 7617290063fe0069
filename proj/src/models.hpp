#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conv.hpp"
#include "dataset.hpp"
#include "embeddings.hpp"
#include "joint.hpp"
#include "linear.hpp"
#include "lstm.hpp"
#include "nn.hpp"
#include "retrofit.hpp"

namespace senti {

enum class ModelKind { BOW, AVE, RETROFIT, JOINT, LSTM, BILSTM, CNN };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);  // errors on unknown
bool model_kind_is_neural(ModelKind kind);  // LSTM / BILSTM / CNN

struct ModelSpec {
    ModelKind kind = ModelKind::BOW;
    int dim = 50;  // embedding dimensionality (ignored by BOW)

    // Embedding source: a vectors file, or empty to train skip-gram vectors
    // on the dataset's training split.
    std::string embeddings_path;
    std::string lexicon_path;         // required for RETROFIT
    std::string distant_corpus_path;  // JOINT; empty = derive polarity from gold labels

    // Hyperparameters. Sentinels mean "tune on dev": hidden 0 tunes over
    // {50, 100, 200}; epochs -1 uses early stopping (patience 5, cap 30);
    // lambda < 0 tunes over {1e-4, 1e-3, 1e-2, 1e-1, 1}. epochs 0 is literal:
    // the model stays at its random initialization.
    int hidden = 0;
    int epochs = -1;
    double lambda = -1.0;
    double dropout = 0.5;
    int filters = 32;  // CNN feature maps per filter width
    uint64_t seed = 1;

    // Retrofitting settings (RETROFIT kind only).
    int retrofit_iterations = 10;

    // Joint-training settings (JOINT kind only).
    double joint_alpha = 0.5;
    int joint_window = 3;
    int joint_hidden = 20;
    int joint_epochs = 5;
    double joint_learning_rate = 0.025;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Feature builders
// ---------------------------------------------------------------------------

// Sparse token counts over the training vocabulary; OOV tokens ignored.
FeatureRow bow_features(const LabeledExample& example, const Vocabulary& vocab);

// Mean of per-token lookup vectors (OOV policy included). Errors on empty.
std::vector<double> ave_features(const std::vector<std::string>& tokens,
                                 const EmbeddingMatrix& embeddings);

// Coordinate-wise max, min, mean over token vectors, concatenated.
std::vector<double> minmaxavg_features(const std::vector<std::string>& tokens,
                                       const EmbeddingMatrix& embeddings);

// ---------------------------------------------------------------------------
// Neural classifier (LSTM / BiLSTM / CNN share the skeleton)
// ---------------------------------------------------------------------------

struct NeuralClassifier {
    ModelKind kind = ModelKind::LSTM;
    int dim = 0, hidden = 0, num_classes = 0, filters = 0;
    int cnn_len = 0;  // fixed input length for CNN (train max, >= 4)
    double dropout_p = 0.5;
    uint64_t oov_seed = 1;
    Vocabulary vocab;

    Parameter emb;  // |vocab| x dim, fine-tuned during training
    LstmParams lstm;
    BiLstmParams bilstm;
    ConvPoolParams conv;
    Dense dense;  // penultimate layer (tanh for recurrent kinds, relu for CNN)
    Dense out;    // logits head

    void init(ModelKind k, const EmbeddingMatrix& base, const Vocabulary& train_vocab,
              int hidden_dim, int classes, int cnn_filters, int cnn_fixed_len, double dropout,
              uint64_t seed, Rng& rng);
    std::vector<Parameter*> parameters();

    // Token-vector matrix: in-vocabulary rows come from `emb`, others from the
    // deterministic OOV policy. For CNN the matrix is padded/truncated to
    // cnn_len rows and true_len reports the unpadded length.
    Tensor input_matrix(const std::vector<std::string>& tokens, std::vector<int>& ids,
                        int& true_len) const;

    Tensor logits(const std::vector<std::string>& tokens) const;  // inference mode
    int predict(const std::vector<std::string>& tokens) const;    // argmax, low-index ties
};

// ---------------------------------------------------------------------------
// Trained model: uniform train/predict surface over the seven systems
// ---------------------------------------------------------------------------

struct TrainedModel {
    ModelSpec spec;  // concretized: tuned hidden/epochs/lambda filled in
    LabelScheme scheme;
    std::string dataset_name;
    std::vector<std::string> warnings;

    // Linear pipelines (BOW / AVE / RETROFIT / JOINT).
    LinearModel linear;
    Vocabulary bow_vocab;        // BOW feature space
    EmbeddingMatrix embeddings;  // feature source for AVE / RETROFIT / JOINT

    // Neural pipelines (LSTM / BILSTM / CNN).
    std::shared_ptr<NeuralClassifier> neural;
};

// Kind dispatch per the benchmark protocol; deterministic given spec.seed.
TrainedModel train_sentiment_model(const ModelSpec& spec, const DatasetSplit& data);

std::vector<int> predict_labels(const TrainedModel& model,
                                const std::vector<LabeledExample>& examples);

// Checkpoint round-trip (shared named-tensor-block container).
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// Loads `embeddings_path` or trains skip-gram vectors on the training split.
EmbeddingMatrix resolve_base_embeddings(const ModelSpec& spec, const DatasetSplit& data);

// Distant polarity from gold labels when no distant corpus is supplied:
// labels below the scheme midpoint map to -1, above to +1, the midpoint
// class is dropped.
std::vector<DistantExample> distant_from_gold(const DatasetSplit& data);

// The dev-tuning grids.
const std::vector<int>& hidden_grid();      // {50, 100, 200}
const std::vector<double>& lambda_grid();   // {1e-4, 1e-3, 1e-2, 1e-1, 1}

}  // namespace senti
