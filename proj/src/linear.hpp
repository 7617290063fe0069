#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tensor.hpp"

namespace senti {

// Sparse feature rows shared by all linear pipelines. Bag-of-words rows stay
// genuinely sparse; dense rows (embedding means and the like) are stored with
// every index present.
struct FeatureRow {
    std::vector<std::pair<int, double>> entries;  // (index, value), index ascending
};

struct FeatureMatrix {
    int dim = 0;
    std::vector<FeatureRow> rows;

    size_t size() const { return rows.size(); }
    void add_dense_row(std::span<const double> values);
    void add_sparse_row(std::vector<std::pair<int, double>> entries);
};

enum class LinearLoss { logistic, hinge };

struct LinearModel {
    Tensor W;  // C x d
    Tensor b;  // C
    double lambda = 0.0;
    LinearLoss loss = LinearLoss::logistic;
    std::vector<std::string> warnings;

    int num_classes() const { return W.rows(); }
    int feature_dim() const { return W.cols(); }
};

struct LinearConfig {
    int max_iters = 500;
    double tol = 1e-6;    // stop when the gradient infinity-norm drops below this
    double lr0 = 1.0;     // initial full-batch step size
    int num_classes = 0;  // 0 = infer as max(label) + 1 (at least 2)
};

// Multinomial logistic regression: minimizes mean cross-entropy plus
// (lambda/2)||W||^2 (bias unregularized) by full-batch gradient descent with
// step halving on non-decrease, so the objective never increases.
LinearModel train_logreg(const FeatureMatrix& features, const std::vector<int>& labels,
                         double lambda, const LinearConfig& config = {});

// One-vs-rest linear SVM with the standard hinge, same regularization and
// descent scheme (subgradients at kinks).
LinearModel train_svm(const FeatureMatrix& features, const std::vector<int>& labels,
                      double lambda, const LinearConfig& config = {});

// Per-class scores W x + b for one row.
std::vector<double> linear_scores(const LinearModel& model, const FeatureRow& row);

// Argmax class per row; exact ties go to the lowest class index.
std::vector<int> predict_linear(const LinearModel& model, const FeatureMatrix& features);

}  // namespace senti
