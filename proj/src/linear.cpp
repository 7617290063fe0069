#include "linear.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "error.hpp"

namespace senti {

void FeatureMatrix::add_dense_row(std::span<const double> values) {
    require(dim == 0 || static_cast<int>(values.size()) == dim,
            "feature row dimension mismatch");
    dim = static_cast<int>(values.size());
    FeatureRow row;
    row.entries.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        row.entries.emplace_back(static_cast<int>(i), values[i]);
    }
    rows.push_back(std::move(row));
}

void FeatureMatrix::add_sparse_row(std::vector<std::pair<int, double>> entries) {
    std::sort(entries.begin(), entries.end());
    for (const auto& [idx, _] : entries) {
        require(idx >= 0 && (dim == 0 || idx < dim), "sparse feature index out of range");
    }
    rows.push_back(FeatureRow{std::move(entries)});
}

namespace {

struct Problem {
    const FeatureMatrix& X;
    const std::vector<int>& y;
    int C;
    double lambda;
};

std::vector<double> row_scores(const Tensor& W, const Tensor& b, const FeatureRow& row) {
    const int C = W.rows();
    std::vector<double> s(C);
    for (int c = 0; c < C; ++c) {
        double v = b(c);
        const double* wr = W.row_ptr(c);
        for (const auto& [idx, val] : row.entries) v += wr[idx] * val;
        s[c] = v;
    }
    return s;
}

double logreg_objective(const Problem& p, const Tensor& W, const Tensor& b) {
    const size_t n = p.X.size();
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        auto s = row_scores(W, b, p.X.rows[i]);
        const double mx = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        for (double v : s) z += std::exp(v - mx);
        total += -(s[p.y[i]] - mx - std::log(z));
    }
    double reg = 0.0;
    for (double w : W.data) reg += w * w;
    return total / n + 0.5 * p.lambda * reg;
}

void logreg_gradient(const Problem& p, const Tensor& W, const Tensor& b, Tensor& gW,
                     Tensor& gb) {
    gW.fill(0.0);
    gb.fill(0.0);
    const size_t n = p.X.size();
    const double inv_n = 1.0 / n;
    for (size_t i = 0; i < n; ++i) {
        auto s = row_scores(W, b, p.X.rows[i]);
        const double mx = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        for (double& v : s) {
            v = std::exp(v - mx);
            z += v;
        }
        for (int c = 0; c < p.C; ++c) {
            const double coef = (s[c] / z - (c == p.y[i] ? 1.0 : 0.0)) * inv_n;
            if (coef == 0.0) continue;
            gb(c) += coef;
            double* gw = gW.row_ptr(c);
            for (const auto& [idx, val] : p.X.rows[i].entries) gw[idx] += coef * val;
        }
    }
    for (size_t k = 0; k < W.data.size(); ++k) gW.data[k] += p.lambda * W.data[k];
}

double hinge_objective(const Problem& p, const Tensor& W, const Tensor& b) {
    const size_t n = p.X.size();
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        auto s = row_scores(W, b, p.X.rows[i]);
        for (int c = 0; c < p.C; ++c) {
            const double t = c == p.y[i] ? 1.0 : -1.0;
            total += std::max(0.0, 1.0 - t * s[c]);
        }
    }
    double reg = 0.0;
    for (double w : W.data) reg += w * w;
    return total / n + 0.5 * p.lambda * reg;
}

void hinge_gradient(const Problem& p, const Tensor& W, const Tensor& b, Tensor& gW, Tensor& gb) {
    gW.fill(0.0);
    gb.fill(0.0);
    const size_t n = p.X.size();
    const double inv_n = 1.0 / n;
    for (size_t i = 0; i < n; ++i) {
        auto s = row_scores(W, b, p.X.rows[i]);
        for (int c = 0; c < p.C; ++c) {
            const double t = c == p.y[i] ? 1.0 : -1.0;
            if (t * s[c] >= 1.0) continue;  // margin satisfied: zero subgradient
            const double coef = -t * inv_n;
            gb(c) += coef;
            double* gw = gW.row_ptr(c);
            for (const auto& [idx, val] : p.X.rows[i].entries) gw[idx] += coef * val;
        }
    }
    for (size_t k = 0; k < W.data.size(); ++k) gW.data[k] += p.lambda * W.data[k];
}

using ObjectiveFn = double (*)(const Problem&, const Tensor&, const Tensor&);
using GradientFn = void (*)(const Problem&, const Tensor&, const Tensor&, Tensor&, Tensor&);

LinearModel train_descent(const FeatureMatrix& features, const std::vector<int>& labels,
                          double lambda, const LinearConfig& config, LinearLoss loss,
                          ObjectiveFn objective, GradientFn gradient) {
    require(!features.rows.empty(), "linear training needs at least one example");
    require(features.rows.size() == labels.size(), "feature/label count mismatch");
    require(lambda >= 0.0, "lambda must be >= 0");
    int C = config.num_classes;
    std::set<int> distinct(labels.begin(), labels.end());
    require(*distinct.begin() >= 0, "labels must be non-negative");
    if (C == 0) C = std::max(2, *distinct.rbegin() + 1);
    require(*distinct.rbegin() < C, "label out of range for the class count");

    LinearModel model;
    model.W = Tensor::zeros({C, features.dim});
    model.b = Tensor::zeros({C});
    model.lambda = lambda;
    model.loss = loss;
    if (distinct.size() == 1) {
        model.warnings.push_back("training data contains a single class (" +
                                 std::to_string(*distinct.begin()) +
                                 "); the model will always predict it");
    }

    const Problem problem{features, labels, C, lambda};
    Tensor gW = Tensor::zeros({C, features.dim});
    Tensor gb = Tensor::zeros({C});
    double J = objective(problem, model.W, model.b);
    double lr = config.lr0;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        gradient(problem, model.W, model.b, gW, gb);
        double gmax = 0.0;
        for (double g : gW.data) gmax = std::max(gmax, std::abs(g));
        for (double g : gb.data) gmax = std::max(gmax, std::abs(g));
        if (gmax < config.tol) break;

        bool accepted = false;
        while (lr >= 1e-15) {
            Tensor Wt = model.W;
            Tensor bt = model.b;
            for (size_t k = 0; k < Wt.data.size(); ++k) Wt.data[k] -= lr * gW.data[k];
            for (size_t k = 0; k < bt.data.size(); ++k) bt.data[k] -= lr * gb.data[k];
            const double Jt = objective(problem, Wt, bt);
            if (Jt <= J) {
                model.W = std::move(Wt);
                model.b = std::move(bt);
                J = Jt;
                lr = std::min(lr * 1.25, config.lr0 * 16.0);
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) break;  // no descent step exists at representable sizes
    }
    model.W.check_finite("linear weights");
    model.b.check_finite("linear bias");
    return model;
}

}  // namespace

LinearModel train_logreg(const FeatureMatrix& features, const std::vector<int>& labels,
                         double lambda, const LinearConfig& config) {
    return train_descent(features, labels, lambda, config, LinearLoss::logistic,
                         logreg_objective, logreg_gradient);
}

LinearModel train_svm(const FeatureMatrix& features, const std::vector<int>& labels,
                      double lambda, const LinearConfig& config) {
    return train_descent(features, labels, lambda, config, LinearLoss::hinge, hinge_objective,
                         hinge_gradient);
}

std::vector<double> linear_scores(const LinearModel& model, const FeatureRow& row) {
    for (const auto& [idx, _] : row.entries) {
        require(idx >= 0 && idx < model.feature_dim(), "feature index out of model range");
    }
    return row_scores(model.W, model.b, row);
}

std::vector<int> predict_linear(const LinearModel& model, const FeatureMatrix& features) {
    require(features.dim == 0 || features.dim == model.feature_dim(),
            "feature dimension does not match the model");
    std::vector<int> out;
    out.reserve(features.size());
    for (const auto& row : features.rows) {
        const auto s = linear_scores(model, row);
        int best = 0;
        for (int c = 1; c < model.num_classes(); ++c) {
            if (s[c] > s[best]) best = c;  // strict: ties keep the lowest index
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace senti
