#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace senti {

// Dense row-major tensor of 64-bit floats. Rank is dynamic but in practice
// everything here is a vector or a matrix.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(static_cast<size_t>(numel_of(shape)), 0.0);
    }

    static int64_t numel_of(const std::vector<int>& s) {
        int64_t n = 1;
        for (int d : s) {
            require(d >= 0, "tensor dimensions must be non-negative");
            n *= d;
        }
        return n;
    }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    static Tensor vector(std::vector<double> values) {
        Tensor t;
        t.shape = {static_cast<int>(values.size())};
        t.data = std::move(values);
        return t;
    }

    static Tensor uniform(std::vector<int> s, Rng& rng, double lo, double hi) {
        Tensor t(std::move(s));
        for (auto& x : t.data) x = rng.uniform(lo, hi);
        return t;
    }

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int rows() const { return shape.empty() ? 0 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& operator()(int i) { return data[static_cast<size_t>(i)]; }
    double operator()(int i) const { return data[static_cast<size_t>(i)]; }
    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols() + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols() + j]; }

    double* row_ptr(int i) { return data.data() + static_cast<size_t>(i) * cols(); }
    const double* row_ptr(int i) const { return data.data() + static_cast<size_t>(i) * cols(); }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    void check_finite(const char* what) const {
        for (double x : data) require(std::isfinite(x), std::string(what) + ": non-finite value");
    }
};

// Trainable tensor: value plus an accumulated gradient of the same shape.
struct Parameter {
    Tensor value;
    Tensor grad;
    bool trainable = true;

    Parameter() = default;
    explicit Parameter(Tensor v) : value(std::move(v)), grad(Tensor::zeros(value.shape)) {}

    void zero_grad() { grad.fill(0.0); }
};

// Glorot-style uniform initialization bound for a fan-in/fan-out pair.
inline double glorot_bound(int fan_in, int fan_out) {
    return std::sqrt(6.0 / (fan_in + fan_out));
}

}  // namespace senti
