#include "gmrobust/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gmrobust/errors.hpp"

namespace gmrobust {

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty()) {
        throw DimensionError("tensor shape must have at least one dimension");
    }
    for (std::size_t d : shape_) {
        if (d == 0) {
            throw DimensionError("tensor dimensions must be positive, got shape " + shape_string());
        }
    }
    const std::size_t expected =
        std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (expected != data_.size()) {
        throw DimensionError("tensor of shape " + shape_string() + " needs " +
                             std::to_string(expected) + " values, got " +
                             std::to_string(data_.size()));
    }
    require_finite(data_, "tensor construction");
}

Tensor Tensor::vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    return filled(std::move(shape), 0.0);
}

Tensor Tensor::filled(std::vector<std::size_t> shape, double value) {
    const std::size_t n =
        std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::identity(std::size_t n) {
    std::vector<double> values(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        values[i * n + i] = 1.0;
    }
    return matrix(n, n, std::move(values));
}

double Tensor::at(std::size_t row, std::size_t col) const {
    return data_[row * cols() + col];
}

std::size_t Tensor::rows() const {
    if (!is_matrix()) {
        throw DimensionError("rows() on tensor of shape " + shape_string());
    }
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (!is_matrix()) {
        throw DimensionError("cols() on tensor of shape " + shape_string());
    }
    return shape_[1];
}

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i > 0) {
            s += "x";
        }
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

std::string_view to_string(Activation kind) {
    switch (kind) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
    }
    throw ConfigError("unsupported activation kind");
}

Activation activation_from_string(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity") return Activation::identity;
    throw ConfigError("unsupported activation '" + std::string(name) + "'");
}

namespace {

double sigmoid(double v) {
    // Split by sign so exp never overflows.
    if (v >= 0.0) {
        return 1.0 / (1.0 + std::exp(-v));
    }
    const double e = std::exp(v);
    return e / (1.0 + e);
}

} // namespace

double activate(Activation kind, double v) {
    switch (kind) {
    case Activation::relu: return v > 0.0 ? v : 0.0;
    case Activation::tanh: return std::tanh(v);
    case Activation::sigmoid: return sigmoid(v);
    case Activation::identity: return v;
    }
    throw ConfigError("unsupported activation kind");
}

double activate_derivative(Activation kind, double v) {
    switch (kind) {
    case Activation::relu: return v > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
        const double t = std::tanh(v);
        return 1.0 - t * t;
    }
    case Activation::sigmoid: {
        const double s = sigmoid(v);
        return s * (1.0 - s);
    }
    case Activation::identity: return 1.0;
    }
    throw ConfigError("unsupported activation kind");
}

double activation_lipschitz(Activation kind) {
    switch (kind) {
    case Activation::relu:
    case Activation::tanh:
    case Activation::identity: return 1.0;
    case Activation::sigmoid: return 0.25;
    }
    throw ConfigError("unsupported activation kind");
}

Tensor affine(const Tensor& weights, const Tensor& bias, const Tensor& x) {
    if (!weights.is_matrix()) {
        throw DimensionError("affine: weights W must be a matrix, got shape " + weights.shape_string());
    }
    if (!bias.is_vector() || bias.size() != weights.rows()) {
        throw DimensionError("affine: bias b of shape " + bias.shape_string() +
                             " does not match W of shape " + weights.shape_string());
    }
    if (!x.is_vector() || x.size() != weights.cols()) {
        throw DimensionError("affine: input x of shape " + x.shape_string() +
                             " does not match W of shape " + weights.shape_string());
    }
    std::vector<double> out(weights.rows());
    affine_into(weights, bias, x.values(), out);
    require_finite(out, "affine");
    return Tensor::vector(std::move(out));
}

Tensor activate(Activation kind, const Tensor& x) {
    std::vector<double> out(x.values().begin(), x.values().end());
    activate_inplace(kind, out);
    return Tensor(x.shape(), std::move(out));
}

void affine_into(const Tensor& weights, const Tensor& bias,
                 std::span<const double> x, std::span<double> out) noexcept {
    const std::size_t rows = weights.shape()[0];
    const std::size_t cols = weights.shape()[1];
    const double* w = weights.values().data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = w + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += row[c] * x[c];
        }
        out[r] = acc + bias[r];
    }
}

void activate_inplace(Activation kind, std::span<double> values) noexcept {
    switch (kind) {
    case Activation::identity: return;
    case Activation::relu:
        for (double& v : values) v = v > 0.0 ? v : 0.0;
        return;
    case Activation::tanh:
        for (double& v : values) v = std::tanh(v);
        return;
    case Activation::sigmoid:
        for (double& v : values) v = sigmoid(v);
        return;
    }
}

void require_finite(std::span<const double> values, std::string_view what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NumericError(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("linf_distance: operand sizes " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " differ");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace gmrobust
