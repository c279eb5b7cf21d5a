#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gmrobust {

/// Dense row-major array of doubles with an explicit shape.
///
/// Every dimension is positive and every stored value is finite; the
/// constructor enforces both. Tensors have value semantics and no mutating
/// accessors, so a constructed tensor can be shared freely across threads.
class Tensor {
public:
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor filled(std::vector<std::size_t> shape, double value);
    static Tensor identity(std::size_t n);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::span<const double> values() const noexcept { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double at(std::size_t row, std::size_t col) const;

    // Only meaningful for rank-2 tensors.
    std::size_t rows() const;
    std::size_t cols() const;

    bool is_vector() const noexcept { return shape_.size() == 1; }
    bool is_matrix() const noexcept { return shape_.size() == 2; }

    std::string shape_string() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

enum class Activation { relu, tanh, sigmoid, identity };

std::string_view to_string(Activation kind);
/// Throws ConfigError for names other than relu/tanh/sigmoid/identity.
Activation activation_from_string(std::string_view name);

double activate(Activation kind, double v);
/// d activate / dv at the pre-activation value v; relu'(0) is 0.
double activate_derivative(Activation kind, double v);
/// Global Lipschitz constant of the scalar activation.
double activation_lipschitz(Activation kind);

/// Wx + b. Throws DimensionError naming the operand that does not fit.
Tensor affine(const Tensor& weights, const Tensor& bias, const Tensor& x);
Tensor activate(Activation kind, const Tensor& x);

/// Allocation-free kernel behind `affine`: out = Wx + b, accumulated left to
/// right over the columns of W. Shapes are the caller's responsibility.
void affine_into(const Tensor& weights, const Tensor& bias,
                 std::span<const double> x, std::span<double> out) noexcept;
void activate_inplace(Activation kind, std::span<double> values) noexcept;

/// Throws NumericError if any value is NaN or infinite; `what` names the
/// producing operation.
void require_finite(std::span<const double> values, std::string_view what);

double linf_distance(std::span<const double> a, std::span<const double> b);

} // namespace gmrobust
