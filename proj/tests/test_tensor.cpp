#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

namespace gmrobust {
namespace {

using testing::TestRng;

TEST(Tensor, RejectsShapeDataMismatch) {
    EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), DimensionError);
    EXPECT_THROW(Tensor({0}, {}), DimensionError);
    EXPECT_THROW(Tensor({}, {1.0}), DimensionError);
}

TEST(Tensor, RejectsNonFiniteValues) {
    EXPECT_THROW(Tensor::vector({1.0, std::numeric_limits<double>::quiet_NaN()}), NumericError);
    EXPECT_THROW(Tensor::vector({std::numeric_limits<double>::infinity()}), NumericError);
}

TEST(Tensor, MatrixAccessors) {
    const Tensor m = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m.at(1, 2), 6.0);
    EXPECT_EQ(m.shape_string(), "[2x3]");
    EXPECT_THROW(Tensor::vector({1.0}).rows(), DimensionError);
}

TEST(Affine, IdentityCase) {
    const Tensor y = affine(Tensor::identity(2), Tensor::zeros({2}), Tensor::vector({3, -1}));
    EXPECT_EQ(y, Tensor::vector({3, -1}));
}

TEST(Affine, HandArithmetic) {
    const Tensor y = affine(Tensor::matrix(2, 2, {1, 2, 3, 4}), Tensor::vector({1, 1}), Tensor::vector({1, 1}));
    EXPECT_EQ(y, Tensor::vector({4, 8}));
}

TEST(Affine, ZeroWeightsReturnBias) {
    TestRng rng(3);
    for (int i = 0; i < 10; ++i) {
        const Tensor y = affine(Tensor::zeros({2, 2}), Tensor::vector({5, 6}), Tensor::vector(rng.vec(2, -100, 100)));
        EXPECT_EQ(y, Tensor::vector({5, 6}));
    }
}

TEST(Affine, ShapeErrorsNameTheOperand) {
    const Tensor w = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    try {
        affine(w, Tensor::vector({1, 2, 3}), Tensor::vector({1, 2, 3}));
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("bias"), std::string::npos);
    }
    try {
        affine(w, Tensor::vector({1, 2}), Tensor::vector({1, 2}));
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("input x"), std::string::npos);
    }
    EXPECT_THROW(affine(Tensor::vector({1, 2}), Tensor::vector({1}), Tensor::vector({1})), DimensionError);
}

TEST(Affine, OverflowIsReported) {
    EXPECT_THROW(affine(Tensor::matrix(1, 2, {1e308, 1e308}), Tensor::vector({0}), Tensor::vector({10, 10})),
                 NumericError);
}

TEST(Affine, MatchesNaiveReferenceOnRandomShapes) {
    TestRng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + rng.index(12);
        const std::size_t cols = 1 + rng.index(12);
        const auto w = rng.vec(rows * cols, -3, 3);
        const auto b = rng.vec(rows, -1, 1);
        const auto x = rng.vec(cols, -5, 5);
        const Tensor y = affine(Tensor::matrix(rows, cols, w), Tensor::vector(b), Tensor::vector(x));
        const auto ref = testing::naive_affine(w, rows, cols, b, x);
        double scale = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            scale = std::abs(b[r]);
            for (std::size_t c = 0; c < cols; ++c) scale += std::abs(w[r * cols + c] * x[c]);
            EXPECT_LE(std::abs(y[r] - ref[r]), 1e-12 * std::max(scale, 1e-300)) << "trial " << trial;
        }
    }
}

TEST(Activate, Examples) {
    EXPECT_EQ(activate(Activation::relu, Tensor::vector({-1, 0, 2})), Tensor::vector({0, 0, 2}));
    EXPECT_EQ(activate(Activation::identity, Tensor::vector({7, -7})), Tensor::vector({7, -7}));
    EXPECT_EQ(activate(Activation::sigmoid, Tensor::vector({0})), Tensor::vector({0.5}));
}

TEST(Activate, ShapePreserved) {
    const Tensor m = Tensor::matrix(2, 2, {-1, 2, -3, 4});
    EXPECT_EQ(activate(Activation::tanh, m).shape(), m.shape());
}

TEST(Activate, IdempotentForReluAndIdentity) {
    TestRng rng(5);
    for (Activation k : {Activation::relu, Activation::identity}) {
        for (int i = 0; i < 50; ++i) {
            const Tensor x = Tensor::vector(rng.vec(1 + rng.index(8), -10, 10));
            const Tensor once = activate(k, x);
            EXPECT_EQ(activate(k, once), once);
        }
    }
}

TEST(Activate, MonotoneNondecreasing) {
    TestRng rng(9);
    for (Activation k : {Activation::relu, Activation::tanh, Activation::sigmoid, Activation::identity}) {
        for (int i = 0; i < 500; ++i) {
            double a = rng.uniform(-50, 50);
            double b = rng.uniform(-50, 50);
            if (a > b) std::swap(a, b);
            EXPECT_LE(activate(k, a), activate(k, b)) << to_string(k);
        }
    }
}

TEST(Activate, SigmoidStableForLargeInputs) {
    EXPECT_EQ(activate(Activation::sigmoid, -1000.0), 0.0);
    EXPECT_EQ(activate(Activation::sigmoid, 1000.0), 1.0);
}

TEST(Activate, UnsupportedKindIsConfigurationError) {
    EXPECT_THROW(activation_from_string("softmax"), ConfigError);
    EXPECT_THROW(activate(static_cast<Activation>(42), 1.0), ConfigError);
    for (Activation k : {Activation::relu, Activation::tanh, Activation::sigmoid, Activation::identity}) {
        EXPECT_EQ(activation_from_string(to_string(k)), k);
    }
}

TEST(Activate, DerivativesMatchDefinitions) {
    EXPECT_EQ(activate_derivative(Activation::relu, 0.0), 0.0);
    EXPECT_EQ(activate_derivative(Activation::relu, 2.0), 1.0);
    EXPECT_EQ(activate_derivative(Activation::relu, -2.0), 0.0);
    EXPECT_DOUBLE_EQ(activate_derivative(Activation::sigmoid, 0.0), 0.25);
    EXPECT_DOUBLE_EQ(activate_derivative(Activation::tanh, 0.0), 1.0);
    EXPECT_EQ(activate_derivative(Activation::identity, 123.0), 1.0);
}

TEST(LinfDistance, MaxAbsoluteDifference) {
    const std::vector<double> a{1, -2, 3};
    const std::vector<double> b{1.5, 2, 3};
    EXPECT_EQ(linf_distance(a, b), 4.0);
    EXPECT_THROW(linf_distance(a, std::vector<double>{1}), DimensionError);
}

} // namespace
} // namespace gmrobust
