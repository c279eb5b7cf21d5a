#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gmrobust/gmrobust.hpp"

namespace gmrobust::testing {

inline std::filesystem::path fixture_dir() {
    return GMROBUST_FIXTURE_DIR;
}

inline Network fixture(const std::string& name) {
    return load_model_file(fixture_dir() / name);
}

inline Network composed_fixture(const std::string& generator, const std::string& classifier) {
    return compose(fixture(generator), fixture(classifier));
}

/// Every model file checked into tests/fixtures.
inline std::vector<std::filesystem::path> all_fixture_files() {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(fixture_dir())) {
        if (entry.path().extension() == ".nnw") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Standard normal CDF from erfc.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Reference matrix-vector product in extended precision, summing right to left.
inline std::vector<double> naive_affine(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                                        const std::vector<double>& b, const std::vector<double>& x) {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        long double acc = b[r];
        for (std::size_t c = cols; c-- > 0;) {
            acc += static_cast<long double>(w[r * cols + c]) * static_cast<long double>(x[c]);
        }
        out[r] = static_cast<double>(acc);
    }
    return out;
}

/// Scalar activation written out from its definition.
inline double reference_activation(Activation a, double v) {
    switch (a) {
    case Activation::relu: return std::max(v, 0.0);
    case Activation::tanh: return std::tanh(v);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case Activation::identity: return v;
    }
    return v;
}

/// Layer-by-layer forward pass built only from the layer tensors.
inline std::vector<double> reference_forward(const Network& net, std::vector<double> x) {
    for (const Layer& layer : net.layers()) {
        const auto w = layer.weights.values();
        std::vector<double> y(layer.output_dim());
        for (std::size_t r = 0; r < y.size(); ++r) {
            long double acc = layer.bias[r];
            for (std::size_t c = 0; c < x.size(); ++c) {
                acc += static_cast<long double>(w[r * x.size() + c]) * x[c];
            }
            y[r] = reference_activation(layer.activation, static_cast<double>(acc));
        }
        x = std::move(y);
    }
    return x;
}

/// Central finite differences of logit `cls` with step h.
inline std::vector<double> finite_difference_gradient(const Network& net, const std::vector<double>& x,
                                                      std::size_t cls, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> plus = x;
        std::vector<double> minus = x;
        plus[i] += h;
        minus[i] -= h;
        g[i] = (reference_forward(net, plus)[cls] - reference_forward(net, minus)[cls]) / (2.0 * h);
    }
    return g;
}

/// Product over layers of (max absolute row sum of W) * Lip(activation):
/// a sound infinity-norm Lipschitz constant of the network.
inline double linf_lipschitz_bound(const Network& net) {
    double bound = 1.0;
    for (const Layer& layer : net.layers()) {
        const std::size_t cols = layer.input_dim();
        double row_max = 0.0;
        for (std::size_t r = 0; r < layer.output_dim(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                s += std::abs(layer.weights.values()[r * cols + c]);
            }
            row_max = std::max(row_max, s);
        }
        const double lip = layer.activation == Activation::sigmoid ? 0.25 : 1.0;
        bound *= row_max * lip;
    }
    return bound;
}

/// Small deterministic generator for property tests (independent of RngStream).
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}

    std::uint64_t next() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    std::vector<double> vec(std::size_t n, double lo = -2.0, double hi = 2.0) {
        std::vector<double> v(n);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

private:
    std::uint64_t state_;
};

inline Layer make_layer(std::size_t rows, std::size_t cols, std::vector<double> w, std::vector<double> b,
                        Activation act) {
    return Layer{Tensor::matrix(rows, cols, std::move(w)), Tensor::vector(std::move(b)), act};
}

inline Network random_network(TestRng& rng, Role role, const std::vector<std::size_t>& widths,
                              const std::vector<Activation>& acts) {
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        layers.push_back(make_layer(widths[i + 1], widths[i], rng.vec(widths[i] * widths[i + 1], -1.0, 1.0),
                                    rng.vec(widths[i + 1], -0.2, 0.2), acts[i]));
    }
    return Network(role, std::move(layers));
}

} // namespace gmrobust::testing
