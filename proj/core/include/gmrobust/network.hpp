#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmrobust/tensor.hpp"

namespace gmrobust {

struct Layer {
    Tensor weights;  // [out x in]
    Tensor bias;     // [out]
    Activation activation = Activation::identity;

    std::size_t input_dim() const { return weights.cols(); }
    std::size_t output_dim() const { return weights.rows(); }
};

enum class Role { generator, classifier, composed };

std::string_view to_string(Role role);

using Meta = std::map<std::string, std::string>;

/// Validated stack of dense layers. Immutable after construction.
class Network {
public:
    /// Throws DimensionError if the layers do not chain or if `layers` is empty.
    Network(Role role, std::vector<Layer> layers, Meta meta = {});

    Role role() const noexcept { return role_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    const Meta& meta() const noexcept { return meta_; }
    std::size_t widest_layer() const noexcept { return widest_; }

    /// Number of leading layers that came from the generator; zero unless
    /// the network was produced by `compose`.
    std::size_t generator_depth() const noexcept { return generator_depth_; }
    /// The leading generator layers of a composed network as a standalone
    /// generator. Throws ConfigError on non-composed networks.
    Network generator_part() const;

private:
    friend Network compose(const Network& generator, const Network& classifier);

    Role role_;
    std::vector<Layer> layers_;
    Meta meta_;
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::size_t widest_ = 0;
    std::size_t generator_depth_ = 0;
};

struct Prediction {
    Tensor logits;
    std::size_t category = 0;
    double score = 0.0;
};

/// Index of the maximal value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values) noexcept;

Tensor forward(const Network& net, const Tensor& x);

/// Requires a classifier or composed network with at least two outputs.
Prediction classify(const Network& net, const Tensor& x);

/// G's layers followed by C's layers; input G.input_dim, output C.output_dim.
/// Throws CompositionError when G.output_dim != C.input_dim or roles are wrong.
Network compose(const Network& generator, const Network& classifier);

/// d logits[class_idx] / dx by reverse-mode accumulation.
Tensor gradient(const Network& net, const Tensor& x, std::size_t class_idx);

/// Reusable scratch buffers for repeated evaluations of one network shape.
/// Results are bitwise identical to `forward`.
class ForwardWorkspace {
public:
    explicit ForwardWorkspace(const Network& net);

    /// The returned span is valid until the next call.
    std::span<const double> run(std::span<const double> x);
    /// Output of the first `depth` layers only.
    std::span<const double> run_prefix(std::span<const double> x, std::size_t depth);
    std::size_t classify(std::span<const double> x);

    /// Gradient of logits[class_idx] w.r.t. the input, written to `out`.
    void gradient(std::span<const double> x, std::size_t class_idx, std::span<double> out);

    const Network& network() const noexcept { return *net_; }

private:
    const Network* net_;
    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<std::vector<double>> pre_;   // pre-activations per layer
    std::vector<std::vector<double>> post_;  // inputs to each layer
};

/// Evaluates `batch` inputs laid out row-major in `inputs` (batch x input_dim)
/// and returns the outputs row-major (batch x output_dim). Each row is
/// bitwise identical to `forward` on that row.
std::vector<double> forward_batch(const Network& net, std::span<const double> inputs, std::size_t batch);

} // namespace gmrobust
