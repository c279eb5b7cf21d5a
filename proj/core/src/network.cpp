#include "gmrobust/network.hpp"

#include <algorithm>

#include "gmrobust/errors.hpp"

namespace gmrobust {

std::string_view to_string(Role role) {
    switch (role) {
    case Role::generator: return "generator";
    case Role::classifier: return "classifier";
    case Role::composed: return "composed";
    }
    throw ConfigError("unknown network role");
}

Network::Network(Role role, std::vector<Layer> layers, Meta meta)
    : role_(role), layers_(std::move(layers)), meta_(std::move(meta)) {
    if (layers_.empty()) {
        throw DimensionError("network needs at least one layer");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& layer = layers_[i];
        if (!layer.weights.is_matrix()) {
            throw DimensionError("layer " + std::to_string(i) + ": weights must be a matrix, got " +
                                 layer.weights.shape_string());
        }
        if (!layer.bias.is_vector() || layer.bias.size() != layer.weights.rows()) {
            throw DimensionError("layer " + std::to_string(i) + ": bias " + layer.bias.shape_string() +
                                 " does not match weights " + layer.weights.shape_string());
        }
        if (i > 0 && layers_[i - 1].output_dim() != layer.input_dim()) {
            throw DimensionError("layer " + std::to_string(i) + " expects " +
                                 std::to_string(layer.input_dim()) + " inputs but layer " +
                                 std::to_string(i - 1) + " produces " +
                                 std::to_string(layers_[i - 1].output_dim()));
        }
        activation_lipschitz(layer.activation);  // rejects out-of-range enumerators
        widest_ = std::max(widest_, layer.output_dim());
    }
    input_dim_ = layers_.front().input_dim();
    output_dim_ = layers_.back().output_dim();
    widest_ = std::max(widest_, input_dim_);
}

Network Network::generator_part() const {
    if (role_ != Role::composed || generator_depth_ == 0) {
        throw ConfigError("generator_part() needs a composed network");
    }
    std::vector<Layer> head(layers_.begin(), layers_.begin() + static_cast<std::ptrdiff_t>(generator_depth_));
    return Network(Role::generator, std::move(head));
}

std::size_t argmax(std::span<const double> values) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

namespace {

void require_input(const Network& net, std::size_t size, std::string_view op) {
    if (size != net.input_dim()) {
        throw DimensionError(std::string(op) + ": input has " + std::to_string(size) +
                             " values but the " + std::string(to_string(net.role())) + " expects " +
                             std::to_string(net.input_dim()));
    }
}

void require_classifier(const Network& net) {
    if (net.role() == Role::generator) {
        throw ConfigError("classify: a generator does not produce categories");
    }
    if (net.output_dim() < 2) {
        throw ConfigError("classify: network needs at least two categories");
    }
}

} // namespace

Tensor forward(const Network& net, const Tensor& x) {
    if (!x.is_vector()) {
        throw DimensionError("forward: input must be a vector, got " + x.shape_string());
    }
    require_input(net, x.size(), "forward");
    ForwardWorkspace ws(net);
    auto out = ws.run(x.values());
    require_finite(out, "forward");
    return Tensor::vector({out.begin(), out.end()});
}

Prediction classify(const Network& net, const Tensor& x) {
    require_classifier(net);
    Tensor logits = forward(net, x);
    const std::size_t c = argmax(logits.values());
    const double score = logits[c];
    return Prediction{std::move(logits), c, score};
}

Network compose(const Network& generator, const Network& classifier) {
    if (generator.role() != Role::generator) {
        throw CompositionError("compose: first operand must be a generator, got " +
                               std::string(to_string(generator.role())));
    }
    if (classifier.role() != Role::classifier) {
        throw CompositionError("compose: second operand must be a classifier, got " +
                               std::string(to_string(classifier.role())));
    }
    if (generator.output_dim() != classifier.input_dim()) {
        throw CompositionError("compose: generator produces images of dimension " +
                               std::to_string(generator.output_dim()) + " but classifier expects " +
                               std::to_string(classifier.input_dim()));
    }
    std::vector<Layer> layers = generator.layers();
    layers.insert(layers.end(), classifier.layers().begin(), classifier.layers().end());
    Network out(Role::composed, std::move(layers));
    out.generator_depth_ = generator.layers().size();
    return out;
}

Tensor gradient(const Network& net, const Tensor& x, std::size_t class_idx) {
    if (!x.is_vector()) {
        throw DimensionError("gradient: input must be a vector, got " + x.shape_string());
    }
    require_input(net, x.size(), "gradient");
    if (class_idx >= net.output_dim()) {
        throw IndexError("gradient: class index " + std::to_string(class_idx) + " out of range for " +
                         std::to_string(net.output_dim()) + " outputs");
    }
    ForwardWorkspace ws(net);
    std::vector<double> g(net.input_dim());
    ws.gradient(x.values(), class_idx, g);
    require_finite(g, "gradient");
    return Tensor::vector(std::move(g));
}

ForwardWorkspace::ForwardWorkspace(const Network& net)
    : net_(&net), a_(net.widest_layer()), b_(net.widest_layer()) {}

std::span<const double> ForwardWorkspace::run(std::span<const double> x) {
    return run_prefix(x, net_->layers().size());
}

std::span<const double> ForwardWorkspace::run_prefix(std::span<const double> x, std::size_t depth) {
    std::copy(x.begin(), x.end(), a_.begin());
    std::size_t width = x.size();
    for (std::size_t i = 0; i < depth; ++i) {
        const Layer& layer = net_->layers()[i];
        const std::size_t out = layer.output_dim();
        affine_into(layer.weights, layer.bias, std::span<const double>(a_.data(), width),
                    std::span<double>(b_.data(), out));
        activate_inplace(layer.activation, std::span<double>(b_.data(), out));
        a_.swap(b_);
        width = out;
    }
    return {a_.data(), width};
}

std::size_t ForwardWorkspace::classify(std::span<const double> x) {
    return argmax(run(x));
}

void ForwardWorkspace::gradient(std::span<const double> x, std::size_t class_idx, std::span<double> out) {
    const auto& layers = net_->layers();
    const std::size_t depth = layers.size();
    pre_.resize(depth);
    post_.resize(depth);

    std::vector<double> current(x.begin(), x.end());
    for (std::size_t i = 0; i < depth; ++i) {
        const Layer& layer = layers[i];
        post_[i] = current;
        pre_[i].assign(layer.output_dim(), 0.0);
        affine_into(layer.weights, layer.bias, post_[i], pre_[i]);
        current = pre_[i];
        activate_inplace(layer.activation, current);
    }

    // Adjoint of the final output is the unit vector e_{class_idx}.
    std::vector<double> adjoint(layers.back().output_dim(), 0.0);
    adjoint[class_idx] = 1.0;
    for (std::size_t i = depth; i-- > 0;) {
        const Layer& layer = layers[i];
        const std::size_t rows = layer.output_dim();
        const std::size_t cols = layer.input_dim();
        for (std::size_t r = 0; r < rows; ++r) {
            adjoint[r] *= activate_derivative(layer.activation, pre_[i][r]);
        }
        std::vector<double> next(cols, 0.0);
        const double* w = layer.weights.values().data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double a = adjoint[r];
            if (a == 0.0) {
                continue;
            }
            const double* row = w + r * cols;
            for (std::size_t c = 0; c < cols; ++c) {
                next[c] += a * row[c];
            }
        }
        adjoint.swap(next);
    }
    std::copy(adjoint.begin(), adjoint.end(), out.begin());
}

std::vector<double> forward_batch(const Network& net, std::span<const double> inputs, std::size_t batch) {
    const std::size_t in = net.input_dim();
    if (inputs.size() != batch * in) {
        throw DimensionError("forward_batch: " + std::to_string(inputs.size()) + " values is not " +
                             std::to_string(batch) + " rows of " + std::to_string(in));
    }
    // Layer-major sweep: each weight row is reused across the whole batch
    // while it is hot in cache; per-sample arithmetic order matches forward.
    std::vector<double> cur(inputs.begin(), inputs.end());
    std::size_t width = in;
    std::vector<double> next;
    for (const Layer& layer : net.layers()) {
        const std::size_t rows = layer.output_dim();
        next.assign(batch * rows, 0.0);
        const double* w = layer.weights.values().data();
        const double* bias = layer.bias.values().data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* row = w + r * width;
            for (std::size_t s = 0; s < batch; ++s) {
                const double* xs = cur.data() + s * width;
                double acc = 0.0;
                for (std::size_t c = 0; c < width; ++c) {
                    acc += row[c] * xs[c];
                }
                next[s * rows + r] = acc + bias[r];
            }
        }
        activate_inplace(layer.activation, next);
        cur.swap(next);
        width = rows;
    }
    require_finite(cur, "forward_batch");
    return cur;
}

} // namespace gmrobust
