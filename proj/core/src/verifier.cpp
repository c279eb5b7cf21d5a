#include "gmrobust/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmrobust/errors.hpp"

namespace gmrobust {

IntervalVector::IntervalVector(Tensor lo, Tensor hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.shape() != hi_.shape()) {
        throw DimensionError("interval bounds have shapes " + lo_.shape_string() + " and " +
                             hi_.shape_string());
    }
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(lo_[i] <= hi_[i])) {
            throw ConfigError("interval coordinate " + std::to_string(i) + " has lo > hi");
        }
    }
}

IntervalVector IntervalVector::ball(const Tensor& center, double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("epsilon must be finite and non-negative");
    }
    std::vector<double> lo(center.values().begin(), center.values().end());
    std::vector<double> hi = lo;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] -= epsilon;
        hi[i] += epsilon;
    }
    return IntervalVector(Tensor(center.shape(), std::move(lo)), Tensor(center.shape(), std::move(hi)));
}

bool IntervalVector::contains(std::span<const double> point) const {
    if (point.size() != size()) {
        return false;
    }
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (point[i] < lo_[i] || point[i] > hi_[i]) {
            return false;
        }
    }
    return true;
}

bool IntervalVector::subset_of(const IntervalVector& other) const {
    if (other.size() != size()) {
        return false;
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (lo_[i] < other.lo_[i] || hi_[i] > other.hi_[i]) {
            return false;
        }
    }
    return true;
}

IntervalVector ibp_propagate(const Network& net, const IntervalVector& input) {
    if (!input.lo().is_vector() || input.size() != net.input_dim()) {
        throw DimensionError("ibp_propagate: box has shape " + input.lo().shape_string() +
                             " but network expects " + std::to_string(net.input_dim()) + " inputs");
    }
    std::vector<double> lo(input.lo().values().begin(), input.lo().values().end());
    std::vector<double> hi(input.hi().values().begin(), input.hi().values().end());
    std::vector<double> center;
    std::vector<double> radius;

    for (const Layer& layer : net.layers()) {
        const std::size_t rows = layer.output_dim();
        const std::size_t cols = layer.input_dim();
        center.resize(cols);
        radius.resize(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            center[c] = 0.5 * (lo[c] + hi[c]);
            radius[c] = 0.5 * (hi[c] - lo[c]);
        }
        lo.assign(rows, 0.0);
        hi.assign(rows, 0.0);
        const double* w = layer.weights.values().data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* row = w + r * cols;
            double mid = 0.0;
            double spread = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                mid += row[c] * center[c];
                spread += std::abs(row[c]) * radius[c];
            }
            mid += layer.bias[r];
            lo[r] = activate(layer.activation, mid - spread);
            hi[r] = activate(layer.activation, mid + spread);
        }
        require_finite(lo, "ibp_propagate");
        require_finite(hi, "ibp_propagate");
    }
    return IntervalVector(Tensor::vector(std::move(lo)), Tensor::vector(std::move(hi)));
}

std::string_view to_string(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::certified: return "certified";
    case VerdictKind::falsified: return "falsified";
    case VerdictKind::unknown: return "unknown";
    }
    throw ConfigError("unknown verdict kind");
}

Verdict Verdict::certified(double margin) {
    return Verdict{VerdictKind::certified, std::nullopt, margin};
}

Verdict Verdict::falsified(WitnessPair witness) {
    return Verdict{VerdictKind::falsified, std::move(witness), std::nullopt};
}

Verdict Verdict::unknown() {
    return Verdict{};
}

Verdict certify(const Network& net, const Tensor& x, double epsilon, std::size_t category) {
    if (category >= net.output_dim()) {
        throw IndexError("certify: category " + std::to_string(category) + " out of range for " +
                         std::to_string(net.output_dim()) + " outputs");
    }
    if (net.output_dim() < 2) {
        throw ConfigError("certify: network needs at least two categories");
    }
    const IntervalVector out = ibp_propagate(net, IntervalVector::ball(x, epsilon));
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < net.output_dim(); ++k) {
        if (k != category) {
            margin = std::min(margin, out.lo()[category] - out.hi()[k]);
        }
    }
    if (margin > 0.0) {
        return Verdict::certified(margin);
    }
    return Verdict::unknown();
}

std::optional<Tensor> grid_falsify(const Network& net, const Tensor& x, double epsilon,
                                   std::size_t category, std::size_t points_per_dim) {
    if (points_per_dim < 2) {
        throw ConfigError("grid_falsify: points_per_dim must be at least 2");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("grid_falsify: epsilon must be finite and non-negative");
    }
    if (category >= net.output_dim()) {
        throw IndexError("grid_falsify: category " + std::to_string(category) + " out of range");
    }
    if (!x.is_vector() || x.size() != net.input_dim()) {
        throw DimensionError("grid_falsify: point has shape " + x.shape_string() +
                             " but network expects " + std::to_string(net.input_dim()) + " inputs");
    }
    ForwardWorkspace ws(net);
    if (epsilon == 0.0) {
        if (ws.classify(x.values()) != category) {
            return x;
        }
        return std::nullopt;
    }

    const std::size_t dim = x.size();
    double total = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
        total *= static_cast<double>(points_per_dim);
        if (total > static_cast<double>(kMaxGridPoints)) {
            throw GridTooLargeError("grid_falsify: " + std::to_string(points_per_dim) + "^" +
                                    std::to_string(dim) + " points exceeds the limit of " +
                                    std::to_string(kMaxGridPoints));
        }
    }

    // Coordinate values per axis; the last one is pinned to x + epsilon exactly.
    const double steps = static_cast<double>(points_per_dim - 1);
    std::vector<std::vector<double>> axis(dim, std::vector<double>(points_per_dim));
    for (std::size_t d = 0; d < dim; ++d) {
        const double lo = x[d] - epsilon;
        const double hi = x[d] + epsilon;
        for (std::size_t k = 0; k < points_per_dim; ++k) {
            axis[d][k] = k + 1 == points_per_dim ? hi : lo + (hi - lo) * (static_cast<double>(k) / steps);
        }
    }

    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> point(dim);
    for (;;) {
        for (std::size_t d = 0; d < dim; ++d) {
            point[d] = axis[d][idx[d]];
        }
        if (ws.classify(point) != category) {
            return Tensor::vector(point);
        }
        std::size_t d = dim;
        while (d > 0) {
            --d;
            if (++idx[d] < points_per_dim) {
                break;
            }
            idx[d] = 0;
            if (d == 0) {
                return std::nullopt;
            }
        }
    }
}

} // namespace gmrobust
