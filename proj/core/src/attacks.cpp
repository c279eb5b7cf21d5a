#include "gmrobust/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "gmrobust/errors.hpp"
#include "gmrobust/parallel.hpp"
#include "gmrobust/rng.hpp"

namespace gmrobust {

void AttackParams::validate(const Network& composed) const {
    if (composed.role() != Role::composed) {
        throw ConfigError("attacks run on a composed network (generator then classifier)");
    }
    if (n_step < 1 || n_dir < 1) {
        throw ConfigError("n_step and n_dir must be at least 1");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("attack epsilon must be finite and positive");
    }
    if (!(alpha() > 0.0) || !std::isfinite(alpha())) {
        throw ConfigError("attack step scale must be finite and positive");
    }
    if (max_restarts < 1) {
        throw ConfigError("max_restarts must be at least 1");
    }
    if (target_class >= composed.output_dim() || source_class >= composed.output_dim()) {
        throw IndexError("target/source class out of range for " + std::to_string(composed.output_dim()) +
                         " categories");
    }
    if (target_class == source_class) {
        throw ConfigError("target_class must differ from source_class");
    }
    if (start && (!start->is_vector() || start->size() != composed.input_dim())) {
        throw DimensionError("attack start point has shape " + start->shape_string() +
                             " but the composed network expects " + std::to_string(composed.input_dim()) +
                             " noise coordinates");
    }
}

void project_linf(std::span<double> x, std::span<const double> center, double epsilon) noexcept {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], center[i] - epsilon, center[i] + epsilon);
    }
}

namespace {

// Wraps the workspace so every query is counted; the black-box search only
// ever sees the forward half of this interface.
class CountingOracle {
public:
    CountingOracle(const Network& net, QueryCounter* counter) : ws_(net), counter_(counter) {}

    double score(std::span<const double> x, std::size_t cls) {
        count_forward();
        return ws_.run(x)[cls];
    }

    std::size_t classify(std::span<const double> x) {
        count_forward();
        return ws_.classify(x);
    }

    void gradient(std::span<const double> x, std::size_t cls, std::span<double> out) {
        if (counter_) {
            counter_->gradient.fetch_add(1, std::memory_order_relaxed);
        }
        ws_.gradient(x, cls, out);
    }

    ForwardWorkspace& workspace() { return ws_; }

private:
    void count_forward() {
        if (counter_) {
            counter_->forward.fetch_add(1, std::memory_order_relaxed);
        }
    }

    ForwardWorkspace ws_;
    QueryCounter* counter_;
};

class ForwardOnly {
public:
    explicit ForwardOnly(CountingOracle& oracle) : oracle_(oracle) {}
    double score(std::span<const double> x, std::size_t cls) { return oracle_.score(x, cls); }
    std::size_t classify(std::span<const double> x) { return oracle_.classify(x); }

private:
    CountingOracle& oracle_;
};

std::vector<double> initial_noise(const AttackParams& params, RngStream& rng, std::size_t dim) {
    if (params.start) {
        return {params.start->values().begin(), params.start->values().end()};
    }
    return gaussian_values(rng, dim);
}

RealisticAdvExample make_example(const Network& composed, std::span<const double> x0,
                                 std::span<const double> x1, std::size_t c0, std::size_t c1,
                                 std::size_t restart, std::size_t step) {
    ForwardWorkspace ws(composed);
    const std::size_t depth = composed.generator_depth();
    auto img0 = ws.run_prefix(x0, depth);
    Tensor image0 = Tensor::vector({img0.begin(), img0.end()});
    auto img1 = ws.run_prefix(x1, depth);
    Tensor image1 = Tensor::vector({img1.begin(), img1.end()});
    return RealisticAdvExample{Tensor::vector({x0.begin(), x0.end()}),
                               Tensor::vector({x1.begin(), x1.end()}),
                               c0,
                               c1,
                               std::move(image0),
                               std::move(image1),
                               linf_distance(x0, x1),
                               restart,
                               step};
}

std::optional<RealisticAdvExample> black_box_restart(const Network& composed, const AttackParams& params,
                                                     std::size_t restart, QueryCounter* counter) {
    CountingOracle oracle(composed, counter);
    ForwardOnly net(oracle);
    const std::size_t dim = composed.input_dim();
    const double alpha = params.alpha();
    RngStream rng(params.seed, restart);

    const std::vector<double> x0 = initial_noise(params, rng, dim);
    const std::size_t c0 = net.classify(x0);
    std::vector<double> xi = x0;
    std::vector<double> probe(dim);
    std::vector<double> best(dim);

    for (std::size_t step = 0; step < params.n_step; ++step) {
        double s_max = net.score(xi, params.target_class);
        best = xi;
        for (std::size_t j = 0; j < params.n_dir; ++j) {
            for (std::size_t k = 0; k < dim; ++k) {
                probe[k] = xi[k] + alpha * rng.next_gaussian();
            }
            const double s = net.score(probe, params.target_class);
            if (s > s_max) {
                s_max = s;
                best = probe;
            }
        }
        project_linf(best, x0, params.epsilon);
        xi = best;
        if (params.on_step) {
            params.on_step(restart, step, x0, xi);
        }
        const std::size_t ci = net.classify(xi);
        if (ci != c0) {
            return make_example(composed, x0, xi, c0, ci, restart, step);
        }
    }
    return std::nullopt;
}

std::optional<RealisticAdvExample> white_box_restart(const Network& composed, const AttackParams& params,
                                                     std::size_t restart, QueryCounter* counter) {
    CountingOracle oracle(composed, counter);
    const std::size_t dim = composed.input_dim();
    const double alpha = params.alpha();
    RngStream rng(params.seed, restart);

    const std::vector<double> x0 = initial_noise(params, rng, dim);
    const std::size_t c0 = oracle.classify(x0);
    std::vector<double> xi = x0;
    std::vector<double> grad(dim);

    for (std::size_t step = 0; step < params.n_step; ++step) {
        oracle.gradient(xi, params.target_class, grad);
        for (std::size_t k = 0; k < dim; ++k) {
            xi[k] += alpha * grad[k];
        }
        project_linf(xi, x0, params.epsilon);
        require_finite(xi, "white_box_attack");
        if (params.on_step) {
            params.on_step(restart, step, x0, xi);
        }
        const std::size_t ci = oracle.classify(xi);
        if (ci != c0) {
            return make_example(composed, x0, xi, c0, ci, restart, step);
        }
    }
    return std::nullopt;
}

template <typename RestartFn>
std::optional<RealisticAdvExample> run_restarts(const Network& composed, const AttackParams& params,
                                                QueryCounter* counter, RestartFn restart_fn) {
    params.validate(composed);
    const std::size_t wave = std::max(1u, params.threads);
    // Restarts run in waves; the lowest successful index wins, so the
    // result does not depend on the worker count.
    for (std::size_t first = 0; first < params.max_restarts; first += wave) {
        const std::size_t count = std::min(wave, params.max_restarts - first);
        std::vector<std::optional<RealisticAdvExample>> results(count);
        parallel_for(count, params.threads, [&](std::size_t i) {
            results[i] = restart_fn(composed, params, first + i, counter);
        });
        for (auto& r : results) {
            if (r) {
                return std::move(r);
            }
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<RealisticAdvExample> black_box_attack(const Network& composed, const AttackParams& params,
                                                    QueryCounter* counter) {
    return run_restarts(composed, params, counter, black_box_restart);
}

std::optional<RealisticAdvExample> white_box_attack(const Network& composed, const AttackParams& params,
                                                    QueryCounter* counter) {
    return run_restarts(composed, params, counter, white_box_restart);
}

bool verify_adv_example(const RealisticAdvExample& candidate, const Network& composed, double epsilon) {
    if (!candidate.x.is_vector() || !candidate.x_prime.is_vector() ||
        candidate.x.size() != composed.input_dim() || candidate.x_prime.size() != composed.input_dim()) {
        return false;
    }
    if (composed.output_dim() < 2) {
        return false;
    }
    ForwardWorkspace ws(composed);
    const std::size_t c0 = ws.classify(candidate.x.values());
    const std::size_t c1 = ws.classify(candidate.x_prime.values());
    return linf_distance(candidate.x.values(), candidate.x_prime.values()) <= epsilon && c0 != c1;
}

std::optional<Tensor> falsify_ball(const Network& composed, const Tensor& center, double epsilon,
                                   std::size_t category, std::size_t steps, QueryCounter* counter) {
    if (!center.is_vector() || center.size() != composed.input_dim()) {
        throw DimensionError("falsify_ball: center has shape " + center.shape_string() + " but network expects " +
                             std::to_string(composed.input_dim()) + " inputs");
    }
    if (category >= composed.output_dim()) {
        throw IndexError("falsify_ball: category " + std::to_string(category) + " out of range");
    }
    if (steps < 1) {
        throw ConfigError("falsify_ball: steps must be positive");
    }
    CountingOracle oracle(composed, counter);
    const auto x0 = center.values();
    if (oracle.classify(x0) != category) {
        return center;
    }
    if (epsilon == 0.0) {
        return std::nullopt;
    }
    const double alpha = epsilon / static_cast<double>(steps);
    const std::size_t dim = x0.size();
    std::vector<double> xi(dim);
    std::vector<double> grad(dim);
    std::vector<double> grad_c(dim);
    for (std::size_t rival = 0; rival < composed.output_dim(); ++rival) {
        if (rival == category) {
            continue;
        }
        xi.assign(x0.begin(), x0.end());
        for (std::size_t step = 0; step < steps; ++step) {
            oracle.gradient(xi, rival, grad);
            oracle.gradient(xi, category, grad_c);
            for (std::size_t k = 0; k < dim; ++k) {
                xi[k] += alpha * (grad[k] - grad_c[k]);
            }
            project_linf(xi, x0, epsilon);
            if (oracle.classify(xi) != category) {
                return Tensor::vector(xi);
            }
        }
    }
    return std::nullopt;
}

} // namespace gmrobust
