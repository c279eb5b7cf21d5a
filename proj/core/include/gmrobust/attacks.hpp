#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "gmrobust/network.hpp"
#include "gmrobust/tensor.hpp"

namespace gmrobust {

struct AttackParams {
    std::size_t n_step = 16;
    std::size_t n_dir = 10;  // black-box only
    double epsilon = 0.0;
    /// Step size alpha; defaults to epsilon / n_step.
    std::optional<double> step_scale;
    std::size_t target_class = 0;  // class whose logit is pushed up
    std::size_t source_class = 1;  // class the generator is meant to produce
    std::size_t max_restarts = 100;
    std::uint64_t seed = 0;
    /// Pins x0 instead of sampling it (every restart starts here).
    std::optional<Tensor> start;
    unsigned threads = 1;
    /// Called after every search step with (restart, step, x0, x_{step+1}).
    /// Invoked concurrently when threads > 1.
    std::function<void(std::size_t, std::size_t, std::span<const double>, std::span<const double>)> on_step;

    double alpha() const { return step_scale.value_or(epsilon / static_cast<double>(n_step)); }
    /// Throws ConfigError/IndexError/DimensionError against `composed`.
    void validate(const Network& composed) const;
};

/// Two noises within epsilon (infinity norm) whose generated images the
/// classifier puts in different categories.
struct RealisticAdvExample {
    Tensor x;
    Tensor x_prime;
    std::size_t category_x = 0;
    std::size_t category_x_prime = 0;
    Tensor image_x;
    Tensor image_x_prime;
    double linf_distance = 0.0;
    std::size_t restart = 0;  // index of the restart that produced it
    std::size_t step = 0;     // iteration at which classes diverged
};

/// Test hook: counts network queries issued by an attack.
struct QueryCounter {
    std::atomic<std::size_t> forward{0};
    std::atomic<std::size_t> gradient{0};
};

/// Random local search. Per restart: x0 ~ N(0,1)^p, then n_step rounds of
/// n_dir Gaussian probes with standard deviation alpha around the incumbent;
/// the probe with the highest target logit replaces the incumbent if it
/// improves on it, and the new incumbent is clamped to the epsilon-box of
/// x0. Succeeds when the incumbent's class differs from x0's. Issues forward
/// queries only.
std::optional<RealisticAdvExample> black_box_attack(const Network& composed, const AttackParams& params,
                                                    QueryCounter* counter = nullptr);

/// Projected gradient ascent on the target logit:
/// x_{i+1} = clamp_{x0, eps}(x_i + alpha * grad logit_target(x_i)).
/// Same restart, success and return contract as black_box_attack.
std::optional<RealisticAdvExample> white_box_attack(const Network& composed, const AttackParams& params,
                                                    QueryCounter* counter = nullptr);

/// Recomputes both categories and the distance from scratch.
bool verify_adv_example(const RealisticAdvExample& candidate, const Network& composed, double epsilon);

/// Searches the epsilon-box around `center` for a point not classified as
/// `category`: the center itself first, then, for each rival class, `steps`
/// rounds of projected gradient ascent on logit[rival] - logit[category]
/// with alpha = epsilon / steps.
std::optional<Tensor> falsify_ball(const Network& composed, const Tensor& center, double epsilon,
                                   std::size_t category, std::size_t steps,
                                   QueryCounter* counter = nullptr);

/// Clamp every coordinate of x into [center - eps, center + eps].
void project_linf(std::span<double> x, std::span<const double> center, double epsilon) noexcept;

} // namespace gmrobust
