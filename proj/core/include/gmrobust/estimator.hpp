#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmrobust/network.hpp"
#include "gmrobust/verifier.hpp"

namespace gmrobust {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Two-sided standard normal quantile for the supported levels
/// (0.9, 0.95, 0.99). Throws ConfigError for anything else.
double normal_quantile_for_level(double level);

/// Wilson score interval for k successes out of n, clamped to [0, 1].
/// k == n gives hi == 1 exactly and k == 0 gives lo == 0 exactly.
Interval confidence_interval(std::size_t k, std::size_t n, double level);

struct EstimatorOptions {
    double level = 0.95;
    std::size_t batch_size = 256;
    unsigned threads = 1;
};

struct EstimateReport {
    std::size_t category = 0;
    std::size_t n = 0;
    std::size_t successes = 0;
    double point_estimate = 0.0;
    Interval confidence_interval;
    double level = 0.95;
    std::uint64_t seed = 0;
    /// Smallest delta for which the interval supports "probability >= 1 - delta".
    std::optional<double> delta_claim;
};

struct RobustnessReport {
    std::size_t category = 0;
    double epsilon = 0.0;
    std::size_t n = 0;
    std::size_t certified = 0;
    std::size_t falsified = 0;
    std::size_t unknown = 0;
    double lower_bound = 0.0;
    double upper_bound = 1.0;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    std::vector<VerdictKind> verdicts;  // indexed by sample
};

/// Noise for Monte Carlo sample i: input_dim standard normals from
/// RngStream(seed, i).
std::vector<double> sample_noise(std::uint64_t seed, std::size_t index, std::size_t dim);

/// Fraction of n noises whose composed classification is `category`.
EstimateReport estimate_global_correctness(const Network& classifier, const Network& generator,
                                           std::size_t category, std::size_t n, std::uint64_t seed,
                                           const EstimatorOptions& options = {});

/// Per sample: certify the epsilon-ball with IBP; failing that, search it
/// for a misclassified point with `budget` projected-ascent steps per rival
/// class. Epsilon 0 reduces to plain classification of the sample.
/// lower_bound is the Wilson lower end for certified / n, upper_bound the
/// Wilson upper end for (certified + unknown) / n.
RobustnessReport estimate_global_robustness(const Network& classifier, const Network& generator,
                                            std::size_t category, double epsilon, std::size_t n,
                                            std::uint64_t seed, std::size_t budget,
                                            const EstimatorOptions& options = {});

/// Same as estimate_global_robustness on an already composed network.
RobustnessReport estimate_composed_robustness(const Network& composed, std::size_t category, double epsilon,
                                              std::size_t n, std::uint64_t seed, std::size_t budget,
                                              const EstimatorOptions& options = {});

/// Categories of the n samples through `composed`, batched and in parallel.
std::vector<std::size_t> classify_samples(const Network& composed, std::size_t n, std::uint64_t seed,
                                          const EstimatorOptions& options);

std::string to_json(const EstimateReport& report);
std::string to_json(const RobustnessReport& report);

} // namespace gmrobust
