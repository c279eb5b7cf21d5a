#include "gmrobust/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gmrobust/attacks.hpp"
#include "gmrobust/errors.hpp"
#include "gmrobust/parallel.hpp"
#include "gmrobust/rng.hpp"

namespace gmrobust {

double normal_quantile_for_level(double level) {
    if (level == 0.90) return 1.6448536269514722;
    if (level == 0.95) return 1.959963984540054;
    if (level == 0.99) return 2.5758293035489004;
    throw ConfigError("unsupported confidence level " + std::to_string(level) + " (use 0.9, 0.95 or 0.99)");
}

Interval confidence_interval(std::size_t k, std::size_t n, double level) {
    const double z = normal_quantile_for_level(level);
    if (n == 0 || k > n) {
        throw ConfigError("confidence_interval needs 0 <= k <= n and n >= 1");
    }
    const double nd = static_cast<double>(n);
    const double p = static_cast<double>(k) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = (p + z2 / (2.0 * nd)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd));
    Interval ci{std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0)};
    if (k == 0) ci.lo = 0.0;
    if (k == n) ci.hi = 1.0;
    // Keep the point estimate inside the interval despite rounding.
    ci.lo = std::min(ci.lo, p);
    ci.hi = std::max(ci.hi, p);
    return ci;
}

std::vector<double> sample_noise(std::uint64_t seed, std::size_t index, std::size_t dim) {
    RngStream rng(seed, index);
    return gaussian_values(rng, dim);
}

std::vector<std::size_t> classify_samples(const Network& composed, std::size_t n, std::uint64_t seed,
                                          const EstimatorOptions& options) {
    if (options.batch_size == 0) {
        throw ConfigError("batch_size must be positive");
    }
    const std::size_t dim = composed.input_dim();
    const std::size_t out_dim = composed.output_dim();
    const std::size_t batches = (n + options.batch_size - 1) / options.batch_size;
    std::vector<std::size_t> categories(n);
    parallel_for(batches, options.threads, [&](std::size_t b) {
        const std::size_t first = b * options.batch_size;
        const std::size_t count = std::min(options.batch_size, n - first);
        std::vector<double> inputs;
        inputs.reserve(count * dim);
        for (std::size_t i = 0; i < count; ++i) {
            const auto noise = sample_noise(seed, first + i, dim);
            inputs.insert(inputs.end(), noise.begin(), noise.end());
        }
        const std::vector<double> logits = forward_batch(composed, inputs, count);
        for (std::size_t i = 0; i < count; ++i) {
            categories[first + i] = argmax(std::span<const double>(logits).subspan(i * out_dim, out_dim));
        }
    });
    return categories;
}

namespace {

void check_common(const Network& composed, std::size_t category, std::size_t n, const EstimatorOptions& options) {
    if (n == 0) {
        throw ConfigError("sample count n must be at least 1");
    }
    if (category >= composed.output_dim()) {
        throw IndexError("category " + std::to_string(category) + " out of range for " +
                         std::to_string(composed.output_dim()) + " classifier outputs");
    }
    if (composed.output_dim() < 2) {
        throw ConfigError("classifier needs at least two categories");
    }
    if (options.batch_size == 0) {
        throw ConfigError("batch_size must be positive");
    }
    normal_quantile_for_level(options.level);
}

} // namespace

EstimateReport estimate_global_correctness(const Network& classifier, const Network& generator,
                                           std::size_t category, std::size_t n, std::uint64_t seed,
                                           const EstimatorOptions& options) {
    const Network composed = compose(generator, classifier);
    check_common(composed, category, n, options);
    const auto categories = classify_samples(composed, n, seed, options);
    const std::size_t k = static_cast<std::size_t>(std::count(categories.begin(), categories.end(), category));

    EstimateReport report;
    report.category = category;
    report.n = n;
    report.successes = k;
    report.point_estimate = static_cast<double>(k) / static_cast<double>(n);
    report.confidence_interval = confidence_interval(k, n, options.level);
    report.level = options.level;
    report.seed = seed;
    report.delta_claim = 1.0 - report.confidence_interval.lo;
    return report;
}

RobustnessReport estimate_composed_robustness(const Network& composed, std::size_t category, double epsilon,
                                              std::size_t n, std::uint64_t seed, std::size_t budget,
                                              const EstimatorOptions& options) {
    check_common(composed, category, n, options);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("epsilon must be finite and non-negative");
    }
    if (budget == 0) {
        throw ConfigError("per-sample budget must be positive");
    }
    const std::size_t dim = composed.input_dim();
    std::vector<VerdictKind> verdicts(n, VerdictKind::unknown);

    const std::size_t batches = (n + options.batch_size - 1) / options.batch_size;
    parallel_for(batches, options.threads, [&](std::size_t b) {
        const std::size_t first = b * options.batch_size;
        const std::size_t last = std::min(n, first + options.batch_size);
        ForwardWorkspace ws(composed);
        for (std::size_t i = first; i < last; ++i) {
            const Tensor x = Tensor::vector(sample_noise(seed, i, dim));
            if (epsilon == 0.0) {
                verdicts[i] = ws.classify(x.values()) == category ? VerdictKind::certified
                                                                  : VerdictKind::falsified;
                continue;
            }
            if (certify(composed, x, epsilon, category).kind == VerdictKind::certified) {
                verdicts[i] = VerdictKind::certified;
            } else if (falsify_ball(composed, x, epsilon, category, budget)) {
                verdicts[i] = VerdictKind::falsified;
            }
        }
    });

    RobustnessReport report;
    report.category = category;
    report.epsilon = epsilon;
    report.n = n;
    report.certified = static_cast<std::size_t>(std::count(verdicts.begin(), verdicts.end(), VerdictKind::certified));
    report.falsified = static_cast<std::size_t>(std::count(verdicts.begin(), verdicts.end(), VerdictKind::falsified));
    report.unknown = n - report.certified - report.falsified;
    report.lower_bound = confidence_interval(report.certified, n, options.level).lo;
    report.upper_bound = confidence_interval(report.certified + report.unknown, n, options.level).hi;
    report.level = options.level;
    report.seed = seed;
    report.budget = budget;
    report.verdicts = std::move(verdicts);
    return report;
}

RobustnessReport estimate_global_robustness(const Network& classifier, const Network& generator,
                                            std::size_t category, double epsilon, std::size_t n,
                                            std::uint64_t seed, std::size_t budget,
                                            const EstimatorOptions& options) {
    return estimate_composed_robustness(compose(generator, classifier), category, epsilon, n, seed, budget, options);
}

std::string to_json(const EstimateReport& report) {
    nlohmann::ordered_json doc;
    doc["format"] = "gmrobust-correctness-report";
    doc["version"] = 1;
    doc["category"] = report.category;
    doc["n"] = report.n;
    doc["successes"] = report.successes;
    doc["point_estimate"] = report.point_estimate;
    doc["confidence_level"] = report.level;
    doc["confidence_interval"] = {report.confidence_interval.lo, report.confidence_interval.hi};
    doc["seed"] = report.seed;
    if (report.delta_claim) {
        doc["delta_claim"] = *report.delta_claim;
    } else {
        doc["delta_claim"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

std::string to_json(const RobustnessReport& report) {
    nlohmann::ordered_json doc;
    doc["format"] = "gmrobust-robustness-report";
    doc["version"] = 1;
    doc["category"] = report.category;
    doc["epsilon"] = report.epsilon;
    doc["norm"] = "linf";
    doc["n"] = report.n;
    doc["certified"] = report.certified;
    doc["falsified"] = report.falsified;
    doc["unknown"] = report.unknown;
    doc["confidence_level"] = report.level;
    doc["lower_bound"] = report.lower_bound;
    doc["upper_bound"] = report.upper_bound;
    doc["seed"] = report.seed;
    doc["budget"] = report.budget;
    // One character per sample: C certified, F falsified, U unknown.
    std::string log;
    log.reserve(report.verdicts.size());
    for (VerdictKind v : report.verdicts) {
        log += v == VerdictKind::certified ? 'C' : v == VerdictKind::falsified ? 'F' : 'U';
    }
    doc["verdicts"] = log;
    return doc.dump(2) + "\n";
}

} // namespace gmrobust
