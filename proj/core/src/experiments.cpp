#include "gmrobust/experiments.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "gmrobust/errors.hpp"
#include "gmrobust/rng.hpp"

namespace gmrobust {

namespace {

std::string numbered(const char* pattern, std::size_t i) {
    char name[64];
    std::snprintf(name, sizeof(name), pattern, i);
    return name;
}

FrameShape resolve_shape(const Network& generator, std::optional<FrameShape> shape) {
    const FrameShape s = shape.value_or(default_frame_shape(generator.output_dim()));
    if (s.height == 0 || s.width == 0 || s.height * s.width != generator.output_dim()) {
        throw ConfigError("frame shape " + std::to_string(s.height) + "x" + std::to_string(s.width) +
                          " does not match generator output dimension " + std::to_string(generator.output_dim()));
    }
    return s;
}

} // namespace

WalkResult random_walk(const Network& generator, const WalkConfig& config) {
    if (config.steps < 1) {
        throw ConfigError("walk needs at least one step");
    }
    if (!(config.sigma >= 0.0) || !std::isfinite(config.sigma)) {
        throw ConfigError("walk sigma must be finite and non-negative");
    }
    const FrameShape shape = resolve_shape(generator, config.frame_shape);
    const Activation out_act = generator.layers().back().activation;

    RngStream rng(config.seed, 0);
    const std::size_t dim = generator.input_dim();
    std::vector<double> x = gaussian_values(rng, dim);

    WalkResult walk;
    walk.noises.reserve(config.steps + 1);
    walk.frames.reserve(config.steps + 1);
    for (std::size_t i = 0; i <= config.steps; ++i) {
        if (i > 0) {
            for (double& v : x) {
                v += config.sigma * rng.next_gaussian();
            }
        }
        Tensor noise = Tensor::vector(x);
        walk.frames.push_back(forward(generator, noise));
        walk.noises.push_back(std::move(noise));
    }

    if (config.output_dir) {
        std::filesystem::create_directories(*config.output_dir);
        for (std::size_t i = 0; i < walk.frames.size(); ++i) {
            write_pgm(*config.output_dir / numbered("frame_%04zu.pgm", i), walk.frames[i], shape, out_act);
        }
    }
    return walk;
}

std::vector<Outlier> mine_outliers(const Network& classifier, const Network& generator, std::size_t category,
                                   std::size_t n, std::uint64_t seed, const EstimatorOptions& options,
                                   const std::optional<std::filesystem::path>& output_dir,
                                   std::optional<FrameShape> frame_shape) {
    const Network composed = compose(generator, classifier);
    if (n == 0) {
        throw ConfigError("sample count n must be at least 1");
    }
    if (category >= composed.output_dim()) {
        throw IndexError("category " + std::to_string(category) + " out of range");
    }
    const std::optional<FrameShape> shape =
        output_dir ? std::optional(resolve_shape(generator, frame_shape)) : std::nullopt;

    const auto categories = classify_samples(composed, n, seed, options);
    std::vector<Outlier> outliers;
    for (std::size_t i = 0; i < n; ++i) {
        if (categories[i] == category) {
            continue;
        }
        Tensor noise = Tensor::vector(sample_noise(seed, i, composed.input_dim()));
        Prediction prediction = classify(composed, noise);
        outliers.push_back(Outlier{i, std::move(noise), std::move(prediction)});
    }

    if (output_dir) {
        std::filesystem::create_directories(*output_dir);
        const Activation out_act = generator.layers().back().activation;
        for (const Outlier& o : outliers) {
            write_pgm(*output_dir / numbered("outlier_%06zu.pgm", o.sample_index), forward(generator, o.noise), *shape,
                      out_act);
        }
    }
    return outliers;
}

ComparisonReport compare_generators(std::span<const Network> classifiers, std::span<const Network> generators,
                                    std::size_t category, std::size_t n, std::uint64_t seed,
                                    const EstimatorOptions& options) {
    if (classifiers.empty()) {
        throw ConfigError("compare_generators: no classifiers given");
    }
    if (generators.empty()) {
        throw ConfigError("compare_generators: no generators given");
    }
    ComparisonReport report;
    for (std::size_t ci = 0; ci < classifiers.size(); ++ci) {
        std::vector<EstimateReport> row;
        double lo = 1.0;
        double hi = 0.0;
        for (std::size_t gi = 0; gi < generators.size(); ++gi) {
            EstimateReport cell;
            try {
                cell = estimate_global_correctness(classifiers[ci], generators[gi], category, n, seed, options);
            } catch (const CompositionError& e) {
                throw CompositionError("generator " + std::to_string(gi) + " vs classifier " + std::to_string(ci) +
                                       ": " + e.what());
            }
            lo = std::min(lo, cell.point_estimate);
            hi = std::max(hi, cell.point_estimate);
            row.push_back(cell);
        }
        report.grid.push_back(std::move(row));
        report.max_discrepancy.push_back(hi - lo);
    }
    return report;
}

ComparisonReport compare_generators(const Network& classifier, std::span<const Network> generators,
                                    std::size_t category, std::size_t n, std::uint64_t seed,
                                    const EstimatorOptions& options) {
    return compare_generators(std::span<const Network>(&classifier, 1), generators, category, n, seed, options);
}

namespace {

nlohmann::ordered_json estimate_json(const EstimateReport& r) {
    nlohmann::ordered_json j;
    j["category"] = r.category;
    j["n"] = r.n;
    j["successes"] = r.successes;
    j["point_estimate"] = r.point_estimate;
    j["confidence_interval"] = {r.confidence_interval.lo, r.confidence_interval.hi};
    return j;
}

nlohmann::ordered_json values_json(const Tensor& t) {
    return nlohmann::ordered_json(std::vector<double>(t.values().begin(), t.values().end()));
}

} // namespace

std::string to_json(const WalkResult& walk, const WalkConfig& config) {
    nlohmann::ordered_json doc;
    doc["format"] = "gmrobust-walk-report";
    doc["version"] = 1;
    doc["seed"] = config.seed;
    doc["steps"] = config.steps;
    doc["sigma"] = config.sigma;
    doc["frames"] = walk.frames.size();
    auto noises = nlohmann::ordered_json::array();
    for (const Tensor& x : walk.noises) {
        noises.push_back(values_json(x));
    }
    doc["noises"] = std::move(noises);
    return doc.dump(2) + "\n";
}

std::string to_json(const std::vector<Outlier>& outliers, std::size_t category, std::size_t n, std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["format"] = "gmrobust-outlier-report";
    doc["version"] = 1;
    doc["category"] = category;
    doc["n"] = n;
    doc["seed"] = seed;
    doc["outliers"] = outliers.size();
    auto list = nlohmann::ordered_json::array();
    for (const Outlier& o : outliers) {
        nlohmann::ordered_json j;
        j["sample"] = o.sample_index;
        j["predicted"] = o.prediction.category;
        j["score"] = o.prediction.score;
        j["logits"] = values_json(o.prediction.logits);
        j["noise"] = values_json(o.noise);
        list.push_back(std::move(j));
    }
    doc["samples"] = std::move(list);
    return doc.dump(2) + "\n";
}

std::string to_json(const ComparisonReport& report) {
    nlohmann::ordered_json doc;
    doc["format"] = "gmrobust-comparison-report";
    doc["version"] = 1;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t ci = 0; ci < report.grid.size(); ++ci) {
        nlohmann::ordered_json row;
        row["classifier"] = ci;
        auto cells = nlohmann::ordered_json::array();
        for (const EstimateReport& cell : report.grid[ci]) {
            cells.push_back(estimate_json(cell));
        }
        row["generators"] = std::move(cells);
        row["max_discrepancy"] = report.max_discrepancy[ci];
        rows.push_back(std::move(row));
    }
    doc["classifiers"] = std::move(rows);
    if (!report.grid.empty() && !report.grid.front().empty()) {
        doc["seed"] = report.grid.front().front().seed;
    }
    return doc.dump(2) + "\n";
}

} // namespace gmrobust
