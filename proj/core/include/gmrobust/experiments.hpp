#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmrobust/estimator.hpp"
#include "gmrobust/network.hpp"
#include "gmrobust/pgm.hpp"

namespace gmrobust {

struct WalkConfig {
    std::size_t steps = 16;
    double sigma = 0.05;
    std::uint64_t seed = 0;
    /// Defaults to default_frame_shape(G.output_dim).
    std::optional<FrameShape> frame_shape;
    /// When set, frames are written there as frame_%04d.pgm.
    std::optional<std::filesystem::path> output_dir;
};

struct WalkResult {
    std::vector<Tensor> noises;  // x_0 .. x_steps
    std::vector<Tensor> frames;  // G(x_0) .. G(x_steps)
};

/// x_0 ~ N(0,1)^p, x_{i+1} = x_i + eta_i with eta_i ~ N(0, sigma^2 I), all
/// drawn in order from RngStream(seed, 0).
WalkResult random_walk(const Network& generator, const WalkConfig& config);

struct Outlier {
    std::size_t sample_index = 0;
    Tensor noise;
    Prediction prediction;
};

/// Every Monte Carlo sample (same streams as estimate_global_correctness)
/// whose composed classification is not `category`. Writes each generated
/// image as outlier_%06d.pgm (by sample index) when `output_dir` is set.
std::vector<Outlier> mine_outliers(const Network& classifier, const Network& generator, std::size_t category,
                                   std::size_t n, std::uint64_t seed, const EstimatorOptions& options = {},
                                   const std::optional<std::filesystem::path>& output_dir = std::nullopt,
                                   std::optional<FrameShape> frame_shape = std::nullopt);

struct ComparisonReport {
    /// grid[i][j]: classifier i against generator j.
    std::vector<std::vector<EstimateReport>> grid;
    /// Per classifier: max minus min point estimate over generators.
    std::vector<double> max_discrepancy;
};

/// Global correctness of every classifier against every generator, each
/// cell using the same seed (so generators with equal latent size see
/// identical noises). Throws ConfigError for empty lists and
/// CompositionError naming the generator index that does not fit.
ComparisonReport compare_generators(std::span<const Network> classifiers, std::span<const Network> generators,
                                    std::size_t category, std::size_t n, std::uint64_t seed,
                                    const EstimatorOptions& options = {});

ComparisonReport compare_generators(const Network& classifier, std::span<const Network> generators,
                                    std::size_t category, std::size_t n, std::uint64_t seed,
                                    const EstimatorOptions& options = {});

std::string to_json(const WalkResult& walk, const WalkConfig& config);
std::string to_json(const std::vector<Outlier>& outliers, std::size_t category, std::size_t n, std::uint64_t seed);
std::string to_json(const ComparisonReport& report);

} // namespace gmrobust
