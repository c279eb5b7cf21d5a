#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gmrobust/tensor.hpp"

namespace gmrobust {

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// Output word i is `mix64(key + (i + 1) * 0x9E3779B97F4A7C15)` where
/// `key = mix64(mix64(master_seed) ^ (stream_id * 0xD1B342C4A1F5D0B3 + 0x632BE59BD9B4E019))`
/// and `mix64` is the SplitMix64 finalizer. Streams with different ids are
/// independent of each other's consumption. Uniforms take the top 53 bits as
/// `(u + 0.5) * 2^-53`, so they lie strictly inside (0, 1). Normals use the
/// Box-Muller transform on consecutive uniform pairs (u1, u2), yielding
/// `r*cos(2*pi*u2)` then `r*sin(2*pi*u2)` with `r = sqrt(-2 ln u1)`.
///
/// Not thread-safe; give each worker its own stream id.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;
    double next_uniform() noexcept;
    double next_gaussian() noexcept;

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::optional<double> spare_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// `count` vectors of `dim` i.i.d. standard normal coordinates, drawn in
/// order from `rng`. Throws ConfigError when dim or count is zero.
std::vector<Tensor> sample_gaussian(RngStream& rng, std::size_t dim, std::size_t count);

/// One standard normal vector as raw values, the hot-path variant.
std::vector<double> gaussian_values(RngStream& rng, std::size_t dim, double stddev = 1.0);

} // namespace gmrobust
