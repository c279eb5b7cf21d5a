#include "gmrobust/rng.hpp"

#include <cmath>
#include <numbers>

#include "gmrobust/errors.hpp"

namespace gmrobust {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      key_(mix64(mix64(master_seed) ^ (stream_id * 0xD1B342C4A1F5D0B3ULL + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t RngStream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

double RngStream::next_uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_gaussian() noexcept {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
}

std::vector<Tensor> sample_gaussian(RngStream& rng, std::size_t dim, std::size_t count) {
    if (dim == 0 || count == 0) {
        throw ConfigError("sample_gaussian: dim and count must be positive");
    }
    std::vector<Tensor> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(Tensor::vector(gaussian_values(rng, dim)));
    }
    return out;
}

std::vector<double> gaussian_values(RngStream& rng, std::size_t dim, double stddev) {
    std::vector<double> v(dim);
    for (double& x : v) {
        x = stddev * rng.next_gaussian();
    }
    return v;
}

} // namespace gmrobust
