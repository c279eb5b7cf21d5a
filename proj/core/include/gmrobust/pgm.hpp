#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "gmrobust/tensor.hpp"

namespace gmrobust {

struct FrameShape {
    std::size_t height = 0;
    std::size_t width = 0;
};

/// Square frame when `pixels` is a perfect square, otherwise a single row.
FrameShape default_frame_shape(std::size_t pixels);

/// Value range mapped onto [0, 255]: (-1, 1) for tanh, (0, 1) for sigmoid,
/// nothing (per-frame min/max) for other activations.
std::optional<std::pair<double, double>> activation_range(Activation output_activation);

/// Binary PGM (P5): header "P5\n<width> <height>\n255\n" then one byte per
/// pixel, row-major, pixel = clamp(round((v - lo) / (hi - lo) * 255), 0, 255)
/// with round-half-away-from-zero. A flat frame (hi == lo) encodes as zeros.
std::string encode_pgm(const Tensor& image, FrameShape shape, Activation output_activation);

void write_pgm(const std::filesystem::path& path, const Tensor& image, FrameShape shape,
               Activation output_activation);

} // namespace gmrobust
