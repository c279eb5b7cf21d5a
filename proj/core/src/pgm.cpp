#include "gmrobust/pgm.hpp"

#include <algorithm>
#include <cmath>

#include "gmrobust/errors.hpp"
#include "gmrobust/model_io.hpp"

namespace gmrobust {

FrameShape default_frame_shape(std::size_t pixels) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(pixels))));
    if (side * side == pixels) {
        return {side, side};
    }
    return {1, pixels};
}

std::optional<std::pair<double, double>> activation_range(Activation output_activation) {
    switch (output_activation) {
    case Activation::tanh: return std::pair{-1.0, 1.0};
    case Activation::sigmoid: return std::pair{0.0, 1.0};
    default: return std::nullopt;
    }
}

std::string encode_pgm(const Tensor& image, FrameShape shape, Activation output_activation) {
    if (shape.height * shape.width != image.size() || shape.height == 0) {
        throw DimensionError("frame shape " + std::to_string(shape.height) + "x" + std::to_string(shape.width) +
                             " does not hold " + std::to_string(image.size()) + " pixels");
    }
    const auto values = image.values();
    double lo = 0.0;
    double hi = 0.0;
    if (auto range = activation_range(output_activation)) {
        std::tie(lo, hi) = *range;
    } else {
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }

    std::string out = "P5\n" + std::to_string(shape.width) + " " + std::to_string(shape.height) + "\n255\n";
    out.reserve(out.size() + values.size());
    for (double v : values) {
        long pixel = 0;
        if (hi > lo) {
            pixel = std::lround((v - lo) / (hi - lo) * 255.0);
        }
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(pixel, 0L, 255L))));
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const Tensor& image, FrameShape shape,
               Activation output_activation) {
    write_text_file(path, encode_pgm(image, shape, output_activation));
}

} // namespace gmrobust
