// Writes the model fixtures used by the tests and the docs.
//
//   gmrobust-fixtures <out-dir>                  small hand-built fixtures
//   gmrobust-fixtures <out-dir> --mnist-skeleton also the 100-256-512-1024-784
//                                                generator with random weights
//
// Random weights are N(0, 1/fan_in) from a fixed seed, rounded to four
// decimals so the files stay readable and diff-friendly.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gmrobust/model_io.hpp"
#include "gmrobust/network.hpp"
#include "gmrobust/rng.hpp"

using namespace gmrobust;
namespace fs = std::filesystem;

namespace {

double round4(double v) {
    return std::round(v * 1e4) / 1e4;
}

Layer random_layer(RngStream& rng, std::size_t in, std::size_t out, Activation act) {
    std::vector<double> w(in * out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : w) {
        v = round4(scale * rng.next_gaussian());
    }
    std::vector<double> b(out);
    for (double& v : b) {
        v = round4(0.1 * rng.next_gaussian());
    }
    return Layer{Tensor::matrix(out, in, std::move(w)), Tensor::vector(std::move(b)), act};
}

Layer dense(std::size_t out, std::size_t in, std::vector<double> w, std::vector<double> b, Activation act) {
    return Layer{Tensor::matrix(out, in, std::move(w)), Tensor::vector(std::move(b)), act};
}

Network random_net(Role role, std::uint64_t stream, const std::vector<std::size_t>& widths,
                   const std::vector<Activation>& acts, Meta meta) {
    RngStream rng(20240601, stream);
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        layers.push_back(random_layer(rng, widths[i], widths[i + 1], acts[i]));
    }
    return Network(role, std::move(layers), std::move(meta));
}

void emit(const fs::path& dir, const std::string& name, const Network& net) {
    save_model_file(dir / name, net);
    std::cout << "wrote " << (dir / name).string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: gmrobust-fixtures <out-dir> [--mnist-skeleton]\n";
        return 2;
    }
    const fs::path dir = argv[1];
    const bool skeleton = argc > 2 && std::string(argv[2]) == "--mnist-skeleton";
    fs::create_directories(dir);

    using A = Activation;
    const Meta fixture{{"source", "hand-built fixture"}};

    emit(dir, "identity_generator_1d.nnw",
         Network(Role::generator, {dense(1, 1, {1}, {0}, A::identity)}, fixture));
    // logits (-x, x): category 1 iff x > 0, ties at 0 go to category 0.
    emit(dir, "threshold_classifier_1d.nnw",
         Network(Role::classifier, {dense(2, 1, {-1, 1}, {0, 0}, A::identity)},
                 {{"source", "hand-built fixture"}, {"boundary", "x = 0"}}));
    emit(dir, "constant_classifier_1d.nnw",
         Network(Role::classifier, {dense(2, 1, {0, 0}, {0, 1}, A::identity)},
                 {{"source", "hand-built fixture"}, {"category", "1"}}));

    emit(dir, "identity_generator_2d.nnw",
         Network(Role::generator, {dense(2, 2, {1, 0, 0, 1}, {0, 0}, A::identity)}, fixture));
    // logits (0, x1 + x2 - 1): category 1 iff x1 + x2 > 1.
    emit(dir, "linear_classifier_2d.nnw",
         Network(Role::classifier, {dense(2, 2, {0, 0, 1, 1}, {0, -1}, A::identity)},
                 {{"source", "hand-built fixture"}, {"boundary", "x1 + x2 = 1"}}));
    emit(dir, "constant_classifier_2d.nnw",
         Network(Role::classifier, {dense(3, 2, {0, 0, 0, 0, 0, 0}, {0, 1, 0}, A::identity)},
                 {{"source", "hand-built fixture"}, {"category", "1"}}));

    emit(dir, "tanh_generator_2d.nnw",
         random_net(Role::generator, 1, {2, 4, 2}, {A::tanh, A::identity}, fixture));
    emit(dir, "relu_classifier_2d.nnw",
         random_net(Role::classifier, 2, {2, 8, 8, 3}, {A::relu, A::relu, A::identity}, fixture));
    emit(dir, "sigmoid_classifier_2d.nnw",
         random_net(Role::classifier, 3, {2, 5, 3}, {A::sigmoid, A::identity}, fixture));
    emit(dir, "mixed_generator_3d.nnw",
         random_net(Role::generator, 4, {3, 6, 5, 4}, {A::relu, A::tanh, A::sigmoid}, fixture));
    emit(dir, "relu_classifier_4d.nnw",
         random_net(Role::classifier, 5, {4, 7, 3}, {A::relu, A::identity}, fixture));

    // Depends on y1 + y2 only, so it cannot tell a generator from its
    // output-swapped twin.
    emit(dir, "symmetric_classifier_2d.nnw",
         Network(Role::classifier,
                 {dense(3, 2, {0.5, 0.5, -0.7, -0.7, 1.2, 1.2}, {0.1, 0.2, -0.3}, A::relu),
                  dense(2, 3, {1.0, -0.5, 0.3, -0.4, 0.9, -0.2}, {0, 0.05}, A::identity)},
                 fixture));
    {
        const Network g = load_model_file(dir / "tanh_generator_2d.nnw");
        std::vector<Layer> layers = g.layers();
        const Layer& last = layers.back();
        std::vector<double> w(last.weights.values().begin(), last.weights.values().end());
        const std::size_t cols = last.input_dim();
        std::vector<double> swapped(w.size());
        std::copy(w.begin() + static_cast<std::ptrdiff_t>(cols), w.end(), swapped.begin());
        std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(cols),
                  swapped.begin() + static_cast<std::ptrdiff_t>(cols));
        layers.back() = dense(2, cols, swapped, {last.bias[1], last.bias[0]}, last.activation);
        emit(dir, "tanh_generator_2d_swapped.nnw",
             Network(Role::generator, std::move(layers), {{"source", "tanh_generator_2d.nnw, outputs swapped"}}));
    }

    // Digit-like demo pair: 8x8 frames, 10 categories.
    emit(dir, "demo_generator_8x8.nnw",
         random_net(Role::generator, 6, {4, 16, 64}, {A::relu, A::tanh}, {{"source", "random demo"}, {"frame", "8x8"}}));
    emit(dir, "demo_classifier_8x8.nnw",
         random_net(Role::classifier, 7, {64, 16, 10}, {A::relu, A::identity}, {{"source", "random demo"}}));

    if (skeleton) {
        emit(dir, "mnist_skeleton_generator.nnw",
             random_net(Role::generator, 8, {100, 256, 512, 1024, 784},
                        {A::relu, A::relu, A::relu, A::tanh},
                        {{"source", "random weights"}, {"latent_dim", "100"}, {"frame", "28x28"}}));
        emit(dir, "mnist_skeleton_classifier_small.nnw",
             random_net(Role::classifier, 9, {784, 32, 64, 200, 10},
                        {A::relu, A::relu, A::relu, A::identity}, {{"source", "random weights"}, {"arch", "small"}}));
    }
    return 0;
}
