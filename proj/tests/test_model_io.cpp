#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "test_support.hpp"

namespace gmrobust {
namespace {

using testing::TestRng;

// A small document whose fields the tests below mutate one at a time.
std::string doc(const std::string& role = "\"classifier\"", const std::string& input_dim = "2",
                const std::string& output_dim = "2", const std::string& layers =
                    R"([{"rows": 2, "cols": 2, "activation": "identity", "weights": [1, 0, 0, 1], "bias": [0, 0]}])",
                const std::string& version = "1") {
    return R"({"format": "gmrobust-model", "version": )" + version + R"(, "role": )" + role +
           R"(, "input_dim": )" + input_dim + R"(, "output_dim": )" + output_dim +
           R"(, "meta": {}, "layers": )" + layers + "}";
}

std::string layer(int rows, int cols, const std::string& act, const std::string& w, const std::string& b) {
    return R"({"rows": )" + std::to_string(rows) + R"(, "cols": )" + std::to_string(cols) +
           R"(, "activation": ")" + act + R"(", "weights": )" + w + R"(, "bias": )" + b + "}";
}

void expect_invariant(const std::string& text, const std::string& name, std::size_t layer_index) {
    try {
        load_model(text);
        ADD_FAILURE() << "expected InvariantError " << name;
    } catch (const InvariantError& e) {
        EXPECT_EQ(e.invariant(), name);
        EXPECT_EQ(e.layer(), layer_index) << e.what();
        EXPECT_NE(std::string(e.what()).find(name), std::string::npos);
    }
}

TEST(LoadModel, MinimalValidFile) {
    const Network net = load_model(doc());
    EXPECT_EQ(net.input_dim(), 2u);
    EXPECT_EQ(net.output_dim(), 2u);
    EXPECT_EQ(net.role(), Role::classifier);
    EXPECT_EQ(forward(net, Tensor::vector({3, 4})), Tensor::vector({3, 4}));
}

TEST(LoadModel, WeightsLengthNamesLayerZero) {
    const std::string text = doc("\"classifier\"", "2", "2", "[" + layer(2, 2, "identity", "[1, 0, 0]", "[0, 0]") + "]");
    expect_invariant(text, "weights-length", 0);
    try {
        load_model(text);
    } catch (const InvariantError& e) {
        EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos) << e.what();
    }
}

TEST(LoadModel, EachInvariantHasItsOwnViolation) {
    const std::string ok0 = layer(3, 2, "relu", "[1, 2, 3, 4, 5, 6]", "[0, 0, 0]");
    expect_invariant(doc("\"critic\""), "role", InvariantError::npos);
    expect_invariant(doc("\"classifier\"", "0"), "positive-dims", InvariantError::npos);
    expect_invariant(doc("\"classifier\"", "2", "2", "[]"), "nonempty-layers", InvariantError::npos);
    expect_invariant(doc("\"classifier\"", "2", "2", "[" + layer(2, 2, "softmax", "[1, 0, 0, 1]", "[0, 0]") + "]"),
                     "activation", 0);
    expect_invariant(doc("\"classifier\"", "2", "2", "[" + layer(2, 2, "relu", "[1, 0, 0, 1e999]", "[0, 0]") + "]"),
                     "finite", InvariantError::npos);
    expect_invariant(doc("\"classifier\"", "2", "3", "[" + ok0 + ", " + layer(3, 3, "identity", "[1,0,0,0,1,0,0,0,1]", "[0, 0]") + "]"),
                     "bias-length", 1);
    expect_invariant(doc("\"classifier\"", "4", "3", "[" + ok0 + "]"), "input-dim", 0);
    expect_invariant(doc("\"classifier\"", "2", "2", "[" + ok0 + ", " + layer(2, 2, "identity", "[1, 0, 0, 1]", "[0, 0]") + "]"),
                     "layer-chain", 1);
    expect_invariant(doc("\"classifier\"", "2", "5", "[" + ok0 + "]"), "output-dim", 0);
    expect_invariant(doc("\"classifier\"", "2", "2", "[" + layer(0, 2, "relu", "[]", "[]") + "]"), "positive-dims", 0);
}

TEST(LoadModel, UnsupportedVersion) {
    EXPECT_THROW(load_model(doc("\"classifier\"", "2", "2",
                                R"([{"rows": 2, "cols": 2, "activation": "identity", "weights": [1, 0, 0, 1], "bias": [0, 0]}])",
                                "2")),
                 VersionError);
}

TEST(LoadModel, SyntaxErrorReportsPosition) {
    const std::string text = "{\n  \"format\": \"gmrobust-model\",\n  \"version\": 1,,\n}";
    try {
        load_model(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_GT(e.column(), 0u);
    }
}

TEST(LoadModel, SchemaErrorsAreParseErrors) {
    EXPECT_THROW(load_model("[1, 2]"), ParseError);
    EXPECT_THROW(load_model(R"({"format": "something-else", "version": 1})"), ParseError);
    std::string missing = doc();
    missing.replace(missing.find("\"role\""), 6, "\"rolex\"");
    EXPECT_THROW(load_model(missing), ParseError);
    EXPECT_THROW(load_model(doc("\"classifier\"", "\"2\"")), ParseError);
}

TEST(LoadModelFile, ErrorsCarryThePath) {
    const auto path = std::filesystem::temp_directory_path() / "gmrobust_bad_model.nnw";
    write_text_file(path, doc("\"classifier\"", "2", "2", "[" + layer(2, 2, "identity", "[1]", "[0, 0]") + "]"));
    try {
        load_model_file(path);
        FAIL() << "expected InvariantError";
    } catch (const InvariantError& e) {
        EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_model_file(path.string() + ".missing"), Error);
    std::filesystem::remove(path);
}

TEST(SaveModel, RoundTripPreservesEvaluation) {
    TestRng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const Network net = testing::random_network(rng, Role::generator, {3, 7, 5},
                                                    {Activation::tanh, Activation::sigmoid});
        const Network back = load_model(save_model(net));
        for (int i = 0; i < 100; ++i) {
            const Tensor x = Tensor::vector(rng.vec(3));
            ASSERT_EQ(forward(back, x), forward(net, x));
        }
    }
}

TEST(SaveModel, KeepsMetaAndActivations) {
    TestRng rng(1);
    const Network base = testing::random_network(rng, Role::classifier, {2, 3, 2},
                                                 {Activation::relu, Activation::identity});
    const Network net(Role::classifier, base.layers(), Meta{{"dataset", "blobs"}, {"seed", "12"}});
    const std::string text = save_model(net);
    EXPECT_NE(text.find("\"activation\": \"relu\""), std::string::npos);
    const Network back = load_model(text);
    EXPECT_EQ(back.meta(), net.meta());
    EXPECT_EQ(back.layers()[0].activation, Activation::relu);
    EXPECT_EQ(back.layers()[1].activation, Activation::identity);
}

TEST(SaveModel, FixturesAreCanonical) {
    for (const auto& path : testing::all_fixture_files()) {
        const std::string original = read_text_file(path);
        const std::string once = save_model(load_model(original));
        EXPECT_EQ(once, original) << path;
        EXPECT_EQ(save_model(load_model(once)), once) << path;
    }
}

TEST(SaveModel, ComposedNetworksAreRejected) {
    const Network gc = testing::composed_fixture("identity_generator_2d.nnw", "linear_classifier_2d.nnw");
    EXPECT_THROW(save_model(gc), ConfigError);
}

TEST(SaveModel, LargeSkeletonRoundTrip) {
    TestRng rng(5);
    const Network g = testing::random_network(rng, Role::generator, {100, 256, 512, 1024, 784},
                                              {Activation::relu, Activation::relu, Activation::relu, Activation::tanh});
    const Network back = load_model(save_model(g));
    ASSERT_EQ(back.layers().size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(back.layers()[i].weights, g.layers()[i].weights);
        EXPECT_EQ(back.layers()[i].bias, g.layers()[i].bias);
    }
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.0), "0");
    EXPECT_EQ(format_double(-1.5), "-1.5");
    EXPECT_EQ(format_double(0.1), "0.1");
    TestRng rng(8);
    for (int i = 0; i < 20000; ++i) {
        double v;
        const std::uint64_t bits = rng.next();
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        const std::string s = format_double(v);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    }
}

TEST(TensorDocument, RoundTrip) {
    const Tensor t = Tensor::vector({0.1, -2.5e-300, 1e300, 3});
    const std::string text = save_tensor(t, Meta{{"kind", "noise"}});
    EXPECT_EQ(load_tensor(text), t);
    const Tensor m = Tensor::matrix(2, 2, {1, 2, 3, 4});
    EXPECT_EQ(load_tensor(save_tensor(m)), m);
}

TEST(TensorDocument, LengthMismatchIsInvariantViolation) {
    const std::string text = R"({"format": "gmrobust-tensor", "version": 1, "meta": {}, "shape": [3], "data": [1, 2]})";
    try {
        load_tensor(text);
        FAIL() << "expected InvariantError";
    } catch (const InvariantError& e) {
        EXPECT_EQ(e.invariant(), "data-length");
    }
}

} // namespace
} // namespace gmrobust
