// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "test_support.hpp"

namespace {

using namespace gmrobust;
namespace fs = std::filesystem;

struct Result {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;  // 0 = no runtime limit
    std::function<Result()> body;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// 1. 20 seeds of n = 1e4 on the threshold model; truth is exactly 1/2.
Result monte_carlo_precision() {
    const Network c = testing::fixture("threshold_classifier_1d.nnw");
    const Network g = testing::fixture("identity_generator_1d.nnw");
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto r = estimate_global_correctness(c, g, 1, 10000, seed);
        worst = std::max(worst, std::abs(r.point_estimate - 0.5));
    }
    return {worst < 0.02, fmt("max |estimate - 0.5| = %.5f over 20 seeds (tolerance 0.02)", worst)};
}

// 2. Wilson interval against the closed form evaluated here.
Result wilson_interval() {
    const double k = 9900, n = 10000, z = 1.959963984540054;
    const double p = k / n;
    const double denom = 1 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    const Interval ci = confidence_interval(9900, 10000, 0.95);
    const double err = std::max(std::abs(ci.lo - (center - half)), std::abs(ci.hi - (center + half)));
    return {err < 1e-4, fmt("[%.6f, %.6f], max deviation %.2e (tolerance 1e-4)", ci.lo, ci.hi, err)};
}

// 3. Reverse mode against central differences, h = 1e-5.
Result gradient_fidelity() {
    const std::vector<std::string> nets{"relu_classifier_2d.nnw", "sigmoid_classifier_2d.nnw", "mixed_generator_3d.nnw",
                                        "relu_classifier_4d.nnw", "demo_classifier_8x8.nnw"};
    testing::TestRng rng(2718);
    double worst_rel = 0.0;
    double worst_abs_small = 0.0;
    for (const auto& name : nets) {
        const Network net = testing::fixture(name);
        for (int i = 0; i < 50; ++i) {
            const auto x = rng.vec(net.input_dim());
            for (std::size_t cls = 0; cls < net.output_dim(); ++cls) {
                const Tensor g = gradient(net, Tensor::vector(x), cls);
                const auto fd = testing::finite_difference_gradient(net, x, cls, 1e-5);
                for (std::size_t k = 0; k < fd.size(); ++k) {
                    const double diff = std::abs(g[k] - fd[k]);
                    if (std::abs(g[k]) < 1e-8) {
                        worst_abs_small = std::max(worst_abs_small, diff);
                    } else {
                        worst_rel = std::max(worst_rel, diff / std::abs(g[k]));
                    }
                }
            }
        }
    }
    return {worst_rel < 1e-4 && worst_abs_small < 1e-8,
            fmt("5 nets x 50 inputs, max relative error %.2e (tolerance 1e-4), max abs error where |g|<1e-8: %.2e",
                worst_rel, worst_abs_small)};
}

// 4. Certified balls must have no grid witness at 400 points per axis.
Result certifier_soundness() {
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"tanh_generator_2d.nnw", "relu_classifier_2d.nnw"},
        {"identity_generator_2d.nnw", "relu_classifier_2d.nnw"}};
    std::size_t certified = 0;
    std::size_t violations = 0;
    std::size_t instances = 0;
    for (const auto& [gname, cname] : pairs) {
        const Network gc = testing::composed_fixture(gname, cname);
        for (std::size_t i = 0; i < 200; ++i) {
            const Tensor x = Tensor::vector(sample_noise(404, i, 2));
            const std::size_t c = classify(gc, x).category;
            for (double eps : {0.01, 0.05, 0.1, 0.3}) {
                ++instances;
                if (certify(gc, x, eps, c).kind != VerdictKind::certified) continue;
                ++certified;
                if (grid_falsify(gc, x, eps, c, 400).has_value()) ++violations;
            }
        }
    }
    std::ostringstream s;
    s << instances << " instances, " << certified << " certified, " << violations
      << " certified-but-falsified (required 0)";
    return {violations == 0 && certified > 0, s.str()};
}

// 5. Bounds must contain P(N(0,1) > 0.1) = Phi(-0.1).
Result robustness_bracketing() {
    const Network c = testing::fixture("threshold_classifier_1d.nnw");
    const Network g = testing::fixture("identity_generator_1d.nnw");
    const double truth = testing::normal_cdf(-0.1);
    int contained = 0;
    double min_lo = 1.0, max_hi = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        EstimatorOptions opts;
        opts.level = 0.99;
        const auto r = estimate_global_robustness(c, g, 1, 0.1, 10000, seed, 16, opts);
        if (r.lower_bound <= truth && truth <= r.upper_bound) ++contained;
        min_lo = std::min(min_lo, r.lower_bound);
        max_hi = std::max(max_hi, r.upper_bound);
    }
    return {contained == 20, fmt("truth %.6f inside bounds for %.0f/20 seeds (level 0.99, n 1e4)", truth,
                                 static_cast<double>(contained))};
}

// 6. Every witness passes verify_adv_example and the closed-form boundary x1 + x2 = 1.
Result attack_validity() {
    const Network gc = testing::composed_fixture("identity_generator_2d.nnw", "linear_classifier_2d.nnw");
    const double eps = 0.5;
    auto side = [](const Tensor& x) { return x[0] + x[1] - 1.0 > 0.0 ? 1 : 0; };
    int bb = 0, wb = 0, invalid = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        AttackParams p;
        p.epsilon = eps;
        p.target_class = 1;  // class 0's logit is constant
        p.source_class = 0;
        p.max_restarts = 1;
        p.seed = seed;
        for (bool white : {false, true}) {
            const auto found = white ? white_box_attack(gc, p) : black_box_attack(gc, p);
            if (!found) continue;
            (white ? wb : bb) += 1;
            const bool ok = verify_adv_example(*found, gc, eps) &&
                            linf_distance(found->x.values(), found->x_prime.values()) <= eps &&
                            side(found->x) != side(found->x_prime);
            if (!ok) ++invalid;
        }
    }
    std::ostringstream s;
    s << "white-box " << wb << " successes, black-box " << bb << ", invalid witnesses " << invalid;
    return {invalid == 0 && wb >= bb && wb > 0, s.str()};
}

// 7. Same seed, --threads 1/2/4: byte-identical reports.
Result cli_determinism() {
    const fs::path root = fs::temp_directory_path() / "gmrobust_acceptance_cli";
    fs::remove_all(root);
    auto fx = [](const char* n) { return (testing::fixture_dir() / n).string(); };
    struct Run {
        std::vector<std::string> args;
        std::vector<std::string> files;
    };
    const std::vector<Run> runs{
        {{"correctness", "--classifier", fx("demo_classifier_8x8.nnw"), "--generator", fx("demo_generator_8x8.nnw"),
          "--category", "3", "--n", "20000", "--seed", "7", "--batch-size", "100"},
         {"correctness.json"}},
        {{"robustness", "--classifier", fx("relu_classifier_2d.nnw"), "--generator", fx("tanh_generator_2d.nnw"),
          "--category", "1", "--epsilon", "0.05", "--n", "5000", "--seed", "7"},
         {"robustness.json"}},
        {{"attack-bb", "--classifier", fx("relu_classifier_2d.nnw"), "--generator", fx("tanh_generator_2d.nnw"),
          "--epsilon", "0.3", "--target", "2", "--source", "0", "--seed", "7"},
         {"attack.json", "x.json", "x_prime.json"}},
        {{"attack-wb", "--classifier", fx("relu_classifier_2d.nnw"), "--generator", fx("tanh_generator_2d.nnw"),
          "--epsilon", "0.3", "--target", "2", "--source", "0", "--seed", "7"},
         {"attack.json", "x.json", "x_prime.json"}},
        {{"outliers", "--classifier", fx("demo_classifier_8x8.nnw"), "--generator", fx("demo_generator_8x8.nnw"),
          "--category", "3", "--n", "2000", "--seed", "7"},
         {"outliers.json"}},
    };
    std::size_t compared = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        std::vector<std::string> reference;
        for (const char* threads : {"1", "2", "4"}) {
            const fs::path out = root / (std::to_string(r) + "_" + threads);
            auto args = runs[r].args;
            args.insert(args.end(), {"--threads", threads, "--out", out.string()});
            std::ostringstream o, e;
            if (cli::run(args, o, e) != cli::kExitOk) {
                return {false, "run " + runs[r].args[0] + " failed: " + e.str()};
            }
            std::vector<std::string> contents;
            for (const auto& f : runs[r].files) {
                if (!fs::exists(out / f)) return {false, runs[r].args[0] + " did not write " + f};
                contents.push_back(read_text_file(out / f));
            }
            if (reference.empty()) {
                reference = contents;
            } else if (contents != reference) {
                return {false, runs[r].args[0] + " differs with --threads " + threads};
            }
            compared += contents.size();
        }
    }
    fs::remove_all(root);
    return {true, std::to_string(runs.size()) + " subcommands, " + std::to_string(compared) +
                      " report files identical across --threads 1/2/4"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Monte Carlo precision", 5, monte_carlo_precision},
        {2, "confidence interval", 0, wilson_interval},
        {3, "gradient fidelity", 10, gradient_fidelity},
        {4, "certifier soundness", 60, certifier_soundness},
        {5, "robustness bracketing", 30, robustness_bracketing},
        {6, "attack validity", 30, attack_validity},
        {7, "CLI determinism", 30, cli_determinism},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Result r{false, ""};
        try {
            r = c.body();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_seconds == 0 || secs < c.budget_seconds;
        const bool pass = r.pass && in_time;
        all = all && pass;
        std::printf("criterion %d (%s): %s; %s; %.2f s", c.id, c.name.c_str(), pass ? "PASS" : "FAIL",
                    r.detail.c_str(), secs);
        if (c.budget_seconds > 0) std::printf(" (limit %.0f s)", c.budget_seconds);
        std::printf("\n");
    }
    std::printf("criterion 8 (trained-model magnitude check): SKIP; needs the separately trained models\n");
    std::printf("criterion 9 (export fidelity): SKIP; needs the separately trained models\n");
    return all ? 0 : 1;
}
