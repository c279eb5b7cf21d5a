#include "cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmrobust/gmrobust.hpp"

namespace gmrobust::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string subcommand;
    std::string classifier_path;
    std::vector<std::string> classifier_paths;
    std::string generator_path;
    std::vector<std::string> generator_paths;
    std::size_t category = 0;
    double epsilon = 0.0;
    std::size_t n = 10000;
    std::optional<std::uint64_t> seed;
    double level = 0.95;
    std::size_t batch_size = 256;
    std::size_t budget = 16;
    unsigned threads = 0;
    std::string out_dir = "gmrobust-out";
    // attacks
    std::size_t target = 0;
    std::size_t source = 0;
    std::size_t n_step = 16;
    std::size_t n_dir = 10;
    std::optional<double> step_scale;
    std::size_t max_restarts = 100;
    // walk / images
    std::size_t steps = 16;
    double sigma = 0.05;
    std::optional<std::size_t> height;
    std::optional<std::size_t> width;
    // verify-pair
    std::string pair_dir;
    std::optional<double> verify_epsilon;
};

void add_seed_threads(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--seed", cfg.seed, "Master seed; drawn fresh and printed when omitted");
    sub.add_option("--threads", cfg.threads,
                   "Worker threads (falls back to GMROBUST_THREADS, then 1); never changes results");
}

void add_out(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--out", cfg.out_dir, "Output directory for reports and images")->capture_default_str();
}

void add_frame(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--height", cfg.height, "Image height in pixels (with --width)");
    sub.add_option("--width", cfg.width, "Image width in pixels (with --height)");
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::optional<FrameShape> frame_shape(const RunConfig& cfg) {
    if (cfg.height && cfg.width) {
        return FrameShape{*cfg.height, *cfg.width};
    }
    if (cfg.height || cfg.width) {
        throw CLI::ValidationError("--height/--width", "must be given together");
    }
    return std::nullopt;
}

nlohmann::ordered_json describe(const RunConfig& cfg, unsigned threads) {
    nlohmann::ordered_json j;
    j["subcommand"] = cfg.subcommand;
    const std::string& s = cfg.subcommand;
    const bool uses_classifier = s != "walk";
    if (s == "compare") {
        j["classifiers"] = cfg.classifier_paths;
        j["generators"] = cfg.generator_paths;
    } else {
        if (uses_classifier) j["classifier"] = cfg.classifier_path;
        j["generator"] = cfg.generator_path;
    }
    if (s == "correctness" || s == "robustness" || s == "outliers" || s == "compare") {
        j["category"] = cfg.category;
        j["n"] = cfg.n;
        j["level"] = cfg.level;
        j["batch_size"] = cfg.batch_size;
    }
    if (s == "robustness") {
        j["epsilon"] = cfg.epsilon;
        j["budget"] = cfg.budget;
    }
    if (s == "attack-bb" || s == "attack-wb") {
        j["epsilon"] = cfg.epsilon;
        j["target"] = cfg.target;
        j["source"] = cfg.source;
        j["n_step"] = cfg.n_step;
        if (s == "attack-bb") j["n_dir"] = cfg.n_dir;
        j["step_scale"] = cfg.step_scale.value_or(cfg.epsilon / static_cast<double>(cfg.n_step));
        j["max_restarts"] = cfg.max_restarts;
    }
    if (s == "walk") {
        j["steps"] = cfg.steps;
        j["sigma"] = cfg.sigma;
    }
    if (cfg.height) j["height"] = *cfg.height;
    if (cfg.width) j["width"] = *cfg.width;
    if (s == "verify-pair") {
        j["dir"] = cfg.pair_dir;
        if (cfg.verify_epsilon) j["epsilon"] = *cfg.verify_epsilon;
    } else {
        j["seed"] = cfg.seed.value_or(0);
        j["threads"] = threads;
        j["out"] = cfg.out_dir;
    }
    return j;
}

int run_correctness(const RunConfig& cfg, const EstimatorOptions& opts, std::ostream& out) {
    const Network c = load_model_file(cfg.classifier_path);
    const Network g = load_model_file(cfg.generator_path);
    const EstimateReport r = estimate_global_correctness(c, g, cfg.category, cfg.n, *cfg.seed, opts);
    const fs::path path = fs::path(cfg.out_dir) / "correctness.json";
    write_text_file(path, to_json(r));
    out << "correctness: " << r.successes << "/" << r.n << " = " << r.point_estimate << " CI(" << r.level
        << ") [" << r.confidence_interval.lo << ", " << r.confidence_interval.hi << "]\n";
    out << "report: " << path.string() << "\n";
    return kExitOk;
}

int run_robustness(const RunConfig& cfg, const EstimatorOptions& opts, std::ostream& out) {
    const Network c = load_model_file(cfg.classifier_path);
    const Network g = load_model_file(cfg.generator_path);
    const RobustnessReport r =
        estimate_global_robustness(c, g, cfg.category, cfg.epsilon, cfg.n, *cfg.seed, cfg.budget, opts);
    const fs::path path = fs::path(cfg.out_dir) / "robustness.json";
    write_text_file(path, to_json(r));
    out << "robustness: certified " << r.certified << ", falsified " << r.falsified << ", unknown " << r.unknown
        << " of " << r.n << "; bounds [" << r.lower_bound << ", " << r.upper_bound << "] at " << r.level << "\n";
    out << "report: " << path.string() << "\n";
    return kExitOk;
}

int run_attack(const RunConfig& cfg, bool white_box, std::ostream& out) {
    const Network c = load_model_file(cfg.classifier_path);
    const Network g = load_model_file(cfg.generator_path);
    const Network composed = compose(g, c);

    AttackParams params;
    params.n_step = cfg.n_step;
    params.n_dir = cfg.n_dir;
    params.epsilon = cfg.epsilon;
    params.step_scale = cfg.step_scale;
    params.target_class = cfg.target;
    params.source_class = cfg.source;
    params.max_restarts = cfg.max_restarts;
    params.seed = *cfg.seed;
    params.threads = resolve_threads(cfg.threads);

    const auto found = white_box ? white_box_attack(composed, params) : black_box_attack(composed, params);
    const fs::path dir(cfg.out_dir);

    nlohmann::ordered_json summary;
    summary["format"] = "gmrobust-attack-report";
    summary["version"] = 1;
    summary["algorithm"] = white_box ? "white-box" : "black-box";
    summary["epsilon"] = params.epsilon;
    summary["norm"] = "linf";
    summary["target"] = params.target_class;
    summary["source"] = params.source_class;
    summary["n_step"] = params.n_step;
    if (!white_box) summary["n_dir"] = params.n_dir;
    summary["step_scale"] = params.alpha();
    summary["max_restarts"] = params.max_restarts;
    summary["seed"] = params.seed;
    summary["found"] = found.has_value();
    if (found) {
        summary["restart"] = found->restart;
        summary["step"] = found->step;
        summary["category_x"] = found->category_x;
        summary["category_x_prime"] = found->category_x_prime;
        summary["linf_distance"] = found->linf_distance;
        summary["x"] = "x.json";
        summary["x_prime"] = "x_prime.json";

        save_tensor_file(dir / "x.json", found->x, {{"role", "noise"}, {"pair", "x"}});
        save_tensor_file(dir / "x_prime.json", found->x_prime, {{"role", "noise"}, {"pair", "x_prime"}});
        const auto shape = frame_shape(cfg).value_or(default_frame_shape(g.output_dim()));
        const Activation act = g.layers().back().activation;
        write_pgm(dir / "image_x.pgm", found->image_x, shape, act);
        write_pgm(dir / "image_x_prime.pgm", found->image_x_prime, shape, act);
        out << "found realistic adversarial example at restart " << found->restart << ": class "
            << found->category_x << " -> " << found->category_x_prime << ", linf distance " << found->linf_distance
            << "\n";
    } else {
        out << "no realistic adversarial example found within " << params.max_restarts << " restarts\n";
    }
    write_text_file(dir / "attack.json", summary.dump(2) + "\n");
    out << "report: " << (dir / "attack.json").string() << "\n";
    return kExitOk;
}

int run_walk(const RunConfig& cfg, std::ostream& out) {
    const Network g = load_model_file(cfg.generator_path);
    WalkConfig wc;
    wc.steps = cfg.steps;
    wc.sigma = cfg.sigma;
    wc.seed = *cfg.seed;
    wc.frame_shape = frame_shape(cfg);
    wc.output_dir = fs::path(cfg.out_dir);
    const WalkResult walk = random_walk(g, wc);
    write_text_file(fs::path(cfg.out_dir) / "walk.json", to_json(walk, wc));
    out << "walk: wrote " << walk.frames.size() << " frames to " << cfg.out_dir << "\n";
    return kExitOk;
}

int run_outliers(const RunConfig& cfg, const EstimatorOptions& opts, std::ostream& out) {
    const Network c = load_model_file(cfg.classifier_path);
    const Network g = load_model_file(cfg.generator_path);
    const auto outliers =
        mine_outliers(c, g, cfg.category, cfg.n, *cfg.seed, opts, fs::path(cfg.out_dir), frame_shape(cfg));
    write_text_file(fs::path(cfg.out_dir) / "outliers.json", to_json(outliers, cfg.category, cfg.n, *cfg.seed));
    out << "outliers: " << outliers.size() << " of " << cfg.n << " samples misclassified\n";
    return kExitOk;
}

int run_compare(const RunConfig& cfg, const EstimatorOptions& opts, std::ostream& out) {
    std::vector<Network> classifiers;
    for (const auto& p : cfg.classifier_paths) classifiers.push_back(load_model_file(p));
    std::vector<Network> generators;
    for (const auto& p : cfg.generator_paths) generators.push_back(load_model_file(p));
    const ComparisonReport r = compare_generators(classifiers, generators, cfg.category, cfg.n, *cfg.seed, opts);
    write_text_file(fs::path(cfg.out_dir) / "comparison.json", to_json(r));
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        out << "classifier " << cfg.classifier_paths[i] << ":";
        for (const auto& cell : r.grid[i]) out << " " << cell.point_estimate;
        out << " (max discrepancy " << r.max_discrepancy[i] << ")\n";
    }
    return kExitOk;
}

int run_verify_pair(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Network c = load_model_file(cfg.classifier_path);
    const Network g = load_model_file(cfg.generator_path);
    const Network composed = compose(g, c);
    const fs::path dir(cfg.pair_dir);

    double epsilon = 0.0;
    if (cfg.verify_epsilon) {
        epsilon = *cfg.verify_epsilon;
    } else {
        const auto summary = nlohmann::json::parse(read_text_file(dir / "attack.json"));
        epsilon = summary.at("epsilon").get<double>();
    }
    const Tensor x = load_tensor_file(dir / "x.json");
    const Tensor x_prime = load_tensor_file(dir / "x_prime.json");
    if (x.shape() != x_prime.shape()) {
        throw DimensionError("x.json and x_prime.json have shapes " + x.shape_string() + " and " +
                             x_prime.shape_string());
    }
    // Images are not needed for re-verification; the noises are.
    RealisticAdvExample candidate{x, x_prime, 0, 0, x, x_prime, linf_distance(x.values(), x_prime.values())};
    if (verify_adv_example(candidate, composed, epsilon)) {
        out << "verify-pair: valid (linf distance " << candidate.linf_distance << " <= " << epsilon
            << ", categories differ)\n";
        return kExitOk;
    }
    err << "verify-pair: invalid pair in " << dir.string() << " (linf distance " << candidate.linf_distance
        << ", epsilon " << epsilon << ")\n";
    return kExitDomainError;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Global correctness and robustness of image classifiers against generative models", "gmrobust"};
    app.require_subcommand(1);

    auto* correctness = app.add_subcommand("correctness", "Monte Carlo estimate of global correctness");
    auto* robustness = app.add_subcommand("robustness", "Monte Carlo estimate of global (epsilon, delta)-robustness");
    auto* attack_bb = app.add_subcommand("attack-bb", "Black-box search for a realistic adversarial example");
    auto* attack_wb = app.add_subcommand("attack-wb", "White-box (gradient) search for a realistic adversarial example");
    auto* walk = app.add_subcommand("walk", "Random walk in noise space, frames written as PGM");
    auto* outliers = app.add_subcommand("outliers", "Dump generated images the classifier gets wrong");
    auto* compare = app.add_subcommand("compare", "Global correctness of classifiers across several generators");
    auto* verify = app.add_subcommand("verify-pair", "Re-verify an attack's witness pair");

    for (CLI::App* sub : {correctness, robustness, outliers, attack_bb, attack_wb, verify}) {
        sub->add_option("--classifier", cfg.classifier_path, "Classifier model file")->required();
    }
    for (CLI::App* sub : {correctness, robustness, outliers, attack_bb, attack_wb, walk, verify}) {
        sub->add_option("--generator", cfg.generator_path, "Generator model file")->required();
    }
    for (CLI::App* sub : {correctness, robustness, outliers, compare}) {
        sub->add_option("--category", cfg.category, "Category the generator is meant to produce")->required();
        sub->add_option("--n", cfg.n, "Number of Monte Carlo samples")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--level", cfg.level, "Confidence level")
            ->capture_default_str()
            ->check(CLI::IsMember({0.9, 0.95, 0.99}));
        sub->add_option("--batch-size", cfg.batch_size, "Forward-pass batch size")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    }
    for (CLI::App* sub : {correctness, robustness, outliers, compare, attack_bb, attack_wb, walk}) {
        add_seed_threads(*sub, cfg);
        add_out(*sub, cfg);
    }
    for (CLI::App* sub : {outliers, attack_bb, attack_wb, walk}) {
        add_frame(*sub, cfg);
    }

    robustness->add_option("--epsilon", cfg.epsilon, "Infinity-norm radius in noise space")
        ->required()
        ->check(CLI::NonNegativeNumber);
    robustness->add_option("--budget", cfg.budget, "Gradient steps per rival class when falsifying a sample")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    for (CLI::App* sub : {attack_bb, attack_wb}) {
        sub->add_option("--epsilon", cfg.epsilon, "Infinity-norm radius in noise space")
            ->required()
            ->check(CLI::PositiveNumber);
        sub->add_option("--target", cfg.target, "Class whose score is maximised")->required();
        sub->add_option("--source", cfg.source, "Class the generator produces")->required();
        sub->add_option("--n-step", cfg.n_step, "Search steps per restart")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--step-scale", cfg.step_scale, "Step size alpha (default epsilon / n-step)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-restarts", cfg.max_restarts, "Restarts before giving up")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    }
    attack_bb->add_option("--n-dir", cfg.n_dir, "Random directions probed per step")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    compare->add_option("--classifier", cfg.classifier_paths, "Classifier model file (repeatable)")->required();
    compare->add_option("--generator", cfg.generator_paths, "Generator model file (repeatable)")->required();

    walk->add_option("--steps", cfg.steps, "Number of walk steps")->capture_default_str()->check(CLI::PositiveNumber);
    walk->add_option("--sigma", cfg.sigma, "Per-step noise standard deviation")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    verify->add_option("--dir", cfg.pair_dir, "Directory written by attack-bb/attack-wb")->required();
    verify->add_option("--epsilon", cfg.verify_epsilon, "Radius to check (default: the attack's)")
        ->check(CLI::NonNegativeNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "gmrobust: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand != "verify-pair" && !cfg.seed) {
        cfg.seed = fresh_seed();
    }
    const unsigned threads = resolve_threads(cfg.threads);
    out << "run-config: " << describe(cfg, threads).dump() << "\n";

    EstimatorOptions opts;
    opts.level = cfg.level;
    opts.batch_size = cfg.batch_size;
    opts.threads = threads;

    try {
        if (cfg.subcommand != "verify-pair") {
            fs::create_directories(cfg.out_dir);
        }
        const std::string& s = cfg.subcommand;
        if (s == "correctness") return run_correctness(cfg, opts, out);
        if (s == "robustness") return run_robustness(cfg, opts, out);
        if (s == "attack-bb") return run_attack(cfg, false, out);
        if (s == "attack-wb") return run_attack(cfg, true, out);
        if (s == "walk") return run_walk(cfg, out);
        if (s == "outliers") return run_outliers(cfg, opts, out);
        if (s == "compare") return run_compare(cfg, opts, out);
        return run_verify_pair(cfg, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "gmrobust: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "gmrobust " << cfg.subcommand << ": " << e.what() << "\n";
        return kExitDomainError;
    }
}

} // namespace gmrobust::cli
