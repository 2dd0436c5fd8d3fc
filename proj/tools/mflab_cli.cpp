#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mflab/cli/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mean-field limit laboratory: many-body vs Hartree dynamics under random pair interactions"};

    std::string config_path;
    std::string out_dir;
    int samples = -1;
    std::uint64_t seed = 0;
    int threads = -1;
    app.add_option("--config", config_path, "Experiment configuration (YAML, flat keys)")->required();
    app.add_option("--out-dir", out_dir, "Output directory (default: config output_dir, else ./out)");
    auto* samples_opt = app.add_option("--samples", samples, "Override the number of field samples")
                            ->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "Override the base seed");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: available cores)")
                            ->check(CLI::NonNegativeNumber);
    CLI11_PARSE(app, argc, argv);

    std::optional<mflab::cli::ExperimentConfig> parsed;
    try {
        parsed = mflab::cli::parse_config(config_path);
    } catch (const mflab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    auto& cfg = *parsed;
    if (*samples_opt) {
        cfg.plan.samples = samples;
        mflab::cli::override_setting(cfg, "samples", std::to_string(samples));
    }
    if (*seed_opt) {
        cfg.plan.base_seed = seed;
        mflab::cli::override_setting(cfg, "base_seed", std::to_string(seed));
    }
    if (*threads_opt) {
        cfg.threads = static_cast<unsigned>(threads);
        mflab::cli::override_setting(cfg, "threads", std::to_string(threads));
    }
    if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
        mflab::cli::override_setting(cfg, "output_dir", out_dir);
    }
    const std::string target = cfg.output_dir;
    return mflab::cli::run_experiment(std::move(cfg), target);
}
