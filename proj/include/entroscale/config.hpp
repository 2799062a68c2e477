#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace entroscale::cli {

// Flat key=value configuration. Every key has a default; a config file (lines
// of key=value, '#' comments) overrides defaults, --key value overrides both.
// Unknown keys are rejected.
struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    // Gaussian token model for the theory commands
    std::size_t d = 64;
    std::size_t d_r = 64;
    std::size_t d_key = 64;
    std::size_t q_rows = 4;
    std::size_t trials = 200;
    std::vector<std::size_t> sizes = {64, 128, 256, 512, 1024, 2048, 4096};
    std::size_t train_tokens = 512;
    std::vector<std::size_t> verify_sizes = {1024, 2048, 4096};
    std::size_t decomp_cases = 1000;
    std::size_t moment_grid = 10; // grid is moment_grid x moment_grid

    // toy diffusion
    std::size_t toy_patch = 2;
    std::size_t toy_d_model = 32;
    std::size_t toy_d_key = 16;
    std::size_t toy_d_ff = 64;
    std::size_t toy_layers = 2;
    std::size_t toy_d_sin = 16;
    std::size_t toy_diff_steps = 200;
    double toy_beta_start = 1e-4;
    double toy_beta_end = 0.02;
    std::size_t toy_train_steps = 500;
    std::size_t toy_batch = 16;
    double toy_lr = 0.01;
    double toy_momentum = 0.9;
    std::size_t toy_image_size = 8;

    // sampling
    std::string checkpoint; // empty: <out_dir>/toy.ckpt
    std::size_t height = 8;
    std::size_t width = 8;
    std::string policy = "fixed"; // fixed | scaled

    std::string checkpoint_path() const {
        return checkpoint.empty() ? out_dir + "/toy.ckpt" : checkpoint;
    }
};

// Throws Error(ConfigError) with a message naming the offending key/line.
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void load_config_file(ExperimentConfig& cfg, const std::string& path); // IoError if unreadable

} // namespace entroscale::cli
