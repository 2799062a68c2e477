#pragma once

#include "entroscale/config.hpp"

namespace entroscale::cli {

// Exit codes: 0 pass, 1 check failure, 2 config error, 3 IO error,
// 4 checkpoint error. Commands throw Error; run_cli maps codes.
int cmd_verify_theory(const ExperimentConfig& cfg);
int cmd_entropy_scan(const ExperimentConfig& cfg);
int cmd_train_toy(const ExperimentConfig& cfg);
int cmd_sample_toy(const ExperimentConfig& cfg);

int run_cli(int argc, const char* const* argv);

} // namespace entroscale::cli
