#pragma once

// Declarative run configuration (YAML). Unknown keys are rejected so a typo
// in a hyperparameter cannot silently fall back to a default.
//
//   problem:   tasks, shared_dim, head_dim, rows, scales, data_id,
//              conflict, noise, magnitude, seed
//   strategy:  name, beta, k (integer or "elbow"), cadence, engine,
//              restarts, temperature, uw_lr, agrm_wrap
//   optimizer: kind, lr, iterations, epoch_length, seed,
//              convergence_fraction
//   output:    dir

#include <cstdint>
#include <filesystem>
#include <string>

#include "go4align/testbed.hpp"
#include "go4align/weighters.hpp"

namespace go4align {

struct RunConfig {
  ProblemSpec problem;
  WeighterConfig weighting;
  bool k_elbow = false;
  TrainConfig train;
  std::uint64_t seed = 0;
  double convergence_fraction = 0.05;
  std::filesystem::path output_dir = "out";
};

// Errors are kConfig with the offending field path in the message, e.g.
// "strategy.beta: expected a number".
RunConfig parse_run_config(const std::string& yaml);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace go4align
