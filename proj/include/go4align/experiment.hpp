#pragma once

// End-to-end runs on synthetic problems: train, compare final risks with
// each task's own optimum, and measure convergence spread.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "go4align/config.hpp"
#include "go4align/testbed.hpp"
#include "go4align/weighters.hpp"

namespace go4align {

struct RunSummary {
  std::string strategy;
  bool agrm_wrap = false;
  std::size_t k = 0;  // 0 when the strategy does not group
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  Vector final_risks;
  Vector optimum_risks;
  Vector relative_drop_pct;
  double delta_m_pct = 0.0;
  std::vector<std::size_t> epochs_to_converge;
  double convergence_difference = 0.0;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
};

RunResult run_experiment(const SyntheticProblem& problem,
                         const WeighterConfig& weighting,
                         const TrainConfig& train_config, std::uint64_t seed,
                         double convergence_fraction = 0.05);

struct SweepResult {
  std::map<std::size_t, double> scores;  // k -> delta_m_pct
  std::map<std::size_t, RunSummary> runs;
  std::size_t selected = 0;
};

// Runs every k in [2, M] and picks one with elbow_select on Δm%.
SweepResult sweep_k(const SyntheticProblem& problem, WeighterConfig weighting,
                    const TrainConfig& train_config, std::uint64_t seed,
                    double convergence_fraction = 0.05);

// Resolves k = "elbow" through sweep_k first.
RunResult run_experiment(const RunConfig& config);

void write_summary_csv(std::ostream& out, const RunSummary& summary);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace go4align
