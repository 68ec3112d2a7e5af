#pragma once

// Synthetic multi-task quadratic problems with analytic gradients, and the
// training loop that alternates weighting and a parameter step.
//
// Task m has risk
//   L_m(theta) = s_m * (0.5 * ||A_m theta_s - b_m||^2 + 0.5 * ||theta_m - c_m||^2)
// where theta_s is shared and theta_m is the task's own head.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "go4align/indicators.hpp"
#include "go4align/optim.hpp"
#include "go4align/weighters.hpp"

namespace go4align {

struct TaskData {
  Eigen::MatrixXd a;  // rows x shared_dim
  Eigen::VectorXd b;  // rows
  Eigen::VectorXd c;  // head_dim
  double scale = 1.0;
};

struct SyntheticProblem {
  std::size_t shared_dim = 0;
  std::size_t head_dim = 0;
  std::vector<TaskData> tasks;

  std::size_t task_count() const { return tasks.size(); }
  std::size_t param_count() const { return shared_dim + tasks.size() * head_dim; }

  // Throws kDimension on inconsistent shapes or a nonpositive scale.
  void validate() const;
};

// Flat parameter vector laid out as [shared | head_0 | head_1 | ...].
struct Params {
  Vector values;

  static Params zeros(const SyntheticProblem& problem) {
    return Params{Vector(problem.param_count(), 0.0)};
  }

  std::span<double> shared(const SyntheticProblem& p) {
    return {values.data(), p.shared_dim};
  }
  std::span<const double> shared(const SyntheticProblem& p) const {
    return {values.data(), p.shared_dim};
  }
  std::span<double> head(const SyntheticProblem& p, std::size_t m) {
    return {values.data() + p.shared_dim + m * p.head_dim, p.head_dim};
  }
  std::span<const double> head(const SyntheticProblem& p, std::size_t m) const {
    return {values.data() + p.shared_dim + m * p.head_dim, p.head_dim};
  }
};

struct ProblemSpec {
  std::size_t tasks = 3;
  std::size_t shared_dim = 4;
  std::size_t head_dim = 2;
  std::size_t rows = 8;
  Vector scales;                     // defaults to all ones
  std::vector<std::size_t> data_id;  // tasks with equal id share A, b, c
  double conflict = 0.5;             // spread of per-task shared optima
  double noise = 0.1;                // residual noise in b
  double magnitude = 1.0;            // multiplies b and c
  std::uint64_t seed = 0;
};

SyntheticProblem make_problem(const ProblemSpec& spec);

// Three tasks with scales {1, 10, 1000}. Paired with
// canonical_train_config(), plain linear scalarization visibly starves the
// small-scale tasks.
ProblemSpec canonical_imbalanced_spec(std::uint64_t seed);

Vector task_risks(const SyntheticProblem& problem, const Params& params);

// Gradient of sum_m lambda_m L_m with lambda held constant.
Vector weighted_gradient(const SyntheticProblem& problem, const Params& params,
                         std::span<const double> weights);

// Minimizer of sum_m lambda_m L_m (least squares on the shared part).
Params weighted_minimizer(const SyntheticProblem& problem,
                          std::span<const double> weights);

// Each task's own optimum risk, i.e. single-task training with the shared
// block fitted to that task alone.
Vector per_task_optimum(const SyntheticProblem& problem);

struct IterationRecord {
  Vector risks;
  Vector weights;
  std::vector<long> labels;  // -1 when the strategy does not group
  Vector scaled;             // weights ⊙ risks
};

struct Trajectory {
  std::vector<IterationRecord> iterations;
  std::size_t task_count = 0;
  std::size_t epoch_length = 50;
  Params final_params;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  std::size_t size() const { return iterations.size(); }
  std::size_t epoch_count() const;
  // Per-epoch mean of risks (or of scaled risks); a trailing partial epoch
  // is averaged over its own length.
  std::vector<Vector> epoch_risks() const;
  std::vector<Vector> epoch_scaled() const;
};

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double lr = 1e-3;
  std::size_t iterations = 1000;
  std::size_t epoch_length = 50;
};

// SGD, lr 3e-4, 2000 iterations in epochs of 50.
TrainConfig canonical_train_config();

inline constexpr double kDivergenceThreshold = 1e12;

// The weighter's seed and cadence are taken from `weighting`; `seed`
// overrides weighting.seed.
Trajectory train(const SyntheticProblem& problem, WeighterConfig weighting,
                 const TrainConfig& config, std::uint64_t seed);

// First epoch whose average risk is below the threshold and stays below;
// epoch_count() when that never happens.
std::vector<std::size_t> epochs_to_converge(const Trajectory& trajectory,
                                            std::span<const double> thresholds);

// Plateau thresholds: final + fraction * |first - final| on epoch averages.
Vector plateau_thresholds(const Trajectory& trajectory, double fraction = 0.05);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory_csv(std::istream& in, std::size_t epoch_length);

}  // namespace go4align
