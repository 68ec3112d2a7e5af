#include "go4align/testbed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "go4align/error.hpp"

namespace go4align {

namespace {

using ConstMap = Eigen::Map<const Eigen::VectorXd>;

ConstMap as_eigen(std::span<const double> v) {
  return ConstMap(v.data(), static_cast<Eigen::Index>(v.size()));
}

void require_params(const SyntheticProblem& problem, const Params& params) {
  if (params.values.size() != problem.param_count()) {
    throw Error(ErrorCode::kDimension,
                fmt::format("expected {} parameters, got {}",
                            problem.param_count(), params.values.size()));
  }
}

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

void SyntheticProblem::validate() const {
  if (tasks.size() < 2) {
    throw Error(ErrorCode::kInvalidTaskCount, "problem needs at least 2 tasks");
  }
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    const TaskData& t = tasks[m];
    if (static_cast<std::size_t>(t.a.cols()) != shared_dim ||
        t.a.rows() != t.b.size() ||
        static_cast<std::size_t>(t.c.size()) != head_dim) {
      throw Error(ErrorCode::kDimension,
                  fmt::format("task {} has inconsistent shapes", m));
    }
    if (!(t.scale > 0.0)) {
      throw Error(ErrorCode::kDimension,
                  fmt::format("task {} scale must be > 0", m));
    }
  }
}

SyntheticProblem make_problem(const ProblemSpec& spec) {
  if (spec.tasks < 2) {
    throw Error(ErrorCode::kInvalidTaskCount, "problem needs at least 2 tasks");
  }
  if (spec.shared_dim == 0 || spec.rows == 0) {
    throw Error(ErrorCode::kConfig, "shared_dim and rows must be positive");
  }
  Vector scales = spec.scales.empty() ? Vector(spec.tasks, 1.0) : spec.scales;
  if (scales.size() != spec.tasks) {
    throw Error(ErrorCode::kConfig,
                fmt::format("{} scales for {} tasks", scales.size(), spec.tasks));
  }
  std::vector<std::size_t> ids = spec.data_id;
  if (ids.empty()) {
    ids.resize(spec.tasks);
    for (std::size_t m = 0; m < spec.tasks; ++m) ids[m] = m;
  }
  if (ids.size() != spec.tasks) {
    throw Error(ErrorCode::kConfig,
                fmt::format("{} data ids for {} tasks", ids.size(), spec.tasks));
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  };

  const auto ds = static_cast<Eigen::Index>(spec.shared_dim);
  const auto rows = static_cast<Eigen::Index>(spec.rows);
  const Eigen::VectorXd common = draw(ds);

  std::vector<std::pair<std::size_t, TaskData>> by_id;
  SyntheticProblem problem;
  problem.shared_dim = spec.shared_dim;
  problem.head_dim = spec.head_dim;
  for (std::size_t m = 0; m < spec.tasks; ++m) {
    auto found = std::find_if(by_id.begin(), by_id.end(),
                              [&](const auto& e) { return e.first == ids[m]; });
    if (found == by_id.end()) {
      TaskData t;
      t.a.resize(rows, ds);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < ds; ++c) {
          t.a(r, c) = normal(rng) / std::sqrt(static_cast<double>(rows));
        }
      }
      const Eigen::VectorXd target = common + spec.conflict * draw(ds);
      t.b = spec.magnitude * (t.a * target + spec.noise * draw(rows));
      t.c = spec.magnitude * draw(static_cast<Eigen::Index>(spec.head_dim));
      by_id.emplace_back(ids[m], t);
      found = std::prev(by_id.end());
    }
    TaskData t = found->second;
    t.scale = scales[m];
    problem.tasks.push_back(std::move(t));
  }
  problem.validate();
  return problem;
}

ProblemSpec canonical_imbalanced_spec(std::uint64_t seed) {
  ProblemSpec spec;
  spec.tasks = 3;
  spec.shared_dim = 4;
  spec.head_dim = 2;
  spec.rows = 8;
  spec.scales = {1.0, 10.0, 1000.0};
  spec.conflict = 0.3;
  spec.noise = 0.5;
  spec.magnitude = 0.02;
  spec.seed = seed;
  return spec;
}

TrainConfig canonical_train_config() {
  TrainConfig config;
  config.optimizer = OptimizerKind::kSgd;
  config.lr = 3e-4;
  config.iterations = 2000;
  config.epoch_length = 50;
  return config;
}

Vector task_risks(const SyntheticProblem& problem, const Params& params) {
  require_params(problem, params);
  const auto shared = as_eigen(params.shared(problem));
  Vector risks(problem.task_count());
  for (std::size_t m = 0; m < risks.size(); ++m) {
    const TaskData& t = problem.tasks[m];
    const double fit = (t.a * shared - t.b).squaredNorm();
    const double head = (as_eigen(params.head(problem, m)) - t.c).squaredNorm();
    risks[m] = t.scale * 0.5 * (fit + head);
  }
  return risks;
}

Vector weighted_gradient(const SyntheticProblem& problem, const Params& params,
                         std::span<const double> weights) {
  require_params(problem, params);
  if (weights.size() != problem.task_count()) {
    throw Error(ErrorCode::kDimension,
                fmt::format("{} weights for {} tasks", weights.size(),
                            problem.task_count()));
  }
  Vector grad(problem.param_count(), 0.0);
  Eigen::Map<Eigen::VectorXd> g_shared(grad.data(),
                                       static_cast<Eigen::Index>(problem.shared_dim));
  const auto shared = as_eigen(params.shared(problem));
  for (std::size_t m = 0; m < problem.task_count(); ++m) {
    const TaskData& t = problem.tasks[m];
    const double w = weights[m] * t.scale;
    g_shared += w * (t.a.transpose() * (t.a * shared - t.b));
    Eigen::Map<Eigen::VectorXd> g_head(
        grad.data() + problem.shared_dim + m * problem.head_dim,
        static_cast<Eigen::Index>(problem.head_dim));
    g_head = w * (as_eigen(params.head(problem, m)) - t.c);
  }
  return grad;
}

Params weighted_minimizer(const SyntheticProblem& problem,
                          std::span<const double> weights) {
  if (weights.size() != problem.task_count()) {
    throw Error(ErrorCode::kDimension, "weighted_minimizer: weight count");
  }
  const auto ds = static_cast<Eigen::Index>(problem.shared_dim);
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(ds, ds);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ds);
  for (std::size_t m = 0; m < problem.task_count(); ++m) {
    const TaskData& t = problem.tasks[m];
    const double w = weights[m] * t.scale;
    normal += w * t.a.transpose() * t.a;
    rhs += w * t.a.transpose() * t.b;
  }
  Params p = Params::zeros(problem);
  const Eigen::VectorXd shared = normal.completeOrthogonalDecomposition().solve(rhs);
  std::copy(shared.data(), shared.data() + ds, p.values.begin());
  for (std::size_t m = 0; m < problem.task_count(); ++m) {
    auto head = p.head(problem, m);
    const Eigen::VectorXd& c = problem.tasks[m].c;
    std::copy(c.data(), c.data() + c.size(), head.begin());
  }
  return p;
}

Vector per_task_optimum(const SyntheticProblem& problem) {
  Vector out(problem.task_count());
  for (std::size_t m = 0; m < problem.task_count(); ++m) {
    Vector onehot(problem.task_count(), 0.0);
    onehot[m] = 1.0;
    out[m] = task_risks(problem, weighted_minimizer(problem, onehot))[m];
  }
  return out;
}

std::size_t Trajectory::epoch_count() const {
  if (epoch_length == 0) return 0;
  return (iterations.size() + epoch_length - 1) / epoch_length;
}

namespace {

std::vector<Vector> epoch_means(const Trajectory& t, bool scaled) {
  std::vector<Vector> out(t.epoch_count(), Vector(t.task_count, 0.0));
  std::vector<std::size_t> counts(out.size(), 0);
  for (std::size_t i = 0; i < t.iterations.size(); ++i) {
    const std::size_t e = i / t.epoch_length;
    const Vector& src = scaled ? t.iterations[i].scaled : t.iterations[i].risks;
    for (std::size_t m = 0; m < t.task_count; ++m) out[e][m] += src[m];
    ++counts[e];
  }
  for (std::size_t e = 0; e < out.size(); ++e) {
    for (double& v : out[e]) v /= static_cast<double>(counts[e]);
  }
  return out;
}

}  // namespace

std::vector<Vector> Trajectory::epoch_risks() const { return epoch_means(*this, false); }
std::vector<Vector> Trajectory::epoch_scaled() const { return epoch_means(*this, true); }

Trajectory train(const SyntheticProblem& problem, WeighterConfig weighting,
                 const TrainConfig& config, std::uint64_t seed) {
  problem.validate();
  if (config.epoch_length == 0) {
    throw Error(ErrorCode::kConfig, "epoch_length must be >= 1");
  }
  const auto start = std::chrono::steady_clock::now();
  weighting.seed = seed;
  if (weighting.strategy == Strategy::kDWA) weighting.epoch_length = config.epoch_length;

  Weighter weighter(weighting, problem.task_count());
  Optimizer optimizer(config.optimizer, config.lr, problem.param_count());

  Trajectory traj;
  traj.task_count = problem.task_count();
  traj.epoch_length = config.epoch_length;
  traj.seed = seed;
  traj.iterations.reserve(config.iterations);
  Params params = Params::zeros(problem);

  for (std::size_t t = 0; t < config.iterations; ++t) {
    Vector risks = task_risks(problem, params);
    for (std::size_t m = 0; m < risks.size(); ++m) {
      if (!std::isfinite(risks[m]) || risks[m] > kDivergenceThreshold) {
        throw DivergenceError(
            t, fmt::format("diverged at iteration {}: risk[{}] = {}", t, m, risks[m]));
      }
    }
    WeighterOutput out = weighter.weigh(risks);
    const Vector grad = weighted_gradient(problem, params, out.weights);
    optimizer.step(params.values, grad);

    IterationRecord rec;
    rec.scaled.resize(risks.size());
    for (std::size_t m = 0; m < risks.size(); ++m) rec.scaled[m] = out.weights[m] * risks[m];
    if (out.grouping) {
      rec.labels.assign(out.grouping->labels.begin(), out.grouping->labels.end());
    } else {
      rec.labels.assign(risks.size(), -1);
    }
    rec.risks = std::move(risks);
    rec.weights = std::move(out.weights);
    traj.iterations.push_back(std::move(rec));
  }

  traj.final_params = std::move(params);
  traj.wall_time_s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start).count();
  return traj;
}

std::vector<std::size_t> epochs_to_converge(const Trajectory& trajectory,
                                            std::span<const double> thresholds) {
  if (thresholds.size() != trajectory.task_count) {
    throw Error(ErrorCode::kDimension, "one threshold per task required");
  }
  const auto epochs = trajectory.epoch_risks();
  std::vector<std::size_t> out(trajectory.task_count, epochs.size());
  for (std::size_t m = 0; m < trajectory.task_count; ++m) {
    std::size_t first = epochs.size();
    for (std::size_t e = epochs.size(); e-- > 0;) {
      if (!(epochs[e][m] < thresholds[m])) break;
      first = e;
    }
    out[m] = first;
  }
  return out;
}

Vector plateau_thresholds(const Trajectory& trajectory, double fraction) {
  const auto epochs = trajectory.epoch_risks();
  if (epochs.empty()) {
    throw Error(ErrorCode::kInvalidInput, "empty trajectory");
  }
  Vector out(trajectory.task_count);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double first = epochs.front()[m];
    const double last = epochs.back()[m];
    const double gap = std::max(std::abs(first - last), 1e-12 * std::abs(last));
    out[m] = last + fraction * gap;
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const std::size_t m = trajectory.task_count;
  out << "iteration";
  for (const char* prefix : {"risk", "weight", "label", "scaled"}) {
    for (std::size_t i = 0; i < m; ++i) out << ',' << prefix << '_' << i;
  }
  out << '\n';
  for (std::size_t t = 0; t < trajectory.iterations.size(); ++t) {
    const IterationRecord& r = trajectory.iterations[t];
    out << t;
    for (double v : r.risks) out << ',' << fmt17(v);
    for (double v : r.weights) out << ',' << fmt17(v);
    for (long v : r.labels) out << ',' << v;
    for (double v : r.scaled) out << ',' << fmt17(v);
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in, std::size_t epoch_length) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kIo, "trajectory CSV is empty");
  }
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (columns == 0 || columns % 4 != 0) {
    throw Error(ErrorCode::kIo, "trajectory CSV header has an unexpected width");
  }
  Trajectory traj;
  traj.task_count = columns / 4;
  traj.epoch_length = epoch_length;
  const std::size_t m = traj.task_count;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns + 1) {
      throw Error(ErrorCode::kIo, fmt::format("line {}: expected {} cells, got {}",
                                              line_no, columns + 1, cells.size()));
    }
    IterationRecord r;
    try {
      for (std::size_t i = 0; i < m; ++i) {
        r.risks.push_back(std::stod(cells[1 + i]));
        r.weights.push_back(std::stod(cells[1 + m + i]));
        r.labels.push_back(std::stol(cells[1 + 2 * m + i]));
        r.scaled.push_back(std::stod(cells[1 + 3 * m + i]));
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::kIo, fmt::format("line {}: malformed number", line_no));
    }
    traj.iterations.push_back(std::move(r));
  }
  return traj;
}

}  // namespace go4align
