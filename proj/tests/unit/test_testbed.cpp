#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "go4align/error.hpp"
#include "go4align/testbed.hpp"
#include "oracles.hpp"

using namespace go4align;
using doctest::Approx;

namespace {

Trajectory from_risks(const std::vector<Vector>& rows, std::size_t epoch_length) {
  Trajectory t;
  t.task_count = rows.front().size();
  t.epoch_length = epoch_length;
  for (const Vector& r : rows) {
    IterationRecord rec;
    rec.risks = r;
    rec.weights = Vector(r.size(), 1.0);
    rec.scaled = r;
    rec.labels.assign(r.size(), -1);
    t.iterations.push_back(rec);
  }
  return t;
}

ProblemSpec symmetric_spec() {
  ProblemSpec s;
  s.tasks = 2;
  s.data_id = {0, 0};
  s.noise = 0.0;
  s.seed = 4;
  return s;
}

}  // namespace

TEST_CASE("task_risks on a hand-sized problem") {
  SyntheticProblem p;
  p.shared_dim = 1;
  p.head_dim = 1;
  for (int i = 0; i < 2; ++i) {
    TaskData t;
    t.a = Eigen::MatrixXd::Ones(1, 1);
    t.b = Eigen::VectorXd::Zero(1);
    t.c = Eigen::VectorXd::Zero(1);
    p.tasks.push_back(t);
  }
  Params params = Params::zeros(p);
  params.values[0] = 2.0;
  const Vector r = task_risks(p, params);
  CHECK(r[0] == 2.0);
  CHECK(r[1] == 2.0);
  CHECK_THROWS_AS(task_risks(p, Params{Vector{1.0}}), Error);
  p.tasks[1].scale = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("closed-form minimizer zeroes consistent risks") {
  const SyntheticProblem p = make_problem(symmetric_spec());
  const Params opt = weighted_minimizer(p, Vector{1, 1});
  for (double r : task_risks(p, opt)) CHECK(r <= 1e-20);
}

TEST_CASE("per-task optimum bounds every weighted minimizer") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  const SyntheticProblem p = make_problem(canonical_imbalanced_spec(1));
  const Vector best = per_task_optimum(p);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector lam{u(rng), u(rng), u(rng)};
    const Vector r = task_risks(p, weighted_minimizer(p, lam));
    for (std::size_t m = 0; m < 3; ++m) CHECK(r[m] >= best[m] * (1 - 1e-9));
  }
}

TEST_CASE("weighted_gradient matches finite differences") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    ProblemSpec spec;
    spec.tasks = 2 + trial % 3;
    spec.seed = trial;
    spec.scales.assign(spec.tasks, 0.0);
    for (double& s : spec.scales) s = std::pow(10.0, u(rng));
    const SyntheticProblem p = make_problem(spec);
    Params params = Params::zeros(p);
    for (double& x : params.values) x = n(rng);
    Vector lam(spec.tasks);
    for (double& l : lam) l = u(rng);
    const Vector g = weighted_gradient(p, params, lam);
    auto f = [&](const Vector& x) {
      const Vector r = task_risks(p, Params{x});
      double v = 0.0;
      for (std::size_t m = 0; m < r.size(); ++m) v += lam[m] * r[m];
      return v;
    };
    const Vector fd = oracle::central_gradient(f, params.values);
    double scale = 0.0;
    for (double x : fd) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(std::abs(g[i] - fd[i]) <= 1e-6 * std::max(scale, 1e-12));
  }
  const SyntheticProblem p = make_problem(ProblemSpec{});
  for (double x : weighted_gradient(p, Params{Vector(p.param_count(), 0.3)}, Vector(3, 0.0)))
    CHECK(x == 0.0);
}

TEST_CASE("LS on identical tasks converges in lockstep") {
  const SyntheticProblem p = make_problem(symmetric_spec());
  WeighterConfig ls;
  ls.strategy = Strategy::kLS;
  TrainConfig cfg;
  cfg.lr = 0.1;
  cfg.iterations = 3000;
  const Trajectory t = train(p, ls, cfg, 0);
  long hit0 = -1, hit1 = -1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (hit0 < 0 && t.iterations[i].risks[0] < 1e-6) hit0 = static_cast<long>(i);
    if (hit1 < 0 && t.iterations[i].risks[1] < 1e-6) hit1 = static_cast<long>(i);
  }
  CHECK(hit0 >= 0);
  CHECK(hit0 == hit1);
}

TEST_CASE("training is deterministic and zero iterations is a no-op") {
  const SyntheticProblem p = make_problem(canonical_imbalanced_spec(3));
  WeighterConfig go;
  TrainConfig cfg = canonical_train_config();
  cfg.iterations = 300;
  std::ostringstream a, b;
  write_trajectory_csv(a, train(p, go, cfg, 5));
  write_trajectory_csv(b, train(p, go, cfg, 5));
  CHECK(a.str() == b.str());

  cfg.iterations = 0;
  const Trajectory empty = train(p, go, cfg, 5);
  CHECK(empty.size() == 0);
  CHECK(empty.final_params.values == Params::zeros(p).values);
}

TEST_CASE("divergence reports the iteration") {
  const SyntheticProblem p = make_problem(canonical_imbalanced_spec(0));
  WeighterConfig ls;
  ls.strategy = Strategy::kLS;
  TrainConfig cfg;
  cfg.lr = 1.0;
  cfg.iterations = 500;
  try {
    train(p, ls, cfg, 0);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.iteration() > 0);
    CHECK(e.iteration() < 500);
  }
}

TEST_CASE("epochs_to_converge examples") {
  const Trajectory t = from_risks({{1.0, 0.1}, {0.5, 0.1}, {0.25, 0.1}, {0.125, 0.1}}, 1);
  const auto e = epochs_to_converge(t, Vector{0.2, 0.2});
  CHECK(e[0] == 3);
  CHECK(e[1] == 0);
  const Trajectory flat = from_risks({{1.0, 1.0}, {1.0, 1.0}}, 1);
  CHECK(epochs_to_converge(flat, Vector{0.5, 0.5}) == std::vector<std::size_t>{2, 2});
  // A later rise above the threshold resets convergence.
  const Trajectory bounce = from_risks({{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.1}}, 1);
  CHECK(epochs_to_converge(bounce, Vector{0.2, 0.2})[0] == 2);
}

TEST_CASE("epoch averages and plateau thresholds") {
  const Trajectory t = from_risks({{4, 1}, {2, 1}, {1, 1}, {1, 1}, {3, 3}}, 2);
  CHECK(t.epoch_count() == 3);
  const auto e = t.epoch_risks();
  CHECK(e[0] == Vector{3, 1});
  CHECK(e[1] == Vector{1, 1});
  CHECK(e[2] == Vector{3, 3});
  const Vector th = plateau_thresholds(from_risks({{10, 1}, {2, 1}}, 1), 0.05);
  CHECK(th[0] == Approx(2.4));
  CHECK(th[1] > 1.0);
}

TEST_CASE("trajectory CSV round-trips exactly") {
  const SyntheticProblem p = make_problem(canonical_imbalanced_spec(2));
  WeighterConfig go;
  TrainConfig cfg = canonical_train_config();
  cfg.iterations = 120;
  const Trajectory t = train(p, go, cfg, 1);
  std::stringstream s;
  write_trajectory_csv(s, t);
  const std::string header = s.str().substr(0, s.str().find('\n'));
  CHECK(header ==
        "iteration,risk_0,risk_1,risk_2,weight_0,weight_1,weight_2,label_0,label_1,"
        "label_2,scaled_0,scaled_1,scaled_2");
  const Trajectory back = read_trajectory_csv(s, cfg.epoch_length);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.iterations[i].risks == t.iterations[i].risks);
    CHECK(back.iterations[i].weights == t.iterations[i].weights);
    CHECK(back.iterations[i].labels == t.iterations[i].labels);
  }
}
