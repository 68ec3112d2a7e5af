#include "go4align/experiment.hpp"

#include <ostream>

#include <fmt/format.h>

#include "go4align/error.hpp"
#include "go4align/metrics.hpp"

namespace go4align {

namespace {

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

bool groups(const WeighterConfig& w) {
  return w.strategy == Strategy::kGO4Align || w.agrm_wrap;
}

}  // namespace

RunResult run_experiment(const SyntheticProblem& problem,
                         const WeighterConfig& weighting,
                         const TrainConfig& train_config, std::uint64_t seed,
                         double convergence_fraction) {
  RunResult result;
  result.trajectory = train(problem, weighting, train_config, seed);

  RunSummary& s = result.summary;
  s.strategy = to_string(weighting.strategy);
  s.agrm_wrap = weighting.agrm_wrap;
  s.k = groups(weighting) ? weighting.k : 0;
  s.seed = seed;
  s.iterations = train_config.iterations;
  s.final_risks = task_risks(problem, result.trajectory.final_params);
  s.optimum_risks = per_task_optimum(problem);
  s.relative_drop_pct.resize(s.final_risks.size());
  for (std::size_t m = 0; m < s.final_risks.size(); ++m) {
    s.relative_drop_pct[m] =
        100.0 * (s.final_risks[m] - s.optimum_risks[m]) / s.optimum_risks[m];
  }
  // Every task metric here is a risk, so lower is better throughout.
  s.delta_m_pct = delta_m(s.final_risks, s.optimum_risks,
                          Directions(s.final_risks.size(), false));
  if (!result.trajectory.iterations.empty()) {
    const Vector thresholds =
        plateau_thresholds(result.trajectory, convergence_fraction);
    s.epochs_to_converge = epochs_to_converge(result.trajectory, thresholds);
    s.convergence_difference =
        convergence_difference(std::span<const std::size_t>(s.epochs_to_converge));
  } else {
    s.epochs_to_converge.assign(problem.task_count(), 0);
  }
  return result;
}

SweepResult sweep_k(const SyntheticProblem& problem, WeighterConfig weighting,
                    const TrainConfig& train_config, std::uint64_t seed,
                    double convergence_fraction) {
  if (!groups(weighting)) {
    throw Error(ErrorCode::kConfig,
                "strategy: k sweep needs go4align or agrm_wrap: true");
  }
  SweepResult sweep;
  for (std::size_t k = 2; k <= problem.task_count(); ++k) {
    weighting.k = k;
    RunResult r = run_experiment(problem, weighting, train_config, seed,
                                 convergence_fraction);
    sweep.scores[k] = r.summary.delta_m_pct;
    sweep.runs[k] = std::move(r.summary);
  }
  sweep.selected = elbow_select(sweep.scores);
  return sweep;
}

RunResult run_experiment(const RunConfig& config) {
  const SyntheticProblem problem = make_problem(config.problem);
  WeighterConfig weighting = config.weighting;
  if (config.k_elbow && groups(weighting)) {
    weighting.k = sweep_k(problem, weighting, config.train, config.seed,
                          config.convergence_fraction)
                      .selected;
  }
  return run_experiment(problem, weighting, config.train, config.seed,
                        config.convergence_fraction);
}

void write_summary_csv(std::ostream& out, const RunSummary& s) {
  out << "key,value\n";
  out << "strategy," << s.strategy << '\n';
  out << "agrm_wrap," << (s.agrm_wrap ? 1 : 0) << '\n';
  out << "k," << s.k << '\n';
  out << "seed," << s.seed << '\n';
  out << "iterations," << s.iterations << '\n';
  out << "delta_m_pct," << fmt17(s.delta_m_pct) << '\n';
  out << "convergence_difference," << fmt17(s.convergence_difference) << '\n';
  for (std::size_t m = 0; m < s.final_risks.size(); ++m) {
    out << "final_risk_" << m << ',' << fmt17(s.final_risks[m]) << '\n';
    out << "optimum_risk_" << m << ',' << fmt17(s.optimum_risks[m]) << '\n';
    out << "relative_drop_pct_" << m << ',' << fmt17(s.relative_drop_pct[m]) << '\n';
    out << "epochs_to_converge_" << m << ',' << s.epochs_to_converge[m] << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "k,delta_m_pct,convergence_difference,selected\n";
  for (const auto& [k, score] : sweep.scores) {
    out << k << ',' << fmt17(score) << ','
        << fmt17(sweep.runs.at(k).convergence_difference) << ','
        << (k == sweep.selected ? 1 : 0) << '\n';
  }
}

}  // namespace go4align
