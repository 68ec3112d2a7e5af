#include "go4align/commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "go4align/config.hpp"
#include "go4align/error.hpp"
#include "go4align/experiment.hpp"
#include "go4align/metrics.hpp"
#include "go4align/verify.hpp"

namespace go4align {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  return f;
}

void print_summary(std::ostream& out, const RunSummary& s) {
  fmt::print(out, "strategy {}{}  k {}  seed {}\n", s.strategy,
             s.agrm_wrap ? "+agrm" : "", s.k, s.seed);
  fmt::print(out, "delta_m%  {:.4f}\n", s.delta_m_pct);
  fmt::print(out, "convergence difference  {:.4f}\n", s.convergence_difference);
  for (std::size_t m = 0; m < s.final_risks.size(); ++m) {
    fmt::print(out, "task {}  risk {:.6g}  optimum {:.6g}  drop {:.3f}%  epochs {}\n", m,
               s.final_risks[m], s.optimum_risks[m], s.relative_drop_pct[m],
               s.epochs_to_converge[m]);
  }
}

// Maps library errors to exit codes; divergence is a run failure, the rest
// are usage problems.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const DivergenceError& e) {
    fmt::print(err, "error: {} (iteration {})\n", e.what(), e.iteration());
    return kExitFailure;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return e.code() == ErrorCode::kIo ? kExitFailure : kExitUsage;
  }
}

}  // namespace

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& out_dir,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig config = load_run_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    const SyntheticProblem problem = make_problem(config.problem);

    WeighterConfig weighting = config.weighting;
    fs::create_directories(config.output_dir);
    const bool grouping = weighting.strategy == Strategy::kGO4Align || weighting.agrm_wrap;
    if (config.k_elbow && grouping) {
      const SweepResult sweep = sweep_k(problem, weighting, config.train, config.seed,
                                        config.convergence_fraction);
      auto f = open_output(config.output_dir / "sweep.csv");
      write_sweep_csv(f, sweep);
      weighting.k = sweep.selected;
    }
    const RunResult result = run_experiment(problem, weighting, config.train,
                                            config.seed, config.convergence_fraction);
    {
      auto f = open_output(config.output_dir / "trajectory.csv");
      write_trajectory_csv(f, result.trajectory);
    }
    {
      auto f = open_output(config.output_dir / "summary.csv");
      write_summary_csv(f, result.summary);
    }
    print_summary(out, result.summary);
    fmt::print(out, "wall time {:.3f}s\n", result.trajectory.wall_time_s);
    fmt::print(out, "wrote {}\n", config.output_dir.string());
    return kExitOk;
  });
}

int cmd_sweep_k(const fs::path& config_path, const std::optional<fs::path>& out_dir,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig config = load_run_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    const SyntheticProblem problem = make_problem(config.problem);
    const SweepResult sweep = sweep_k(problem, config.weighting, config.train,
                                      config.seed, config.convergence_fraction);
    fs::create_directories(config.output_dir);
    auto f = open_output(config.output_dir / "sweep.csv");
    write_sweep_csv(f, sweep);
    for (const auto& [k, score] : sweep.scores) {
      fmt::print(out, "k {}  delta_m% {:.4f}\n", k, score);
    }
    fmt::print(out, "selected k {}\n", sweep.selected);
    return kExitOk;
  });
}

int cmd_verify_tables(const fs::path& fixture_dir, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&] {
    const auto checks = verify_tables(fixture_dir);
    std::size_t failed = 0;
    for (const CellCheck& c : checks) {
      fmt::print(out, "{} {:<10} {:<9} {:<8} recomputed {:>8.3f} published {:>8.2f} tol {:.2f}\n",
                 c.pass ? "PASS" : "FAIL", c.table, c.method, c.column, c.recomputed,
                 c.published, c.tolerance);
      failed += c.pass ? 0 : 1;
    }
    fmt::print(out, "{} of {} cells within tolerance\n", checks.size() - failed,
               checks.size());
    return failed == 0 ? kExitOk : kExitFailure;
  });
}

int cmd_weight_server(const ServerConfig& config, std::istream& in, std::ostream& out,
                      std::ostream& err) {
  if (config.k < 2) {
    fmt::print(err, "error: --k must be >= 2\n");
    return kExitUsage;
  }
  if (config.cadence < 1) {
    fmt::print(err, "error: --cadence must be >= 1\n");
    return kExitUsage;
  }
  if (!(config.beta >= 0.0)) {
    fmt::print(err, "error: --beta must be >= 0\n");
    return kExitUsage;
  }
  WeightServer server(config);
  server.serve(in, out);
  return kExitOk;
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.epoch_length < 1) {
      throw Error(ErrorCode::kConfig, "--epoch-length must be >= 1");
    }
    std::ifstream in(options.trajectory);
    if (!in) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("cannot read trajectory {}", options.trajectory.string()));
    }
    const Trajectory traj = read_trajectory_csv(in, options.epoch_length);
    const RiskRatios ratios = risk_ratios(traj);
    const Vector thresholds = plateau_thresholds(traj, options.convergence_fraction);
    const auto epochs = epochs_to_converge(traj, thresholds);

    fs::create_directories(options.out_dir);
    {
      auto f = open_output(options.out_dir / "risk_ratios.csv");
      f << "epoch";
      for (std::size_t m = 0; m < traj.task_count; ++m) f << ",unscaled_" << m;
      for (std::size_t m = 0; m < traj.task_count; ++m) f << ",scaled_" << m;
      f << '\n';
      for (std::size_t e = 0; e < ratios.unscaled.size(); ++e) {
        f << e;
        for (double v : ratios.unscaled[e]) f << ',' << fmt::format("{:.17g}", v);
        for (double v : ratios.scaled[e]) f << ',' << fmt::format("{:.17g}", v);
        f << '\n';
      }
    }
    {
      auto f = open_output(options.out_dir / "convergence.csv");
      f << "task,threshold,epochs_to_converge\n";
      for (std::size_t m = 0; m < epochs.size(); ++m) {
        f << m << ',' << fmt::format("{:.17g}", thresholds[m]) << ',' << epochs[m] << '\n';
      }
    }
    const double spread = convergence_difference(std::span<const std::size_t>(epochs));
    fmt::print(out, "epochs {}  tasks {}\n", traj.epoch_count(), traj.task_count);
    for (std::size_t m = 0; m < epochs.size(); ++m) {
      fmt::print(out, "task {}  converged at epoch {}\n", m, epochs[m]);
    }
    fmt::print(out, "convergence difference {:.4f}\n", spread);
    fmt::print(out, "wrote {}\n", options.out_dir.string());
    return kExitOk;
  });
}

}  // namespace go4align
