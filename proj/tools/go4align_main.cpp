#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "go4align/commands.hpp"

#ifndef GO4ALIGN_FIXTURE_DIR
#define GO4ALIGN_FIXTURE_DIR "data/fixtures"
#endif

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive group risk minimization for multi-task weighting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Train one configuration and write CSV artifacts");
  run->add_option("config", config_path, "YAML run configuration")->required();
  run->add_option("--out", out_dir, "Override output.dir");

  auto* sweep = app.add_subcommand("sweep-k", "Run every k in [2, M] and pick one by elbow");
  sweep->add_option("config", config_path, "YAML run configuration")->required();
  sweep->add_option("--out", out_dir, "Override output.dir");

  std::string fixtures = GO4ALIGN_FIXTURE_DIR;
  auto* verify = app.add_subcommand("verify-tables",
                                    "Recompute published delta_m% and MR cells");
  verify->add_option("--fixtures", fixtures, "Directory holding nyuv2.csv and cityscapes.csv");

  go4align::ServerConfig server;
  std::string engine = "exact";
  auto* serve = app.add_subcommand("weight-server",
                                   "Serve task weights over newline-delimited JSON on stdio");
  serve->add_option("--beta", server.beta, "Smoothness temperature")->capture_default_str();
  serve->add_option("--k", server.k, "Group count")->capture_default_str();
  serve->add_option("--cadence", server.cadence, "Regroup every N requests")
      ->capture_default_str();
  serve->add_option("--engine", engine, "Clustering engine")
      ->check(CLI::IsMember({"exact", "lloyd"}))
      ->capture_default_str();
  serve->add_option("--restarts", server.restarts, "Lloyd restarts")->capture_default_str();
  serve->add_option("--seed", server.seed, "Lloyd seed")->capture_default_str();

  go4align::ReportOptions report;
  std::string trajectory;
  std::string report_out = "report";
  auto* rep = app.add_subcommand("report", "Risk ratios and convergence from a trajectory CSV");
  rep->add_option("trajectory", trajectory, "trajectory.csv written by run")->required();
  rep->add_option("--epoch-length", report.epoch_length, "Iterations per epoch")
      ->capture_default_str();
  rep->add_option("--fraction", report.convergence_fraction, "Plateau threshold fraction")
      ->capture_default_str();
  rep->add_option("--out", report_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? go4align::kExitOk : go4align::kExitUsage;
  }

  const auto out_override =
      out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir);
  if (*run) return go4align::cmd_run(config_path, out_override, std::cout, std::cerr);
  if (*sweep) return go4align::cmd_sweep_k(config_path, out_override, std::cout, std::cerr);
  if (*verify) return go4align::cmd_verify_tables(fixtures, std::cout, std::cerr);
  if (*serve) {
    server.engine = engine == "lloyd" ? go4align::ClusterEngine::kLloyd
                                      : go4align::ClusterEngine::kExact;
    std::ios::sync_with_stdio(false);
    return go4align::cmd_weight_server(server, std::cin, std::cout, std::cerr);
  }
  if (*rep) {
    report.trajectory = trajectory;
    report.out_dir = report_out;
    return go4align::cmd_report(report, std::cout, std::cerr);
  }
  return go4align::kExitUsage;
}
