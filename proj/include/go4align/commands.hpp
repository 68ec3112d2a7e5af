#pragma once

// Command implementations behind the go4align executable. Each returns the
// process exit code: 0 success, 1 verification or divergence failure,
// 2 usage or configuration error.

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "go4align/server.hpp"

namespace go4align {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int cmd_run(const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& out_dir,
            std::ostream& out, std::ostream& err);

int cmd_sweep_k(const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& out_dir,
                std::ostream& out, std::ostream& err);

int cmd_verify_tables(const std::filesystem::path& fixture_dir,
                      std::ostream& out, std::ostream& err);

int cmd_weight_server(const ServerConfig& config, std::istream& in,
                      std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::filesystem::path trajectory;
  std::size_t epoch_length = 50;
  double convergence_fraction = 0.05;
  std::filesystem::path out_dir = "report";
};

// Risk-ratio tables (before and after weighting) and convergence spread
// for a trajectory CSV written by `run`.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

}  // namespace go4align
