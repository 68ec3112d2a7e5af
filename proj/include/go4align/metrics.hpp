#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "go4align/indicators.hpp"
#include "go4align/testbed.hpp"

namespace go4align {

// Direction flag per metric: true when higher values are better.
using Directions = std::vector<bool>;

struct MetricTable {
  std::vector<std::string> methods;  // excludes the baseline
  std::vector<std::string> metrics;
  Directions higher_better;
  std::vector<Vector> values;  // methods x metrics
  std::string baseline_name;
  Vector baseline;
  // Reported overall scores, when the fixture carries them.
  std::vector<std::optional<double>> published_mr;
  std::vector<std::optional<double>> published_delta_m;

  std::size_t index_of(const std::string& method) const;
  void validate() const;
};

// Fixture layout:
//   method,<metric...>[,MR,delta_m]
//   direction,<1|0 per metric>[,,]
//   <baseline row>
//   <method rows>
// The first data row is the single-task baseline.
MetricTable load_metric_table(const std::filesystem::path& path);
MetricTable parse_metric_table(const std::string& csv);

// Average per-metric relative drop versus the baseline, in percent:
// 100/S * sum_s (-1)^{higher_better_s} (M_s - B_s) / B_s.
double delta_m(std::span<const double> method, std::span<const double> baseline,
               const Directions& higher_better);

// Rank of `method` per metric among the table's methods (1 = best, ties get
// the mean of the tied positions), averaged over metrics.
double mean_rank(const MetricTable& table, const std::string& method);
Vector mean_ranks(const MetricTable& table);

// Population standard deviation of per-task epochs to convergence.
double convergence_difference(std::span<const double> epochs);
double convergence_difference(std::span<const std::size_t> epochs);

struct RiskRatios {
  std::vector<Vector> unscaled;  // epochs x M, rows sum to 1
  std::vector<Vector> scaled;    // same, on weights ⊙ risks
};

RiskRatios risk_ratios(const Trajectory& trajectory);

inline constexpr double kElbowTolerance = 0.02;

// Picks K at the largest positive discrete curvature
// s(k-1) - 2 s(k) + s(k+1) of a lower-is-better score curve. With no
// positive curvature, returns the smallest k within kElbowTolerance of the
// score range above the minimum. Fewer than three points: argmin.
std::size_t elbow_select(const std::map<std::size_t, double>& scores);

}  // namespace go4align
