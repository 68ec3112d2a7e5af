#pragma once

// Risk-guided group indicators: scale balance, smoothed EMA over risks and
// their elementwise product. Everything here is computed from risk values
// only, so the results are constants for the parameter update.

#include <cstddef>
#include <span>
#include <vector>

namespace go4align {

using Vector = std::vector<double>;

// Risks below this are clamped up to it; negative risks are rejected.
inline constexpr double kRiskFloor = 1e-12;
inline constexpr double kDefaultBeta = 0.01;

// Per-task empirical risks at one iteration.
struct TaskRiskVector {
  Vector risks;
  std::size_t iteration = 0;

  std::size_t size() const { return risks.size(); }
};

// Validates and clamps raw risks. Throws kInvalidTaskCount for M < 2 and
// kNonpositiveRisk for negative or non-finite entries. Entries in
// [0, kRiskFloor) are raised to kRiskFloor with a logged warning.
Vector sanitize_risks(std::span<const double> risks);

Vector init_smoothness(std::size_t task_count);

// P_m = mean(L) / L_m.
Vector scale_vector(std::span<const double> risks);

// sigma[prev ⊙ exp(-beta * L)], evaluated with the exponent shifted by
// min(L) so the product never underflows to all zeros.
Vector smoothness_update(std::span<const double> prev_smoothness,
                         std::span<const double> risks, double beta);

Vector group_indicator(std::span<const double> scale,
                       std::span<const double> smoothness);

bool on_simplex(std::span<const double> q, double tol = 1e-9);

// Caller-owned state carried across iterations for one run.
struct IndicatorState {
  Vector smoothness;
  Vector scale;
  Vector indicators;
  double beta = kDefaultBeta;

  static IndicatorState make(std::size_t task_count, double beta);

  std::size_t size() const { return smoothness.size(); }

  // Runs P, Q and gamma for one risk vector and returns the new state;
  // *this is left untouched.
  IndicatorState advanced(std::span<const double> risks) const;
};

}  // namespace go4align
