#include "go4align/indicators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "go4align/error.hpp"
#include "go4align/log.hpp"

namespace go4align {

namespace {

void require_task_count(std::size_t m) {
  if (m < 2) {
    throw Error(ErrorCode::kInvalidTaskCount,
                fmt::format("need at least 2 tasks, got {}", m));
  }
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kDimension,
                fmt::format("{}: length mismatch ({} vs {})", what, a, b));
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

Vector sanitize_risks(std::span<const double> risks) {
  require_task_count(risks.size());
  Vector out(risks.begin(), risks.end());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double r = out[m];
    if (!std::isfinite(r) || r < 0.0) {
      throw Error(ErrorCode::kNonpositiveRisk,
                  fmt::format("risk[{}] = {} is negative or not finite", m, r));
    }
    if (r < kRiskFloor) {
      static std::atomic<bool> warned{false};
      if (!warned.exchange(true)) {
        logger()->warn("risk[{}] = {:g} clamped to {:g}", m, r, kRiskFloor);
      } else {
        logger()->debug("risk[{}] = {:g} clamped to {:g}", m, r, kRiskFloor);
      }
      out[m] = kRiskFloor;
    }
  }
  return out;
}

Vector init_smoothness(std::size_t task_count) {
  require_task_count(task_count);
  return Vector(task_count, 1.0 / static_cast<double>(task_count));
}

Vector scale_vector(std::span<const double> risks) {
  require_task_count(risks.size());
  for (std::size_t m = 0; m < risks.size(); ++m) {
    if (!(risks[m] > 0.0) || !std::isfinite(risks[m])) {
      throw Error(ErrorCode::kNonpositiveRisk,
                  fmt::format("risk[{}] = {} is not strictly positive", m,
                              risks[m]));
    }
  }
  const double avg = mean(risks);
  Vector p(risks.size());
  std::transform(risks.begin(), risks.end(), p.begin(),
                 [avg](double r) { return avg / r; });
  return p;
}

bool on_simplex(std::span<const double> q, double tol) {
  double sum = 0.0;
  for (double x : q) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

Vector smoothness_update(std::span<const double> prev_smoothness,
                         std::span<const double> risks, double beta) {
  require_same_length(prev_smoothness.size(), risks.size(),
                      "smoothness_update");
  if (!on_simplex(prev_smoothness)) {
    throw Error(ErrorCode::kInvalidState,
                "previous smoothness vector is not on the simplex");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("beta must be finite and >= 0, got {}", beta));
  }
  for (double r : risks) {
    if (!std::isfinite(r)) {
      throw Error(ErrorCode::kNonpositiveRisk, "risks must be finite");
    }
  }
  const double lowest = *std::min_element(risks.begin(), risks.end());
  Vector q(risks.size());
  double total = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    q[m] = prev_smoothness[m] * std::exp(-beta * (risks[m] - lowest));
    total += q[m];
  }
  if (!(total > 0.0)) {
    // Only reachable when every task with mass had its factor underflow.
    throw Error(ErrorCode::kInvalidState, "smoothness vector collapsed to zero");
  }
  for (double& x : q) x /= total;
  return q;
}

Vector group_indicator(std::span<const double> scale,
                       std::span<const double> smoothness) {
  require_same_length(scale.size(), smoothness.size(), "group_indicator");
  Vector gamma(scale.size());
  for (std::size_t m = 0; m < gamma.size(); ++m) {
    gamma[m] = scale[m] * smoothness[m];
  }
  return gamma;
}

IndicatorState IndicatorState::make(std::size_t task_count, double beta) {
  IndicatorState state;
  state.smoothness = init_smoothness(task_count);
  state.scale.assign(task_count, 1.0);
  state.indicators = state.smoothness;
  state.beta = beta;
  return state;
}

IndicatorState IndicatorState::advanced(std::span<const double> risks) const {
  require_same_length(smoothness.size(), risks.size(), "IndicatorState");
  const Vector clean = sanitize_risks(risks);
  IndicatorState next;
  next.beta = beta;
  next.scale = scale_vector(clean);
  next.smoothness = smoothness_update(smoothness, clean, beta);
  next.indicators = group_indicator(next.scale, next.smoothness);
  return next;
}

}  // namespace go4align
