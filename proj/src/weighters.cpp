#include "go4align/weighters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "go4align/error.hpp"

namespace go4align {

namespace {

Grouping cluster(std::span<const double> values, std::size_t k,
                 ClusterEngine engine, std::size_t restarts,
                 std::uint64_t seed) {
  return engine == ClusterEngine::kExact
             ? kmeans_1d_exact(values, k)
             : kmeans_lloyd(values, k, restarts, seed);
}

// M * softmax(x).
Vector scaled_softmax(const Vector& x) {
  const double hi = *std::max_element(x.begin(), x.end());
  Vector out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - hi);
    total += out[i];
  }
  const double m = static_cast<double>(x.size());
  for (double& v : out) v = m * v / total;
  return out;
}

void check_risks(std::span<const double> risks, std::size_t m) {
  if (risks.size() != m) {
    throw Error(ErrorCode::kDimension,
                fmt::format("expected {} risks, got {}", m, risks.size()));
  }
}

}  // namespace

Strategy parse_strategy(std::string_view name) {
  if (name == "ls") return Strategy::kLS;
  if (name == "si") return Strategy::kSI;
  if (name == "rlw") return Strategy::kRLW;
  if (name == "dwa") return Strategy::kDWA;
  if (name == "uw") return Strategy::kUW;
  if (name == "go4align") return Strategy::kGO4Align;
  throw Error(ErrorCode::kConfig,
              fmt::format("unknown strategy '{}' (expected ls, si, rlw, dwa, uw "
                          "or go4align)",
                          name));
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kLS: return "ls";
    case Strategy::kSI: return "si";
    case Strategy::kRLW: return "rlw";
    case Strategy::kDWA: return "dwa";
    case Strategy::kUW: return "uw";
    case Strategy::kGO4Align: return "go4align";
  }
  return "unknown";
}

Weighter::Weighter(WeighterConfig config, std::size_t task_count)
    : config_(config), task_count_(task_count), rng_(config.seed) {
  if (task_count_ < 2) {
    throw Error(ErrorCode::kInvalidTaskCount,
                fmt::format("need at least 2 tasks, got {}", task_count_));
  }
  if (groups() && (config_.k < 2 || config_.k > task_count_)) {
    throw Error(ErrorCode::kInvalidK,
                fmt::format("k must satisfy 2 <= k <= {}, got {}", task_count_,
                            config_.k));
  }
  if (config_.cadence < 1) {
    throw Error(ErrorCode::kConfig, "cadence must be >= 1");
  }
  if (config_.strategy == Strategy::kDWA) {
    if (config_.epoch_length < 1) {
      throw Error(ErrorCode::kConfig, "epoch_length must be >= 1");
    }
    if (!(config_.temperature > 0.0)) {
      throw Error(ErrorCode::kConfig, "temperature must be > 0");
    }
  }
  if (!(config_.beta >= 0.0) || !std::isfinite(config_.beta)) {
    throw Error(ErrorCode::kConfig, "beta must be finite and >= 0");
  }
  indicators_ = IndicatorState::make(task_count_, config_.beta);
  epoch_sum_.assign(task_count_, 0.0);
  log_variance_.assign(task_count_, 0.0);
  if (config_.strategy == Strategy::kUW) {
    uw_optimizer_.emplace(OptimizerKind::kAdam, config_.uw_lr, task_count_);
  }
}

bool Weighter::groups() const {
  return config_.strategy == Strategy::kGO4Align || config_.agrm_wrap;
}

void Weighter::set_log_variance(Vector s) {
  check_risks(s, task_count_);
  log_variance_ = std::move(s);
}

Vector Weighter::base_weights(std::span<const double> risks,
                              const Vector& clean) {
  const std::size_t m = task_count_;
  switch (config_.strategy) {
    case Strategy::kLS:
      return Vector(m, 1.0);
    case Strategy::kSI: {
      Vector w(m);
      for (std::size_t i = 0; i < m; ++i) w[i] = 1.0 / clean[i];
      return w;
    }
    case Strategy::kRLW: {
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector z(m);
      for (double& v : z) v = normal(rng_);
      return scaled_softmax(z);
    }
    case Strategy::kDWA: {
      if (iteration_ > 0 && iteration_ % config_.epoch_length == 0) {
        prev_epoch_ = std::move(last_epoch_);
        last_epoch_ = epoch_sum_;
        for (double& v : last_epoch_) v /= static_cast<double>(config_.epoch_length);
        std::fill(epoch_sum_.begin(), epoch_sum_.end(), 0.0);
        ++epochs_done_;
      }
      for (std::size_t i = 0; i < m; ++i) epoch_sum_[i] += risks[i];
      if (epochs_done_ < 2) return Vector(m, 1.0);
      Vector ratio(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double denom = std::max(prev_epoch_[i], kRiskFloor);
        ratio[i] = last_epoch_[i] / denom / config_.temperature;
      }
      return scaled_softmax(ratio);
    }
    case Strategy::kUW: {
      UncertaintyTerms terms = uw_aux(*this, risks);
      uw_optimizer_->step(log_variance_, terms.gradient);
      return terms.weights;
    }
    case Strategy::kGO4Align:
      indicators_ = indicators_.advanced(clean);
      return indicators_.indicators;
  }
  return Vector(m, 1.0);
}

WeighterOutput Weighter::weigh(std::span<const double> risks) {
  check_risks(risks, task_count_);
  for (double r : risks) {
    if (!std::isfinite(r) || r < 0.0) {
      throw Error(ErrorCode::kNonpositiveRisk,
                  "risks must be finite and nonnegative");
    }
  }

  Weighter next = *this;
  const Vector clean = sanitize_risks(risks);
  WeighterOutput out;
  if (config_.strategy == Strategy::kUW) {
    out.aux_loss = std::accumulate(log_variance_.begin(), log_variance_.end(), 0.0) / 2.0;
  }
  const bool regroup = !held_ || iteration_ % config_.cadence == 0;
  const bool hold = groups() && !regroup;
  // Indicators only advance on regroup steps; base strategies always step.
  Vector base = (hold && config_.strategy == Strategy::kGO4Align)
                    ? Vector{}
                    : next.base_weights(risks, clean);

  if (!groups()) {
    out.weights = std::move(base);
  } else if (hold) {
    out.weights = held_->weights;
    out.grouping = held_->grouping;
  } else {
    Grouping g = cluster(base, config_.k, config_.engine, config_.restarts,
                         config_.seed + iteration_);
    out.weights = task_weights(g.omega, g.assignment);
    out.grouping = std::move(g);
    next.held_ = out;
  }

  ++next.iteration_;
  *this = std::move(next);
  return out;
}

UncertaintyTerms uw_aux(const Weighter& weighter, std::span<const double> risks) {
  if (weighter.config().strategy != Strategy::kUW) {
    throw Error(ErrorCode::kWrongStrategy,
                fmt::format("uw_aux requires the uw strategy, got {}",
                            to_string(weighter.config().strategy)));
  }
  check_risks(risks, weighter.task_count());
  const Vector& s = weighter.log_variance();
  UncertaintyTerms terms;
  terms.weights.resize(s.size());
  terms.gradient.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    terms.weights[i] = std::exp(-s[i]);
    terms.aux_loss += s[i] / 2.0;
    terms.gradient[i] = -terms.weights[i] * risks[i] + 0.5;
  }
  return terms;
}

WeighterOutput agrm_wrap(std::span<const double> base_weights, std::size_t k,
                         ClusterEngine engine, std::size_t restarts,
                         std::uint64_t seed) {
  for (double w : base_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidInput, "base weights must be positive");
    }
  }
  Grouping g = cluster(base_weights, k, engine, restarts, seed);
  WeighterOutput out;
  out.weights = task_weights(g.omega, g.assignment);
  out.grouping = std::move(g);
  return out;
}

}  // namespace go4align
