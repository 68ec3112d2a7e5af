#pragma once

// Per-iteration task weighting strategies. Every strategy maps a stream of
// risk vectors to weights; none of them sees model gradients.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "go4align/grouping.hpp"
#include "go4align/indicators.hpp"
#include "go4align/optim.hpp"

namespace go4align {

enum class Strategy { kLS, kSI, kRLW, kDWA, kUW, kGO4Align };

Strategy parse_strategy(std::string_view name);
const char* to_string(Strategy s);

struct WeighterConfig {
  Strategy strategy = Strategy::kGO4Align;
  double beta = kDefaultBeta;
  std::size_t k = 2;
  ClusterEngine engine = ClusterEngine::kExact;
  std::size_t restarts = 8;
  // Grouping is recomputed every `cadence` calls and held in between.
  std::size_t cadence = 1;
  double temperature = 2.0;       // DWA
  std::size_t epoch_length = 50;  // DWA epoch averaging
  double uw_lr = 1e-2;            // Adam step size for UW log-variances
  // Cluster a base strategy's weights as group indicators.
  bool agrm_wrap = false;
  std::uint64_t seed = 0;
};

struct WeighterOutput {
  Vector weights;
  std::optional<Grouping> grouping;
  double aux_loss = 0.0;
};

// UW weights, the regularizer sum(s)/2 and d(total)/ds.
struct UncertaintyTerms {
  Vector weights;
  double aux_loss = 0.0;
  Vector gradient;
};

class Weighter {
 public:
  Weighter(WeighterConfig config, std::size_t task_count);

  // Advances the state by one iteration. On error the state is unchanged.
  WeighterOutput weigh(std::span<const double> risks);

  const WeighterConfig& config() const { return config_; }
  std::size_t task_count() const { return task_count_; }
  std::size_t iteration() const { return iteration_; }
  bool groups() const;

  const IndicatorState& indicator_state() const { return indicators_; }
  const Vector& log_variance() const { return log_variance_; }
  void set_log_variance(Vector s);

  friend UncertaintyTerms uw_aux(const Weighter& weighter,
                                 std::span<const double> risks);

 private:
  Vector base_weights(std::span<const double> risks, const Vector& clean);

  WeighterConfig config_;
  std::size_t task_count_;
  std::size_t iteration_ = 0;

  IndicatorState indicators_;
  std::optional<WeighterOutput> held_;

  // DWA: running sum of the current epoch and the two last epoch averages.
  Vector epoch_sum_;
  std::size_t epochs_done_ = 0;
  Vector last_epoch_;
  Vector prev_epoch_;

  Vector log_variance_;
  std::optional<Optimizer> uw_optimizer_;

  std::mt19937_64 rng_;
};

UncertaintyTerms uw_aux(const Weighter& weighter, std::span<const double> risks);

// Treats `base_weights` as group indicators and replaces each by its group
// mean.
WeighterOutput agrm_wrap(std::span<const double> base_weights, std::size_t k,
                         ClusterEngine engine = ClusterEngine::kExact,
                         std::size_t restarts = 8, std::uint64_t seed = 0);

}  // namespace go4align
