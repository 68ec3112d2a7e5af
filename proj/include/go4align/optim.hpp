#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace go4align {

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer(std::string_view name);
const char* to_string(OptimizerKind kind);

// First-order optimizer over a flat parameter vector. Adam uses the standard
// bias-corrected moments.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, std::size_t size);

  void step(std::span<double> params, std::span<const double> grad);

  OptimizerKind kind() const { return kind_; }
  double lr() const { return lr_; }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

 private:
  OptimizerKind kind_;
  double lr_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

}  // namespace go4align
