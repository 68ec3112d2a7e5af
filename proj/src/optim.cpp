#include "go4align/optim.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "go4align/error.hpp"

namespace go4align {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw Error(ErrorCode::kConfig,
              fmt::format("unknown optimizer '{}' (expected sgd or adam)", name));
}

const char* to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

Optimizer::Optimizer(OptimizerKind kind, double lr, std::size_t size)
    : kind_(kind), lr_(lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorCode::kConfig, fmt::format("learning rate must be > 0, got {}", lr));
  }
  if (kind_ == OptimizerKind::kAdam) {
    m_.assign(size, 0.0);
    v_.assign(size, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) {
    throw Error(ErrorCode::kDimension, "optimizer: parameter/gradient size mismatch");
  }
  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
    return;
  }
  if (m_.size() != params.size()) {
    throw Error(ErrorCode::kDimension, "optimizer: state size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEps);
  }
}

}  // namespace go4align
