#include "go4align/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "go4align/error.hpp"

namespace go4align {

namespace {

void validate_values(std::span<const double> values, std::size_t k) {
  if (k < 2 || k > values.size()) {
    throw Error(ErrorCode::kInvalidK,
                fmt::format("k must satisfy 2 <= k <= {}, got {}",
                            values.size(), k));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidInput, "values must be finite");
    }
  }
}

void require_tasks(const AssignmentMatrix& g, std::size_t m, const char* what) {
  if (g.tasks() != m) {
    throw Error(ErrorCode::kDimension,
                fmt::format("{}: assignment has {} tasks, vector has {}", what,
                            g.tasks(), m));
  }
}

Eigen::MatrixXd to_eigen(const AssignmentMatrix& g) {
  Eigen::MatrixXd out(g.groups(), g.tasks());
  for (std::size_t k = 0; k < g.groups(); ++k) {
    for (std::size_t m = 0; m < g.tasks(); ++m) out(k, m) = g(k, m);
  }
  return out;
}

// Weighted SSE of every contiguous run [a, b) of sorted distinct values.
std::vector<std::vector<double>> segment_costs(const Vector& v,
                                               const std::vector<double>& w) {
  const std::size_t n = v.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    double weight = 0.0, mu = 0.0, sse = 0.0;
    for (std::size_t b = a; b < n; ++b) {
      const double nw = weight + w[b];
      const double delta = v[b] - mu;
      mu += delta * w[b] / nw;
      sse += w[b] * delta * (v[b] - mu);
      weight = nw;
      cost[a][b + 1] = std::max(sse, 0.0);
    }
  }
  return cost;
}

}  // namespace

AssignmentMatrix AssignmentMatrix::from_labels(
    std::span<const std::size_t> labels, std::size_t groups) {
  AssignmentMatrix g(groups, labels.size());
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (labels[m] >= groups) {
      throw Error(ErrorCode::kDimension,
                  fmt::format("label {} out of range for {} groups", labels[m],
                              groups));
    }
    g.set(labels[m], m, true);
  }
  return g;
}

std::size_t AssignmentMatrix::group_size(std::size_t k) const {
  std::size_t n = 0;
  for (std::size_t m = 0; m < tasks_; ++m) n += (*this)(k, m);
  return n;
}

Labels AssignmentMatrix::labels() const {
  Labels out(tasks_);
  for (std::size_t m = 0; m < tasks_; ++m) {
    std::size_t ones = 0;
    for (std::size_t k = 0; k < groups_; ++k) {
      if ((*this)(k, m)) {
        out[m] = k;
        ++ones;
      }
    }
    if (ones != 1) {
      throw Error(ErrorCode::kDimension,
                  fmt::format("column {} of the assignment is not one-hot", m));
    }
  }
  return out;
}

Vector group_weights(std::span<const double> indicators,
                     const AssignmentMatrix& assignment) {
  require_tasks(assignment, indicators.size(), "group_weights");
  for (std::size_t k = 0; k < assignment.groups(); ++k) {
    if (assignment.group_size(k) == 0) {
      throw Error(ErrorCode::kSingularAssignment,
                  fmt::format("group {} is empty; G G^T is singular", k));
    }
  }
  const Eigen::MatrixXd g = to_eigen(assignment);
  const Eigen::MatrixXd ggt = g * g.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ggt);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingularAssignment, "G G^T is singular");
  }
  const Eigen::MatrixXd right_inverse = g.transpose() * lu.inverse();
  const Eigen::Map<const Eigen::RowVectorXd> gamma(
      indicators.data(), static_cast<Eigen::Index>(indicators.size()));
  const Eigen::RowVectorXd omega = gamma * right_inverse;
  return Vector(omega.data(), omega.data() + omega.size());
}

Vector task_weights(std::span<const double> omega,
                    const AssignmentMatrix& assignment) {
  if (omega.size() != assignment.groups()) {
    throw Error(ErrorCode::kDimension,
                fmt::format("task_weights: {} group weights for {} groups",
                            omega.size(), assignment.groups()));
  }
  const Labels labels = assignment.labels();
  Vector lambda(labels.size());
  for (std::size_t m = 0; m < labels.size(); ++m) lambda[m] = omega[labels[m]];
  return lambda;
}

double clustering_objective(std::span<const double> indicators,
                            std::span<const double> omega,
                            const AssignmentMatrix& assignment) {
  require_tasks(assignment, indicators.size(), "clustering_objective");
  const Vector fitted = task_weights(omega, assignment);
  double j = 0.0;
  for (std::size_t m = 0; m < fitted.size(); ++m) {
    const double r = indicators[m] - fitted[m];
    j += r * r;
  }
  return j;
}

Grouping canonical_grouping(std::span<const double> values,
                            std::span<const std::size_t> raw_labels) {
  if (values.size() != raw_labels.size()) {
    throw Error(ErrorCode::kDimension, "canonical_grouping: length mismatch");
  }
  // raw id -> (sum, count, first task)
  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::map<std::size_t, Acc> acc;
  for (std::size_t m = 0; m < values.size(); ++m) {
    auto [it, inserted] = acc.try_emplace(raw_labels[m]);
    if (inserted) it->second.first = m;
    it->second.sum += values[m];
    ++it->second.count;
  }
  std::vector<std::pair<double, std::size_t>> order;  // (centroid, first task)
  std::map<std::size_t, std::size_t> first_to_raw;
  for (const auto& [raw, a] : acc) {
    order.emplace_back(a.sum / static_cast<double>(a.count), a.first);
    first_to_raw[a.first] = raw;
  }
  std::sort(order.begin(), order.end());
  std::map<std::size_t, std::size_t> relabel;
  for (std::size_t k = 0; k < order.size(); ++k) {
    relabel[first_to_raw[order[k].second]] = k;
  }

  Grouping out;
  out.k = order.size();
  out.labels.resize(values.size());
  for (std::size_t m = 0; m < values.size(); ++m) {
    out.labels[m] = relabel[raw_labels[m]];
  }
  out.assignment = AssignmentMatrix::from_labels(out.labels, out.k);
  out.omega = group_weights(values, out.assignment);
  out.objective = clustering_objective(values, out.omega, out.assignment);
  return out;
}

Grouping kmeans_1d_exact(std::span<const double> values, std::size_t k) {
  validate_values(values, k);

  // Distinct sorted values with multiplicities; equal values always share
  // a cluster.
  Vector distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> counts(distinct.size(), 0.0);
  for (double v : values) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), v);
    counts[static_cast<std::size_t>(it - distinct.begin())] += 1.0;
  }

  const std::size_t n = distinct.size();
  const std::size_t groups = std::min(k, n);
  const auto cost = segment_costs(distinct, counts);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[j][i]: first i distinct values in j + 1 clusters.
  std::vector<std::vector<double>> best(groups, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> split(
      groups, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) best[0][i] = cost[0][i];
  for (std::size_t j = 1; j < groups; ++j) {
    for (std::size_t i = j + 1; i <= n; ++i) {
      // Ascending s with <= keeps the latest split among ties, so a tied
      // boundary value stays with the left cluster.
      for (std::size_t s = j; s < i; ++s) {
        const double c = best[j - 1][s] + cost[s][i];
        if (c <= best[j][i]) {
          best[j][i] = c;
          split[j][i] = s;
        }
      }
    }
  }

  std::vector<std::size_t> cluster_of(n);
  std::size_t end = n;
  for (std::size_t j = groups; j-- > 0;) {
    const std::size_t start = j == 0 ? 0 : split[j][end];
    for (std::size_t i = start; i < end; ++i) cluster_of[i] = j;
    end = start;
  }

  Labels raw(values.size());
  for (std::size_t m = 0; m < values.size(); ++m) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), values[m]);
    raw[m] = cluster_of[static_cast<std::size_t>(it - distinct.begin())];
  }
  return canonical_grouping(values, raw);
}

Grouping kmeans_lloyd(std::span<const double> values, std::size_t k,
                      std::size_t restarts, std::uint64_t seed) {
  validate_values(values, k);
  if (restarts < 1) {
    throw Error(ErrorCode::kInvalidInput, "restarts must be >= 1");
  }
  Vector sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n_distinct = static_cast<std::size_t>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  const std::size_t groups = std::min(k, n_distinct);
  const std::size_t m_count = values.size();

  std::mt19937_64 rng(seed);
  Grouping best;
  bool have_best = false;

  for (std::size_t r = 0; r < restarts; ++r) {
    // k-means++ seeding.
    Vector centers;
    centers.reserve(groups);
    std::uniform_int_distribution<std::size_t> pick(0, m_count - 1);
    centers.push_back(values[pick(rng)]);
    std::vector<double> d2(m_count);
    while (centers.size() < groups) {
      for (std::size_t m = 0; m < m_count; ++m) {
        double best_d = std::numeric_limits<double>::infinity();
        for (double c : centers) best_d = std::min(best_d, (values[m] - c) * (values[m] - c));
        d2[m] = best_d;
      }
      std::discrete_distribution<std::size_t> weighted(d2.begin(), d2.end());
      centers.push_back(values[weighted(rng)]);
    }

    Labels labels(m_count, 0);
    for (int iter = 0; iter < 300; ++iter) {
      bool changed = iter == 0;
      for (std::size_t m = 0; m < m_count; ++m) {
        std::size_t arg = 0;
        double arg_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centers.size(); ++c) {
          const double d = std::abs(values[m] - centers[c]);
          // Equidistant: prefer the lower-valued center.
          if (d < arg_d || (d == arg_d && centers[c] < centers[arg])) {
            arg = c;
            arg_d = d;
          }
        }
        if (labels[m] != arg) changed = true;
        labels[m] = arg;
      }
      if (!changed) break;

      std::vector<double> sum(centers.size(), 0.0);
      std::vector<std::size_t> count(centers.size(), 0);
      for (std::size_t m = 0; m < m_count; ++m) {
        sum[labels[m]] += values[m];
        ++count[labels[m]];
      }
      for (std::size_t c = 0; c < centers.size(); ++c) {
        if (count[c] > 0) {
          centers[c] = sum[c] / static_cast<double>(count[c]);
          continue;
        }
        // Empty cluster: reseed at the worst-fitted point.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t m = 0; m < m_count; ++m) {
          const double d = std::abs(values[m] - centers[labels[m]]);
          if (d > far_d) {
            far = m;
            far_d = d;
          }
        }
        centers[c] = values[far];
      }
    }

    Grouping candidate = canonical_grouping(values, labels);
    if (!have_best || candidate.objective < best.objective) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

}  // namespace go4align
