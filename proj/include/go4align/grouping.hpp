#pragma once

// Lower-level step of adaptive group risk minimization: cluster scalar group
// indicators into K groups and derive one shared weight per group.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "go4align/indicators.hpp"

namespace go4align {

using Labels = std::vector<std::size_t>;

// Binary K x M matrix; G(k, m) = 1 iff task m belongs to group k.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t groups, std::size_t tasks)
      : groups_(groups), tasks_(tasks), cells_(groups * tasks, 0) {}

  static AssignmentMatrix from_labels(std::span<const std::size_t> labels,
                                      std::size_t groups);

  std::size_t groups() const { return groups_; }
  std::size_t tasks() const { return tasks_; }

  std::uint8_t operator()(std::size_t k, std::size_t m) const {
    return cells_[k * tasks_ + m];
  }
  void set(std::size_t k, std::size_t m, bool on) {
    cells_[k * tasks_ + m] = on ? 1 : 0;
  }

  std::size_t group_size(std::size_t k) const;

  // Throws kDimension unless every column is one-hot.
  Labels labels() const;

  bool operator==(const AssignmentMatrix&) const = default;

 private:
  std::size_t groups_ = 0;
  std::size_t tasks_ = 0;
  std::vector<std::uint8_t> cells_;
};

struct Grouping {
  Labels labels;
  AssignmentMatrix assignment;
  Vector omega;
  double objective = 0.0;
  // Effective group count; below the requested k when there are fewer
  // distinct values than groups.
  std::size_t k = 0;

  bool operator==(const Grouping&) const = default;
};

enum class ClusterEngine { kExact, kLloyd };

// Globally optimal K-means for scalars via dynamic programming over the
// sorted distinct values. Ties between equal-cost splits put the boundary
// value in the left (lower) cluster. Groups are numbered by ascending
// centroid.
Grouping kmeans_1d_exact(std::span<const double> values, std::size_t k);

// Lloyd iterations with k-means++ seeding, best of `restarts` runs.
Grouping kmeans_lloyd(std::span<const double> values, std::size_t k,
                      std::size_t restarts, std::uint64_t seed);

// omega^T = gamma^T G^T (G G^T)^{-1}.
Vector group_weights(std::span<const double> indicators,
                     const AssignmentMatrix& assignment);

// lambda^T = omega^T G.
Vector task_weights(std::span<const double> omega,
                    const AssignmentMatrix& assignment);

// ||gamma^T - omega^T G||^2.
double clustering_objective(std::span<const double> indicators,
                            std::span<const double> omega,
                            const AssignmentMatrix& assignment);

// Relabels an arbitrary partition by ascending centroid, drops empty ids and
// fills G, omega and J.
Grouping canonical_grouping(std::span<const double> values,
                            std::span<const std::size_t> raw_labels);

}  // namespace go4align
