#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "go4align/error.hpp"
#include "go4align/grouping.hpp"
#include "oracles.hpp"

using namespace go4align;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

void check_invariants(const Vector& values, const Grouping& g) {
  REQUIRE(g.labels.size() == values.size());
  REQUIRE(g.omega.size() == g.k);
  CHECK(g.assignment.labels() == g.labels);
  for (std::size_t k = 0; k < g.k; ++k) CHECK(g.assignment.group_size(k) > 0);
  const Vector mu = oracle::group_means(values, g.labels, g.k);
  for (std::size_t k = 0; k < g.k; ++k) CHECK(g.omega[k] == Approx(mu[k]).epsilon(1e-12));
  for (std::size_t k = 1; k < g.k; ++k) CHECK(g.omega[k - 1] < g.omega[k]);
  CHECK(g.objective ==
        Approx(oracle::partition_cost(values, g.labels, g.k)).epsilon(1e-10).scale(1e-15));
}

}  // namespace

TEST_CASE("kmeans_1d_exact examples") {
  const Vector v{0.1, 0.12, 0.9};
  const Grouping g = kmeans_1d_exact(v, 2);
  CHECK(g.labels == Labels{0, 0, 1});
  CHECK(g.omega[0] == Approx(0.11));
  CHECK(g.omega[1] == Approx(0.9));
  CHECK(g.objective == Approx(0.0002));
  check_invariants(v, g);

  const Grouping all = kmeans_1d_exact(v, 3);
  CHECK(all.objective == 0.0);
  CHECK(all.omega == Vector{0.1, 0.12, 0.9});

  const Vector dup{0.2, 0.2, 0.2, 0.9};
  const Grouping d = kmeans_1d_exact(dup, 2);
  CHECK(d.labels == Labels{0, 0, 0, 1});
  CHECK(d.omega == Vector{0.2, 0.9});
  CHECK(d.objective == 0.0);
}

TEST_CASE("fewer distinct values than k reduces the effective k") {
  const Grouping g = kmeans_1d_exact(Vector{0.5, 0.5, 0.7, 0.7}, 3);
  CHECK(g.k == 2);
  CHECK(g.labels == Labels{0, 0, 1, 1});
  const Grouping flat = kmeans_1d_exact(Vector{0.3, 0.3, 0.3}, 2);
  CHECK(flat.k == 1);
  CHECK(flat.labels == Labels{0, 0, 0});
}

TEST_CASE("equidistant ties go to the left cluster") {
  // {0},{1,2} and {0,1},{2} cost the same; the boundary value joins the left.
  const Grouping g = kmeans_1d_exact(Vector{2.0, 0.0, 1.0}, 2);
  CHECK(g.labels == Labels{1, 0, 0});
}

TEST_CASE("k out of range") {
  CHECK(code_of([] { kmeans_1d_exact(Vector{1, 2, 3}, 1); }) == ErrorCode::kInvalidK);
  CHECK(code_of([] { kmeans_1d_exact(Vector{1, 2, 3}, 4); }) == ErrorCode::kInvalidK);
  CHECK(code_of([] { kmeans_lloyd(Vector{1, 2, 3}, 4, 2, 0); }) == ErrorCode::kInvalidK);
}

TEST_CASE("exact clustering matches exhaustive partitions") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> msize(2, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = msize(rng);
    Vector v(m);
    // Every third instance draws from a coarse grid to force duplicates.
    for (double& x : v) x = trial % 3 == 0 ? std::round(u(rng) * 4) / 4 : u(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, m)(rng);
    const Grouping g = kmeans_1d_exact(v, k);
    const auto best = oracle::best_partition(v, k);
    CHECK(g.objective == Approx(best.cost).epsilon(1e-9).scale(1e-14));
    CHECK(g.k == std::min(k, oracle::distinct_count(v)));
    check_invariants(v, g);

    // Clusters are contiguous in sorted order.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    for (std::size_t i = 1; i < m; ++i) CHECK(g.labels[order[i - 1]] <= g.labels[order[i]]);

    const Grouping l = kmeans_lloyd(v, k, 4, trial);
    CHECK(l.objective >= g.objective - 1e-12);
    check_invariants(v, l);
  }
}

TEST_CASE("lloyd agrees with exact on the worked example and is deterministic") {
  const Vector v{0.1, 0.12, 0.9};
  const Grouping l = kmeans_lloyd(v, 2, 8, 3);
  const Grouping e = kmeans_1d_exact(v, 2);
  CHECK(l.labels == e.labels);
  CHECK(l.omega[0] == Approx(e.omega[0]));
  CHECK(kmeans_lloyd(v, 3, 8, 3).objective == 0.0);
  std::mt19937_64 rng(5);
  const Vector r = oracle::random_risks(rng, 9);
  CHECK(kmeans_lloyd(r, 4, 5, 99) == kmeans_lloyd(r, 4, 5, 99));
}

TEST_CASE("group_weights and task_weights") {
  const Vector gamma{0.1, 0.12, 0.9};
  AssignmentMatrix g(2, 3);
  g.set(0, 0, true);
  g.set(0, 1, true);
  g.set(1, 2, true);
  const Vector omega = group_weights(gamma, g);
  CHECK(omega[0] == Approx(0.11));
  CHECK(omega[1] == 0.9);
  const Vector lambda = task_weights(omega, g);
  CHECK(lambda[0] == omega[0]);
  CHECK(lambda[1] == omega[0]);
  CHECK(lambda[2] == omega[1]);
  CHECK(clustering_objective(gamma, omega, g) == Approx(0.0002));

  AssignmentMatrix empty_row(2, 3);
  for (std::size_t m = 0; m < 3; ++m) empty_row.set(0, m, true);
  CHECK(code_of([&] { group_weights(gamma, empty_row); }) ==
        ErrorCode::kSingularAssignment);
  CHECK(code_of([&] { task_weights(Vector{1.0}, g); }) == ErrorCode::kDimension);
  CHECK(code_of([&] { group_weights(Vector{1.0, 2.0}, g); }) == ErrorCode::kDimension);

  AssignmentMatrix one(1, 2);
  one.set(0, 0, true);
  one.set(0, 1, true);
  CHECK(group_weights(Vector{1, 1}, one) == Vector{1.0});
  CHECK(clustering_objective(Vector{1, 1}, Vector{1.0}, one) == 0.0);
  CHECK(task_weights(Vector{0.4}, one) == Vector{0.4, 0.4});
}

TEST_CASE("canonical_grouping orders by centroid and drops empty ids") {
  const Grouping g = canonical_grouping(Vector{5.0, 1.0, 5.0, 9.0}, Labels{7, 2, 7, 0});
  CHECK(g.k == 3);
  CHECK(g.labels == Labels{1, 0, 1, 2});
  CHECK(g.omega == Vector{1.0, 5.0, 9.0});
}
