#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "go4align/error.hpp"
#include "go4align/weighters.hpp"
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

WeighterConfig make(Strategy s) {
  WeighterConfig c;
  c.strategy = s;
  return c;
}

double sum(const Vector& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (Strategy s : {Strategy::kLS, Strategy::kSI, Strategy::kRLW, Strategy::kDWA,
                     Strategy::kUW, Strategy::kGO4Align})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK(code_of([] { parse_strategy("famo"); }) == ErrorCode::kConfig);
}

TEST_CASE("LS and SI weights") {
  Weighter ls(make(Strategy::kLS), 3);
  const auto out = ls.weigh(Vector{3, 1, 9});
  CHECK(out.weights == Vector{1, 1, 1});
  CHECK_FALSE(out.grouping.has_value());
  Weighter si(make(Strategy::kSI), 2);
  CHECK(si.weigh(Vector{2, 0.5}).weights == Vector{0.5, 2.0});
}

TEST_CASE("GO4Align first call on the worked example") {
  WeighterConfig c = make(Strategy::kGO4Align);
  c.beta = 0.0;
  c.k = 2;
  Weighter w(c, 3);
  const auto out = w.weigh(Vector{1, 2, 4});
  REQUIRE(out.grouping.has_value());
  CHECK(out.grouping->labels == Labels{1, 0, 0});
  CHECK(out.grouping->omega[0] == Approx(7.0 / 24.0));
  CHECK(out.grouping->omega[1] == Approx(7.0 / 9.0));
  CHECK(out.weights[0] == Approx(7.0 / 9.0));
  CHECK(out.weights[1] == Approx(7.0 / 24.0));
  CHECK(out.weights[2] == Approx(7.0 / 24.0));
  CHECK(w.iteration() == 1);
}

TEST_CASE("GO4Align with k = M returns the indicators bitwise") {
  std::mt19937_64 rng(3);
  for (std::size_t m = 2; m <= 6; ++m) {
    WeighterConfig c = make(Strategy::kGO4Align);
    c.k = m;
    Weighter w(c, m);
    for (int t = 0; t < 10; ++t) {
      const Vector r = oracle::random_risks(rng, m);
      const auto out = w.weigh(r);
      CHECK(out.weights == w.indicator_state().indicators);
    }
  }
}

TEST_CASE("scaled risks equalize under k = M and beta = 0") {
  WeighterConfig c = make(Strategy::kGO4Align);
  c.k = 4;
  c.beta = 0.0;
  Weighter w(c, 4);
  const Vector r{0.3, 7.0, 120.0, 0.01};
  const auto out = w.weigh(r);
  const double target = out.weights[0] * r[0];
  for (std::size_t i = 0; i < 4; ++i) CHECK(out.weights[i] * r[i] == Approx(target).epsilon(1e-10));
}

TEST_CASE("equal indicators collapse to one weight") {
  WeighterConfig c = make(Strategy::kGO4Align);
  Weighter w(c, 3);
  const auto out = w.weigh(Vector{2, 2, 2});
  CHECK(out.weights[0] == out.weights[1]);
  CHECK(out.weights[1] == out.weights[2]);
}

TEST_CASE("GO4Align is permutation equivariant") {
  std::mt19937_64 rng(17);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  WeighterConfig c = make(Strategy::kGO4Align);
  c.k = 2;
  c.beta = 0.3;
  Weighter a(c, 4), b(c, 4);
  for (int t = 0; t < 30; ++t) {
    const Vector r = oracle::random_risks(rng, 4, -1.0, 1.0);
    Vector rp(4);
    for (std::size_t i = 0; i < 4; ++i) rp[i] = r[perm[i]];
    const auto oa = a.weigh(r);
    const auto ob = b.weigh(rp);
    for (std::size_t i = 0; i < 4; ++i) CHECK(ob.weights[i] == Approx(oa.weights[perm[i]]).epsilon(1e-12));
  }
}

TEST_CASE("cadence holds weights between regroups") {
  WeighterConfig c = make(Strategy::kGO4Align);
  c.cadence = 5;
  c.beta = 0.5;
  Weighter w(c, 3);
  std::mt19937_64 rng(2);
  Vector current;
  for (int t = 0; t < 20; ++t) {
    const auto out = w.weigh(oracle::random_risks(rng, 3));
    if (t % 5 == 0) {
      current = out.weights;
    } else {
      CHECK(out.weights == current);
    }
  }
}

TEST_CASE("cadence one regroups every step") {
  WeighterConfig c = make(Strategy::kGO4Align);
  Weighter w(c, 3);
  const auto first = w.weigh(Vector{1, 2, 4});
  const auto second = w.weigh(Vector{4, 2, 1});
  CHECK(first.weights != second.weights);
}

TEST_CASE("DWA is uniform for two epochs and flattens at huge temperature") {
  WeighterConfig c = make(Strategy::kDWA);
  c.epoch_length = 3;
  Weighter w(c, 3);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 6; ++t) CHECK(w.weigh(oracle::random_risks(rng, 3)).weights == Vector{1, 1, 1});
  const auto after = w.weigh(oracle::random_risks(rng, 3));
  CHECK(sum(after.weights) == Approx(3.0));

  c.temperature = 1e9;
  Weighter flat(c, 3);
  for (int t = 0; t < 30; ++t) {
    const auto out = flat.weigh(oracle::random_risks(rng, 3, -1.0, 1.0));
    for (double x : out.weights) CHECK(std::abs(x - 1.0) <= 1e-6);
  }
}

TEST_CASE("DWA follows the epoch-ratio softmax") {
  WeighterConfig c = make(Strategy::kDWA);
  c.epoch_length = 1;
  Weighter w(c, 2);
  w.weigh(Vector{4, 1});
  w.weigh(Vector{2, 1});
  const auto out = w.weigh(Vector{1, 1});
  // r = {2/4, 1/1}, T = 2.
  const double e0 = std::exp(0.25), e1 = std::exp(0.5);
  CHECK(out.weights[0] == Approx(2 * e0 / (e0 + e1)));
  CHECK(out.weights[1] == Approx(2 * e1 / (e0 + e1)));
}

TEST_CASE("RLW sums to M and replays under a fixed seed") {
  WeighterConfig c = make(Strategy::kRLW);
  c.seed = 42;
  Weighter a(c, 4), b(c, 4);
  c.seed = 43;
  Weighter other(c, 4);
  bool differs = false;
  for (int t = 0; t < 50; ++t) {
    const Vector r{1, 2, 3, 4};
    const auto oa = a.weigh(r);
    CHECK(oa.weights == b.weigh(r).weights);
    differs |= oa.weights != other.weigh(r).weights;
    CHECK(sum(oa.weights) == Approx(4.0));
    for (double x : oa.weights) CHECK(x >= 0.0);
  }
  CHECK(differs);
}

TEST_CASE("uw_aux examples and gradient") {
  Weighter uw(make(Strategy::kUW), 2);
  auto terms = uw_aux(uw, Vector{3, 5});
  CHECK(terms.weights == Vector{1, 1});
  CHECK(terms.aux_loss == 0.0);

  uw.set_log_variance(Vector{std::log(2.0), 0.0});
  terms = uw_aux(uw, Vector{3, 5});
  CHECK(terms.weights[0] == Approx(0.5));
  CHECK(terms.weights[1] == 1.0);
  CHECK(terms.aux_loss == Approx(std::log(2.0) / 2));

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector r = oracle::random_risks(rng, 3, -1, 1);
    std::normal_distribution<double> n;
    Vector s(3);
    for (double& x : s) x = n(rng);
    uw = Weighter(make(Strategy::kUW), 3);
    uw.set_log_variance(s);
    const auto t = uw_aux(uw, r);
    auto total = [&](const Vector& x) {
      double v = 0.0;
      for (std::size_t i = 0; i < 3; ++i) v += std::exp(-x[i]) * r[i] + x[i] / 2;
      return v;
    };
    const Vector fd = oracle::central_gradient(total, s, 1e-6);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(t.gradient[i] == Approx(fd[i]).epsilon(1e-6).scale(1e-8));
  }

  Weighter ls(make(Strategy::kLS), 2);
  CHECK(code_of([&] { uw_aux(ls, Vector{1, 1}); }) == ErrorCode::kWrongStrategy);
}

TEST_CASE("UW steps its log-variances through weigh") {
  Weighter uw(make(Strategy::kUW), 2);
  const auto first = uw.weigh(Vector{10, 0.1});
  CHECK(first.weights == Vector{1, 1});
  CHECK(uw.log_variance()[0] > 0.0);  // large risk raises s, lowering the weight
  CHECK(uw.log_variance()[1] < 0.0);
  const double expected = sum(uw.log_variance()) / 2;
  CHECK(uw.weigh(Vector{10, 0.1}).aux_loss == expected);
}

TEST_CASE("agrm_wrap examples") {
  const auto out = agrm_wrap(Vector{0.1, 0.12, 0.9}, 2);
  CHECK(out.weights[0] == Approx(0.11));
  CHECK(out.weights[1] == Approx(0.11));
  CHECK(out.weights[2] == 0.9);
  CHECK(agrm_wrap(Vector{0.4, 0.4, 0.4}, 2).weights == Vector{0.4, 0.4, 0.4});
  const Vector base{0.3, 0.1, 0.7};
  CHECK(agrm_wrap(base, 3).weights == base);
}

TEST_CASE("wrapped SI groups its own weights") {
  WeighterConfig c = make(Strategy::kSI);
  c.agrm_wrap = true;
  c.k = 2;
  Weighter w(c, 3);
  CHECK(w.groups());
  const auto out = w.weigh(Vector{1.0, 1.1, 100.0});
  REQUIRE(out.grouping.has_value());
  CHECK(out.weights[2] == Approx(0.01));
  CHECK(out.weights[0] == out.weights[1]);
}

TEST_CASE("weigh rejects bad input and leaves the state unchanged") {
  WeighterConfig c = make(Strategy::kGO4Align);
  c.beta = 0.2;
  Weighter w(c, 3);
  w.weigh(Vector{1, 2, 3});
  const Vector q = w.indicator_state().smoothness;
  CHECK(code_of([&] { w.weigh(Vector{1, 2}); }) == ErrorCode::kDimension);
  CHECK(code_of([&] { w.weigh(Vector{1, -2, 3}); }) == ErrorCode::kNonpositiveRisk);
  CHECK(w.iteration() == 1);
  CHECK(w.indicator_state().smoothness == q);
  CHECK(code_of([] { Weighter(WeighterConfig{}, 1); }) == ErrorCode::kInvalidTaskCount);
  WeighterConfig big = make(Strategy::kGO4Align);
  big.k = 4;
  CHECK(code_of([&] { Weighter(big, 3); }) == ErrorCode::kInvalidK);
}
