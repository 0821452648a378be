#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dualpower/objective.hpp"
#include "support.hpp"

using namespace dualpower;
using namespace testing_support;

namespace {

NetworkConfig single_ap() {
  return NetworkConfig(1.0, {0.5}, {1.0}, {15.0}, Matrix::Zero(1, 1));
}

}  // namespace

TEST(Objective, IsolatedAp) {
  const auto net = single_ap();
  const PowerProfile p({15.0});
  EXPECT_DOUBLE_EQ(capacity(net, p, 0.6, ObjectiveKind::Exact, 0), 4.0);
  EXPECT_NEAR(utility_total(net, p, 0.6, ObjectiveKind::Exact).total, 2.4, 1e-15);
  EXPECT_DOUBLE_EQ(utility_total(net, p, 0.6, ObjectiveKind::Upper).total, 0.6 * 15.0);
  EXPECT_THROW(capacity(net, p, 0.6, ObjectiveKind::Exact, 1), std::out_of_range);
  EXPECT_THROW(utility_total(net, p, 1.0, ObjectiveKind::Exact), std::domain_error);
  EXPECT_EQ(to_string(ObjectiveKind::Lower), "LOWER");
}

TEST(Objective, MutualContentionHasNoInterference) {
  const auto net = uniform_net(constant_gains(2, 0.1), 0.5);
  const PowerProfile p({15.0, 12.0});
  const auto b = utility_total(net, p, 0.5, ObjectiveKind::Exact);
  EXPECT_DOUBLE_EQ(b.capacity[0], std::log2(16.0));
  EXPECT_DOUBLE_EQ(b.capacity[1], std::log2(13.0));
  EXPECT_DOUBLE_EQ(b.sharing[0], 0.25);
  EXPECT_DOUBLE_EQ(b.total, 0.25 * (4.0 + std::log2(13.0)));
}

// Two APs out of each other's range: S_i = p_c and each sees the other's
// power scaled by its share.
TEST(Objective, TwoApExpansionWithoutContention) {
  const double h = 0.01, pc = 0.4;
  const auto net = uniform_net(constant_gains(2, h), 0.5);
  const double p1 = 7.0, p2 = 11.0;
  const double expect = pc * std::log2(1.0 + p1 / (1.0 + pc * p2 * h)) +
                        pc * std::log2(1.0 + p2 / (1.0 + pc * p1 * h));
  EXPECT_NEAR(objective_value(net, PowerProfile({p1, p2}), pc, ObjectiveKind::Exact), expect,
              1e-14);
  const double lower = pc * std::log2(1.0 + p1 / (1.0 + pc * 0.5)) +
                       pc * std::log2(1.0 + p2 / (1.0 + pc * 0.5));
  EXPECT_NEAR(objective_value(net, PowerProfile({p1, p2}), pc, ObjectiveKind::Lower), lower,
              1e-14);
}

// One-way hearing: AP 1 hears AP 0 but not vice versa.
TEST(Objective, TwoApOneWayHearing) {
  Matrix g = constant_gains(2, 0.05);
  NetworkConfig net(1.0, {0.5, 0.5}, {1, 1}, {15, 15}, g);
  const PowerProfile p({12.0, 5.0});  // 12*0.05=0.6 heard, 5*0.05=0.25 not
  const auto b = utility_total(net, p, 0.5, ObjectiveKind::Exact);
  EXPECT_EQ(contention_view(net, p).orders, (std::vector<std::size_t>{0, 1}));
  EXPECT_DOUBLE_EQ(b.sharing[0], 0.5);
  EXPECT_DOUBLE_EQ(b.sharing[1], 0.25);
  EXPECT_DOUBLE_EQ(b.total, 0.5 * std::log2(13.0) + 0.25 * std::log2(6.0));
}

TEST(Sharing, HeterogeneousRatesMatchProduct) {
  std::mt19937_64 rng(2);
  const auto net = random_net(rng, 5);
  const auto p = random_profile(rng, net);
  const auto view = contention_view(net, p);
  const AttemptProfile rates({0.1, 0.3, 0.5, 0.7, 0.9});
  const auto s = sharing(view, rates);
  for (std::size_t i = 0; i < 5; ++i) {
    double want = rates[i];
    for (std::size_t j = 0; j < 5; ++j) {
      if (view.in_receive(i, j)) want *= 1.0 - rates[j];
    }
    EXPECT_DOUBLE_EQ(s[i], want);
  }
  const auto fair = sharing(view, 0.3);
  const auto fair2 = sharing(view, AttemptProfile::fair(5, 0.3));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(fair[i], fair2[i], 1e-15);
  EXPECT_THROW(sharing(view, AttemptProfile({0.5})), std::invalid_argument);
}

TEST(Objective, LowerNeverExceedsExact) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pc(0.05, 0.95);
  for (int t = 0; t < 1000; ++t) {
    const auto net = random_net(rng, 2 + t % 5);
    const auto p = random_profile(rng, net);
    const double c = pc(rng);
    const double lo = objective_value(net, p, c, ObjectiveKind::Lower);
    const double ex = objective_value(net, p, c, ObjectiveKind::Exact);
    EXPECT_LE(lo, ex * (1.0 + 1e-12));
  }
}

// log2(1+x) <= x exactly when x >= 1, so the UPPER bound only certifies
// profiles whose SINRs all reach 1.
TEST(Objective, UpperBoundsExactWhenSinrAtLeastOne) {
  std::mt19937_64 rng(22);
  int gated = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto net = random_net(rng, 2 + t % 4);
    const auto p = random_profile(rng, net);
    const auto s = sinr(net, p, 0.5);
    if (*std::min_element(s.begin(), s.end()) < 1.0) continue;
    ++gated;
    EXPECT_LE(objective_value(net, p, 0.5, ObjectiveKind::Exact),
              objective_value(net, p, 0.5, ObjectiveKind::Upper) * (1.0 + 1e-12));
  }
  EXPECT_GT(gated, 100);
  // Below SINR 1 the relation flips.
  const auto net = single_ap();
  const NetworkConfig weak(20.0, {0.5}, {1.0}, {15.0}, Matrix::Zero(1, 1));
  EXPECT_GT(objective_value(weak, PowerProfile({10.0}), 0.5, ObjectiveKind::Exact),
            objective_value(weak, PowerProfile({10.0}), 0.5, ObjectiveKind::Upper));
}

// Multiplying powers, noise and thresholds by one constant changes nothing.
TEST(Objective, ScaleInvariance) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    const auto net = random_net(rng, 4);
    const auto p = random_profile(rng, net);
    const double c = 8.0;
    std::vector<double> cs = net.cs_thresholds(), lo = net.power_mins(), hi = net.power_maxs();
    std::vector<double> q = p.values();
    for (auto* v : {&cs, &lo, &hi, &q}) {
      for (auto& x : *v) x *= c;
    }
    const NetworkConfig scaled(net.noise_floor() * c, cs, lo, hi, net.gains());
    EXPECT_NEAR(objective_value(net, p, 0.6, ObjectiveKind::Exact),
                objective_value(scaled, PowerProfile(q), 0.6, ObjectiveKind::Exact), 1e-12);
  }
}

// Between consecutive thresholds of AP i the LOWER total increases with P_i.
TEST(Objective, LowerStrictlyIncreasingBetweenThresholds) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const auto net = random_net(rng, 4);
    auto p = random_profile(rng, net);
    const auto space = reach_thresholds(net);
    const std::size_t i = t % 4;
    const auto& l = space.levels(i);
    for (std::size_t k = 0; k + 1 < l.size(); ++k) {
      const double a = l[k], b = l[k + 1];
      if (b - a < 1e-6 * b) continue;
      p[i] = a + 0.25 * (b - a);
      const double u1 = objective_value(net, p, 0.5, ObjectiveKind::Lower);
      p[i] = a + 0.75 * (b - a);
      const double u2 = objective_value(net, p, 0.5, ObjectiveKind::Lower);
      EXPECT_LT(u1, u2);
    }
  }
}

TEST(TwoUser, RejectsWrongShape) {
  EXPECT_THROW(two_user_optimum(uniform_net(constant_gains(3, 0.1), 0.5)), std::invalid_argument);
  EXPECT_THROW(two_user_optimum(uniform_net(constant_gains(2, 0.1), 0.5), 0.6),
               std::invalid_argument);
}

TEST(TwoUser, NeverReachableLeavesCornerCase) {
  const auto net = uniform_net(constant_gains(2, 1e-4), 0.5);
  const auto r = two_user_optimum(net);
  EXPECT_EQ(r.label, TwoUserCase::NeitherHears);
  // Corner search over {1, 15}^2 by hand.
  double best = -1;
  for (double a : {1.0, 15.0}) {
    for (double b : {1.0, 15.0}) {
      best = std::max(best, objective_value(net, PowerProfile({a, b}), 0.5, ObjectiveKind::Exact));
    }
  }
  EXPECT_DOUBLE_EQ(r.total, best);
  EXPECT_EQ(r.profile, PowerProfile({15.0, 15.0}));
}

TEST(TwoUser, AlwaysInRangeIsMutual) {
  const auto net = uniform_net(constant_gains(2, 0.8), 0.5);  // 1 * 0.8 >= 0.5
  const auto r = two_user_optimum(net);
  EXPECT_EQ(r.label, TwoUserCase::Mutual);
  EXPECT_EQ(r.profile, PowerProfile({15.0, 15.0}));
  EXPECT_DOUBLE_EQ(r.total, 0.5 * 4.0);
}

// The returned total is at least as good as every lattice point.
TEST(TwoUser, DominatesLattice) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 100; ++t) {
    const auto net = random_net(rng, 2, 8.0);
    const auto r = two_user_optimum(net);
    EXPECT_NEAR(objective_value(net, r.profile, 0.5, ObjectiveKind::Exact), r.total, 1e-15);
    const auto space = reach_thresholds(net);
    for (double a : space.levels(0)) {
      for (double b : space.levels(1)) {
        EXPECT_LE(objective_value(net, PowerProfile({a, b}), 0.5, ObjectiveKind::Exact),
                  r.total + 1e-12);
      }
    }
  }
}
