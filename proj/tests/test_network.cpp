#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dualpower/network.hpp"
#include "support.hpp"

using namespace dualpower;
using namespace testing_support;

TEST(NetworkConfig, RejectsBadInputs) {
  const Matrix g = constant_gains(2, 0.1);
  EXPECT_THROW(NetworkConfig(0.0, {0.1, 0.1}, {1, 1}, {15, 15}, g), std::invalid_argument);
  EXPECT_THROW(NetworkConfig(1.0, {}, {}, {}, Matrix(0, 0)), std::invalid_argument);
  EXPECT_THROW(NetworkConfig(1.0, {0.1, 0.1}, {1}, {15, 15}, g), std::invalid_argument);
  EXPECT_THROW(NetworkConfig(1.0, {0.1, -0.1}, {1, 1}, {15, 15}, g), std::invalid_argument);
  EXPECT_THROW(NetworkConfig(1.0, {0.1, 0.1}, {16, 1}, {15, 15}, g), std::invalid_argument);
  EXPECT_THROW(NetworkConfig(1.0, {0.1, 0.1}, {1, 1}, {15, 15}, constant_gains(3, 0.1)),
               std::invalid_argument);
  EXPECT_THROW(NetworkConfig(1.0, {0.1, 0.1}, {1, 1}, {15, 15}, constant_gains(2, 0.0)),
               std::invalid_argument);
  Matrix bad = g;
  bad(0, 1) = std::nan("");
  EXPECT_THROW(NetworkConfig(1.0, {0.1, 0.1}, {1, 1}, {15, 15}, bad), std::invalid_argument);
}

TEST(NetworkConfig, SymmetrizesAndClearsDiagonal) {
  Matrix g(2, 2);
  g << 5.0, 0.2, 0.4, 7.0;
  const NetworkConfig net(1.0, {0.1, 0.1}, {1, 1}, {15, 15}, g);
  EXPECT_DOUBLE_EQ(net.gain(0, 1), 0.3);
  EXPECT_DOUBLE_EQ(net.gain(1, 0), 0.3);
  EXPECT_EQ(net.gain(0, 0), 0.0);
}

TEST(Profiles, BoxAndRateChecks) {
  const auto net = uniform_net(constant_gains(2, 0.1), 0.5);
  EXPECT_TRUE(within_box(net, PowerProfile({1.0, 15.0})));
  EXPECT_FALSE(within_box(net, PowerProfile({0.5, 15.0})));
  EXPECT_FALSE(within_box(net, PowerProfile({1.0})));
  EXPECT_THROW(require_valid(net, PowerProfile({1.0, 15.5})), std::invalid_argument);
  EXPECT_THROW(require_valid(net, PowerProfile({1.0})), std::invalid_argument);
  EXPECT_THROW(require_rate(0.0), std::domain_error);
  EXPECT_THROW(require_rate(1.0), std::domain_error);
  EXPECT_NO_THROW(require_rate(0.5));
  EXPECT_THROW(AttemptProfile({0.5, 0.0}), std::domain_error);
  EXPECT_NO_THROW(AttemptProfile({0.5, 1.0}));
  EXPECT_THROW(AttemptProfile::fair(3, 1.0), std::domain_error);
  EXPECT_DOUBLE_EQ(PowerProfile({1.0, 2.5}).sum(), 3.5);
}

TEST(ContentionView, HandBuiltThreeAps) {
  // 0-1 close, 2 far from both.
  Matrix g(3, 3);
  g << 0, 0.1, 0.001, 0.1, 0, 0.002, 0.001, 0.002, 0;
  const auto net = uniform_net(g, 0.5);
  // At 15: 15*0.1 = 1.5 >= 0.5; 15*0.002 = 0.03 < 0.5.
  const auto v = contention_view(net, PowerProfile::max_power(net));
  EXPECT_EQ(v.orders, (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_TRUE(v.in_receive(0, 1));
  EXPECT_TRUE(v.in_transmit(1, 0));
  EXPECT_FALSE(v.interferes(0, 1));
  EXPECT_TRUE(v.interferes(0, 2));
  EXPECT_FALSE(v.interferes(2, 2));
  EXPECT_EQ(v.total_order(), 2u);
  // AP 0 drops below 5: AP 1 no longer hears it, but 0 still hears 1.
  const auto w = contention_view(net, PowerProfile({4.0, 15.0, 15.0}));
  EXPECT_EQ(w.orders, (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_FALSE(w.interferes(0, 1));
}

TEST(ContentionView, MatchesDirectDefinition) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng, 6);
    const auto p = random_profile(rng, net);
    const auto v = contention_view(net, p);
    for (std::size_t i = 0; i < 6; ++i) {
      std::size_t order = 0;
      for (std::size_t j = 0; j < 6; ++j) {
        const bool heard = j != i && p[j] * net.gain(j, i) >= net.cs_threshold(i);
        order += heard;
        EXPECT_EQ(v.in_receive(i, j), heard);
        EXPECT_EQ(v.in_transmit(j, i), heard);
      }
      EXPECT_EQ(v.orders[i], order);
    }
  }
}

TEST(ReachPower, IsTheSmallestReachingDouble) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto net = random_net(rng, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t k = 0; k < 4; ++k) {
        if (i == k) continue;
        const double r = reach_power(net, i, k);
        EXPECT_GE(r * net.gain(i, k), net.cs_threshold(k));
        EXPECT_LT(std::nextafter(r, 0.0) * net.gain(i, k), net.cs_threshold(k));
        EXPECT_LT(below_reach_power(net, i, k) * net.gain(i, k), net.cs_threshold(k));
      }
    }
  }
}

TEST(ThresholdSpace, SortedUniqueInsideBox) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng, 5);
    const auto space = reach_thresholds(net);
    ASSERT_EQ(space.size(), 5u);
    double card = 1.0;
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& l = space.levels(i);
      EXPECT_EQ(l.front(), net.power_min(i));
      EXPECT_EQ(l.back(), net.power_max(i));
      EXPECT_TRUE(std::is_sorted(l.begin(), l.end()));
      EXPECT_EQ(std::adjacent_find(l.begin(), l.end()), l.end());
      // Every reachable boundary inside the box appears with its partner.
      for (std::size_t k = 0; k < 5; ++k) {
        if (k == i) continue;
        const double r = reach_power(net, i, k);
        if (r > net.power_min(i) && r <= net.power_max(i)) {
          EXPECT_NE(std::find(l.begin(), l.end(), r), l.end());
        }
      }
      card *= static_cast<double>(l.size());
    }
    EXPECT_EQ(space.cardinality(), card);
  }
}

TEST(ThresholdSpace, UnreachableNeighborsGiveOnlyEndpoints) {
  const auto net = uniform_net(constant_gains(3, 1e-4), 0.5);
  const auto space = reach_thresholds(net);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(space.levels(i), (std::vector<double>{1.0, 15.0}));
  }
  EXPECT_EQ(space.cardinality(), 8.0);
}

TEST(BuildGains, PathLossAndSymmetry) {
  const std::vector<Point> pos{{0, 0}, {2, 0}, {0, 0.5}};
  const Matrix h = build_gains(pos, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(h(0, 1), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(h(1, 0), h(0, 1));
  EXPECT_DOUBLE_EQ(h(0, 2), 1.0);  // capped at unit gain
  EXPECT_EQ(h(1, 1), 0.0);
  EXPECT_THROW(build_gains({{1, 1}, {1, 1}}, 3.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_gains(pos, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_gains(pos, 3.0, -1.0), std::invalid_argument);
}

TEST(Connectivity, StandAloneAps) {
  Matrix g(3, 3);
  g << 0, 0.1, 1e-5, 0.1, 0, 1e-5, 1e-5, 1e-5, 0;
  const auto net = uniform_net(g, 0.5);
  EXPECT_EQ(stand_alone_aps(net), (std::vector<std::size_t>{2}));
  EXPECT_FALSE(is_dense(net));
  EXPECT_TRUE(is_dense(uniform_net(constant_gains(3, 0.1), 0.5)));
}

// Scaling powers and thresholds together leaves contention unchanged.
TEST(ContentionView, ScaleInvariance) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng, 5);
    const auto p = random_profile(rng, net);
    const double c = 4.0;
    std::vector<double> cs = net.cs_thresholds(), lo = net.power_mins(), hi = net.power_maxs();
    std::vector<double> q = p.values();
    for (auto* v : {&cs, &lo, &hi, &q}) {
      for (auto& x : *v) x *= c;
    }
    const NetworkConfig scaled(net.noise_floor() * c, cs, lo, hi, net.gains());
    EXPECT_EQ(contention_view(net, p), contention_view(scaled, PowerProfile(q)));
  }
}
