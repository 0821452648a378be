// Small builders shared by the unit tests.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dualpower/network.hpp"

namespace testing_support {

using dualpower::Matrix;
using dualpower::NetworkConfig;
using dualpower::Point;
using dualpower::PowerProfile;

// Homogeneous network from a full gain matrix.
inline NetworkConfig uniform_net(const Matrix& gains, double cs, double pmin = 1.0,
                                 double pmax = 15.0, double noise = 1.0) {
  const auto n = static_cast<std::size_t>(gains.rows());
  return NetworkConfig(noise, std::vector<double>(n, cs), std::vector<double>(n, pmin),
                       std::vector<double>(n, pmax), gains);
}

inline Matrix constant_gains(std::size_t n, double g) {
  Matrix m = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), g);
  m.diagonal().setZero();
  return m;
}

// Random layout on a square with independent random thresholds.
inline NetworkConfig random_net(std::mt19937_64& rng, std::size_t n, double side = 10.0) {
  std::uniform_real_distribution<double> coord(0.0, side);
  std::uniform_real_distribution<double> cs(0.05, 0.6);
  std::vector<Point> pos(n);
  for (auto& p : pos) p = {coord(rng), coord(rng)};
  std::vector<double> thr(n);
  for (auto& t : thr) t = cs(rng);
  return NetworkConfig(1.0, thr, std::vector<double>(n, 1.0), std::vector<double>(n, 15.0),
                       dualpower::build_gains(pos, 3.0, 1.0));
}

inline PowerProfile random_profile(std::mt19937_64& rng, const NetworkConfig& net) {
  std::vector<double> p(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    std::uniform_real_distribution<double> d(net.power_min(i), net.power_max(i));
    p[i] = d(rng);
  }
  return PowerProfile(p);
}

}  // namespace testing_support
