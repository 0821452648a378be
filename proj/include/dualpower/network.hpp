// Static network description and contention-topology computations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dualpower {

using Matrix = Eigen::MatrixXd;

struct Point {
  double x{0.0};
  double y{0.0};
};

// Relative offset used to place a "just below reach" level under a
// neighbor-reaching boundary.
inline constexpr double kReachBelowRel = 1e-9;

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) {
    throw std::invalid_argument(what);
  }
}

inline bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x) && x > 0.0; });
}

}  // namespace detail

// Immutable description of N access points: noise floor, carrier-sense
// thresholds, power boxes and a symmetric gain matrix (linear units).
class NetworkConfig {
 public:
  NetworkConfig(double noise_floor, std::vector<double> cs_threshold,
                std::vector<double> power_min, std::vector<double> power_max,
                Matrix gains)
      : n_(cs_threshold.size()),
        noise_floor_(noise_floor),
        cs_threshold_(std::move(cs_threshold)),
        power_min_(std::move(power_min)),
        power_max_(std::move(power_max)),
        gains_(std::move(gains)) {
    using detail::require;
    require(n_ >= 1, "network needs at least one AP");
    require(std::isfinite(noise_floor_) && noise_floor_ > 0.0,
            "noise floor must be positive");
    require(power_min_.size() == n_ && power_max_.size() == n_,
            "power range vectors must have one entry per AP");
    require(detail::all_positive(cs_threshold_),
            "carrier-sense thresholds must be positive");
    require(detail::all_positive(power_min_) && detail::all_positive(power_max_),
            "power bounds must be positive");
    for (std::size_t i = 0; i < n_; ++i) {
      require(power_min_[i] <= power_max_[i],
              "power_min must not exceed power_max (AP " + std::to_string(i) + ")");
    }
    require(static_cast<std::size_t>(gains_.rows()) == n_ &&
                static_cast<std::size_t>(gains_.cols()) == n_,
            "gain matrix must be N x N");
    // Symmetrize; the diagonal carries no meaning.
    Matrix sym = 0.5 * (gains_ + gains_.transpose());
    for (std::size_t i = 0; i < n_; ++i) {
      sym(i, i) = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (i == j) continue;
        const double g = sym(i, j);
        require(std::isfinite(g) && g > 0.0,
                "off-diagonal gains must be finite and strictly positive");
      }
    }
    gains_ = std::move(sym);
  }

  std::size_t size() const { return n_; }
  double noise_floor() const { return noise_floor_; }
  double cs_threshold(std::size_t i) const { return cs_threshold_[i]; }
  double power_min(std::size_t i) const { return power_min_[i]; }
  double power_max(std::size_t i) const { return power_max_[i]; }
  double gain(std::size_t i, std::size_t j) const { return gains_(i, j); }

  const std::vector<double>& cs_thresholds() const { return cs_threshold_; }
  const std::vector<double>& power_mins() const { return power_min_; }
  const std::vector<double>& power_maxs() const { return power_max_; }
  const Matrix& gains() const { return gains_; }

 private:
  std::size_t n_;
  double noise_floor_;
  std::vector<double> cs_threshold_;
  std::vector<double> power_min_;
  std::vector<double> power_max_;
  Matrix gains_;
};

// Transmit power per AP.
class PowerProfile {
 public:
  PowerProfile() = default;
  explicit PowerProfile(std::vector<double> powers) : powers_(std::move(powers)) {}

  static PowerProfile max_power(const NetworkConfig& net) {
    return PowerProfile(net.power_maxs());
  }
  static PowerProfile min_power(const NetworkConfig& net) {
    return PowerProfile(net.power_mins());
  }

  std::size_t size() const { return powers_.size(); }
  double operator[](std::size_t i) const { return powers_[i]; }
  double& operator[](std::size_t i) { return powers_[i]; }
  const std::vector<double>& values() const { return powers_; }

  double sum() const {
    double s = 0.0;
    for (double p : powers_) s += p;
    return s;
  }

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;

 private:
  std::vector<double> powers_;
};

inline bool within_box(const NetworkConfig& net, const PowerProfile& profile) {
  if (profile.size() != net.size()) return false;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!(profile[i] >= net.power_min(i) && profile[i] <= net.power_max(i))) {
      return false;
    }
  }
  return true;
}

inline void require_valid(const NetworkConfig& net, const PowerProfile& profile) {
  if (profile.size() != net.size()) {
    throw std::invalid_argument("power profile length does not match AP count");
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!(profile[i] >= net.power_min(i) && profile[i] <= net.power_max(i))) {
      std::ostringstream os;
      os << "power " << profile[i] << " of AP " << i << " outside ["
         << net.power_min(i) << ", " << net.power_max(i) << "]";
      throw std::invalid_argument(os.str());
    }
  }
}

inline void require_rate(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("attempt rate must lie strictly inside (0, 1)");
  }
}

// Per-AP channel attempt rates. Punishment phases of the repeated game use
// rates up to and including 1, so the upper bound is checked by callers
// that need the open interval.
class AttemptProfile {
 public:
  explicit AttemptProfile(std::vector<double> rates) : rates_(std::move(rates)) {
    for (double p : rates_) {
      if (!(p > 0.0 && p <= 1.0)) {
        throw std::domain_error("attempt rates must lie in (0, 1]");
      }
    }
  }

  static AttemptProfile fair(std::size_t n, double p_c) {
    require_rate(p_c);
    return AttemptProfile(std::vector<double>(n, p_c));
  }

  std::size_t size() const { return rates_.size(); }
  double operator[](std::size_t i) const { return rates_[i]; }
  const std::vector<double>& values() const { return rates_; }

 private:
  std::vector<double> rates_;
};

// Receive/transmit contention domains under a fixed power profile.
struct ContentionView {
  std::vector<std::vector<std::size_t>> receive_domain;
  std::vector<std::vector<std::size_t>> transmit_domain;
  std::vector<std::size_t> orders;
  // hears[i * n + j] is true iff j is in receive_domain[i].
  std::vector<char> hears;

  std::size_t size() const { return orders.size(); }

  bool in_receive(std::size_t i, std::size_t j) const {
    return hears[i * size() + j] != 0;
  }
  bool in_transmit(std::size_t i, std::size_t j) const { return in_receive(j, i); }

  // j != i lies outside both contention domains of i, so its transmissions
  // overlap with i's and count as interference.
  bool interferes(std::size_t i, std::size_t j) const {
    return i != j && !in_receive(i, j) && !in_receive(j, i);
  }

  std::size_t total_order() const {
    std::size_t s = 0;
    for (auto o : orders) s += o;
    return s;
  }

  friend bool operator==(const ContentionView& a, const ContentionView& b) {
    return a.hears == b.hears;
  }
};

inline ContentionView contention_view(const NetworkConfig& net,
                                      const PowerProfile& profile) {
  const std::size_t n = net.size();
  ContentionView view;
  view.receive_domain.resize(n);
  view.transmit_domain.resize(n);
  view.orders.assign(n, 0);
  view.hears.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (profile[j] * net.gain(j, i) >= net.cs_threshold(i)) {
        view.hears[i * n + j] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (view.hears[i * n + j]) {
        view.receive_domain[i].push_back(j);
        view.transmit_domain[j].push_back(i);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    view.orders[i] = view.receive_domain[i].size();
  }
  return view;
}

// Power at which AP i starts being heard by AP k: the smallest double P with
// P * h_ik >= cs_k.
inline double reach_power(const NetworkConfig& net, std::size_t i, std::size_t k) {
  const double h = net.gain(i, k);
  const double cs = net.cs_threshold(k);
  double b = cs / h;
  while (b * h < cs) b = std::nextafter(b, std::numeric_limits<double>::infinity());
  while (true) {
    const double below = std::nextafter(b, 0.0);
    if (below * h >= cs) {
      b = below;
    } else {
      break;
    }
  }
  return b;
}

// Just-below-reach level paired with reach_power.
inline double below_reach_power(const NetworkConfig& net, std::size_t i,
                                std::size_t k) {
  return reach_power(net, i, k) * (1.0 - kReachBelowRel);
}

// Finite per-AP lattice of neighbor-reaching power levels.
struct ThresholdSpace {
  std::vector<std::vector<double>> per_ap;

  std::size_t size() const { return per_ap.size(); }
  const std::vector<double>& levels(std::size_t i) const { return per_ap[i]; }

  // Product of level counts, saturating at max double.
  double cardinality() const {
    double c = 1.0;
    for (const auto& l : per_ap) c *= static_cast<double>(l.size());
    return c;
  }
};

inline ThresholdSpace reach_thresholds(const NetworkConfig& net) {
  const std::size_t n = net.size();
  ThresholdSpace space;
  space.per_ap.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = net.power_min(i);
    const double hi = net.power_max(i);
    auto& levels = space.per_ap[i];
    levels.push_back(lo);
    levels.push_back(hi);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double plus = reach_power(net, i, k);
      const double minus = plus * (1.0 - kReachBelowRel);
      if (plus >= lo && plus <= hi) levels.push_back(plus);
      if (minus >= lo && minus <= hi) levels.push_back(minus);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  }
  return space;
}

// Power-law path loss h = min(1, g0 * d^-alpha), symmetric by construction.
inline Matrix build_gains(const std::vector<Point>& positions, double exponent,
                          double reference_gain) {
  detail::require(std::isfinite(exponent) && exponent > 0.0,
                  "path-loss exponent must be positive");
  detail::require(std::isfinite(reference_gain) && reference_gain > 0.0,
                  "reference gain must be positive");
  const std::size_t n = positions.size();
  Matrix h = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(positions[i].x - positions[j].x,
                                  positions[i].y - positions[j].y);
      if (!(d > 0.0)) {
        throw std::invalid_argument("APs " + std::to_string(i) + " and " +
                                    std::to_string(j) +
                                    " share a position (infinite gain)");
      }
      const double g = std::min(1.0, reference_gain * std::pow(d, -exponent));
      h(i, j) = g;
      h(j, i) = g;
    }
  }
  return h;
}

// True when every AP can be heard by at least one other AP at maximum power.
inline bool is_dense(const NetworkConfig& net) {
  const auto view = contention_view(net, PowerProfile::max_power(net));
  return std::all_of(view.orders.begin(), view.orders.end(),
                     [](std::size_t o) { return o > 0; });
}

// APs that nobody reaches even at full power.
inline std::vector<std::size_t> stand_alone_aps(const NetworkConfig& net) {
  const auto view = contention_view(net, PowerProfile::max_power(net));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (view.orders[i] == 0) out.push_back(i);
  }
  return out;
}

}  // namespace dualpower
