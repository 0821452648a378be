// Single-layer comparison models: relaxed PHY rate maximization and
// SNR-constrained contention minimization.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "dualpower/network.hpp"
#include "dualpower/objective.hpp"
#include "dualpower/search.hpp"

namespace dualpower {

// Relaxed PHY objective sum_i [ln(P_i/N0) - sum_{j!=i} P_j h_ji / N0].
inline double rpphy_objective(const NetworkConfig& net, const PowerProfile& profile) {
  const double n0 = net.noise_floor();
  double v = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    v += std::log(profile[i] / n0);
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (j != i) v -= profile[j] * net.gain(j, i) / n0;
    }
  }
  return v;
}

// The relaxed objective separates per coordinate; P_i* = N0 / H_i clamped to
// the box, H_i the total gain towards the other APs.
inline PowerProfile solve_rpphy(const NetworkConfig& net) {
  std::vector<double> p(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    double h = 0.0;
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (j != i) h += net.gain(i, j);
    }
    if (h <= 0.0) {
      p[i] = net.power_max(i);
    } else {
      p[i] = std::clamp(net.noise_floor() / h, net.power_min(i), net.power_max(i));
    }
  }
  return PowerProfile(std::move(p));
}

struct RpmacConstraint {
  double snr_floor{1.0};

  explicit RpmacConstraint(double snr) : snr_floor(snr) {
    if (!(std::isfinite(snr) && snr > 0.0)) {
      throw std::invalid_argument("SNR floor must be positive");
    }
  }
};

struct RpmacCheck {
  bool feasible{false};
  std::vector<double> snr;
  std::vector<double> slack;

  double min_slack() const {
    return slack.empty() ? 0.0 : *std::min_element(slack.begin(), slack.end());
  }
};

// Surrogate SNR P_i / (N0 + sum_{j interferes} S_j * cs_i) against the floor.
inline RpmacCheck rpmac_feasible(const NetworkConfig& net, const PowerProfile& profile,
                                 double p_c, const RpmacConstraint& constraint) {
  const auto lower = utility_total(net, profile, p_c, ObjectiveKind::Lower);
  RpmacCheck out;
  out.feasible = true;
  out.snr.resize(net.size());
  out.slack.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    out.snr[i] = profile[i] / (net.noise_floor() + lower.interference[i]);
    out.slack[i] = out.snr[i] - constraint.snr_floor;
    if (out.slack[i] < 0.0) out.feasible = false;
  }
  return out;
}

class RpmacInfeasible : public std::runtime_error {
 public:
  RpmacInfeasible(PowerProfile best, double best_slack)
      : std::runtime_error(message(best_slack)),
        best_(std::move(best)),
        best_slack_(best_slack) {}

  const PowerProfile& best_profile() const { return best_; }
  double best_slack() const { return best_slack_; }

 private:
  static std::string message(double slack) {
    std::ostringstream os;
    os << "no profile in the threshold space meets the SNR floor (best worst-case slack "
       << slack << ")";
    return os.str();
  }
  PowerProfile best_;
  double best_slack_;
};

struct RpmacSolution {
  PowerProfile profile;
  std::size_t total_order{0};
  bool exhaustive{true};
};

namespace detail {

// Lexicographic score: feasible first, then fewer contention pairs, then
// more total power.
struct RpmacScore {
  bool feasible{false};
  double neg_order{0.0};
  double power{0.0};
  double min_slack{0.0};

  friend bool operator<(const RpmacScore& a, const RpmacScore& b) {
    if (a.feasible != b.feasible) return !a.feasible;
    if (!a.feasible) return a.min_slack < b.min_slack;
    return std::tie(a.neg_order, a.power) < std::tie(b.neg_order, b.power);
  }
};

inline RpmacScore rpmac_score(const NetworkConfig& net, const PowerProfile& p, double p_c,
                              const RpmacConstraint& c) {
  const auto check = rpmac_feasible(net, p, p_c, c);
  const auto view = contention_view(net, p);
  return {check.feasible, -static_cast<double>(view.total_order()), p.sum(),
          check.min_slack()};
}

}  // namespace detail

inline RpmacSolution solve_rpmac(const NetworkConfig& net, double p_c,
                                 const RpmacConstraint& constraint,
                                 double exhaustive_limit = kExhaustiveLimit) {
  require_rate(p_c);
  const ThresholdSpace space = reach_thresholds(net);
  std::optional<detail::RpmacScore> best;
  PowerProfile best_profile;
  bool exhaustive_run = space.cardinality() <= exhaustive_limit;

  if (exhaustive_run) {
    enumerate_lattice(space, [&](const PowerProfile& p) {
      const auto s = detail::rpmac_score(net, p, p_c, constraint);
      if (!best || *best < s) {
        best = s;
        best_profile = p;
      }
    });
  } else {
    auto eval = [&](const PowerProfile& p) {
      return detail::rpmac_score(net, p, p_c, constraint);
    };
    const auto trace = coordinate_ascent<detail::RpmacScore>(
        space, PowerProfile::max_power(net), eval,
        [](const detail::RpmacScore& s) { return s.neg_order; });
    best_profile = trace.best_profile;
    best = detail::rpmac_score(net, best_profile, p_c, constraint);
  }

  if (!best->feasible) throw RpmacInfeasible(best_profile, best->min_slack);
  return {best_profile, static_cast<std::size_t>(-best->neg_order), exhaustive_run};
}

}  // namespace dualpower
