// Sharing, capacity and utility functions with their lower/upper surrogates.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dualpower/network.hpp"

namespace dualpower {

enum class ObjectiveKind { Exact, Lower, Upper };

inline std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Exact: return "EXACT";
    case ObjectiveKind::Lower: return "LOWER";
    case ObjectiveKind::Upper: return "UPPER";
  }
  return "?";
}

struct UtilityBreakdown {
  ObjectiveKind kind{ObjectiveKind::Exact};
  std::vector<double> sharing;
  std::vector<double> capacity;
  std::vector<double> per_ap;
  std::vector<double> interference;
  double total{0.0};
};

// Airtime share S_i = p_i * prod_{j in receive_domain_i} (1 - p_j).
inline std::vector<double> sharing(const ContentionView& view,
                                   const AttemptProfile& rates) {
  const std::size_t n = view.size();
  if (rates.size() != n) {
    throw std::invalid_argument("attempt profile length does not match AP count");
  }
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = rates[i];
    for (std::size_t j : view.receive_domain[i]) v *= 1.0 - rates[j];
    s[i] = v;
  }
  return s;
}

// Fair network: S_i = (1 - p_c)^{n_i} * p_c.
inline std::vector<double> sharing(const ContentionView& view, double p_c) {
  require_rate(p_c);
  std::vector<double> s(view.size());
  for (std::size_t i = 0; i < view.size(); ++i) {
    s[i] = std::pow(1.0 - p_c, static_cast<double>(view.orders[i])) * p_c;
  }
  return s;
}

namespace detail {

inline double interference_term(const NetworkConfig& net, const PowerProfile& profile,
                                const ContentionView& view,
                                const std::vector<double>& share, ObjectiveKind kind,
                                std::size_t i) {
  double sum = 0.0;
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (!view.interferes(i, j)) continue;
    const double received =
        kind == ObjectiveKind::Lower ? net.cs_threshold(i) : profile[j] * net.gain(j, i);
    sum += share[j] * received;
  }
  return sum;
}

inline double capacity_from_sinr(double sinr, ObjectiveKind kind) {
  return kind == ObjectiveKind::Upper ? sinr : std::log2(1.0 + sinr);
}

}  // namespace detail

// Full evaluation under arbitrary per-AP attempt rates.
inline UtilityBreakdown evaluate(const NetworkConfig& net, const PowerProfile& profile,
                                 const AttemptProfile& rates, ObjectiveKind kind) {
  const std::size_t n = net.size();
  const ContentionView view = contention_view(net, profile);
  UtilityBreakdown out;
  out.kind = kind;
  out.sharing = sharing(view, rates);
  out.capacity.resize(n);
  out.per_ap.resize(n);
  out.interference.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double interf =
        detail::interference_term(net, profile, view, out.sharing, kind, i);
    const double sinr = profile[i] / (net.noise_floor() + interf);
    out.interference[i] = interf;
    out.capacity[i] = detail::capacity_from_sinr(sinr, kind);
    out.per_ap[i] = out.sharing[i] * out.capacity[i];
    out.total += out.per_ap[i];
  }
  return out;
}

inline UtilityBreakdown utility_total(const NetworkConfig& net,
                                      const PowerProfile& profile, double p_c,
                                      ObjectiveKind kind) {
  require_rate(p_c);
  return evaluate(net, profile, AttemptProfile::fair(net.size(), p_c), kind);
}

inline double capacity(const NetworkConfig& net, const PowerProfile& profile, double p_c,
                       ObjectiveKind kind, std::size_t i) {
  if (i >= net.size()) throw std::out_of_range("AP index out of range");
  return utility_total(net, profile, p_c, kind).capacity[i];
}

// Signal-to-interference-plus-noise ratio seen by each AP under the exact
// interference model.
inline std::vector<double> sinr(const NetworkConfig& net, const PowerProfile& profile,
                                double p_c) {
  const auto b = utility_total(net, profile, p_c, ObjectiveKind::Exact);
  std::vector<double> out(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    out[i] = profile[i] / (net.noise_floor() + b.interference[i]);
  }
  return out;
}

// Objective value only; the hot path of every search.
inline double objective_value(const NetworkConfig& net, const PowerProfile& profile,
                              double p_c, ObjectiveKind kind) {
  return utility_total(net, profile, p_c, kind).total;
}

// Two-AP analysis at p_c = 1/2.

enum class TwoUserCase { NeitherHears = 1, FirstReachesSecond = 2, SecondReachesFirst = 3, Mutual = 4 };

struct TwoUserResult {
  PowerProfile profile;
  TwoUserCase label{TwoUserCase::Mutual};
  double total{0.0};
};

namespace detail {

// Largest power that stays unheard by the other AP, if any.
inline bool quiet_ceiling(const NetworkConfig& net, std::size_t i, std::size_t k,
                          double& out) {
  const double reach = reach_power(net, i, k);
  if (reach > net.power_max(i)) {
    out = net.power_max(i);
    return true;
  }
  const double below = reach * (1.0 - kReachBelowRel);
  if (below < net.power_min(i)) return false;
  out = below;
  return true;
}

inline bool can_reach(const NetworkConfig& net, std::size_t i, std::size_t k) {
  return reach_power(net, i, k) <= net.power_max(i);
}

}  // namespace detail

inline TwoUserResult two_user_optimum(const NetworkConfig& net, double p_c = 0.5) {
  if (net.size() != 2) throw std::invalid_argument("two_user_optimum needs exactly 2 APs");
  if (p_c != 0.5) throw std::invalid_argument("two_user_optimum is defined at p_c = 1/2");

  struct Candidate {
    PowerProfile profile;
    TwoUserCase label;
  };
  std::vector<Candidate> candidates;

  double q1 = 0.0, q2 = 0.0;
  const bool quiet1 = detail::quiet_ceiling(net, 0, 1, q1);
  const bool quiet2 = detail::quiet_ceiling(net, 1, 0, q2);
  const bool reach1 = detail::can_reach(net, 0, 1);
  const bool reach2 = detail::can_reach(net, 1, 0);

  // CASE 1: the objective is convex or increasing in each coordinate, so
  // the optimum sits on a corner of the quiet rectangle.
  if (quiet1 && quiet2) {
    for (double a : {net.power_min(0), q1}) {
      for (double b : {net.power_min(1), q2}) {
        candidates.push_back({PowerProfile({a, b}), TwoUserCase::NeitherHears});
      }
    }
  }
  if (reach1 && quiet2) {
    candidates.push_back({PowerProfile({net.power_max(0), q2}), TwoUserCase::FirstReachesSecond});
  }
  if (quiet1 && reach2) {
    candidates.push_back({PowerProfile({q1, net.power_max(1)}), TwoUserCase::SecondReachesFirst});
  }
  if (reach1 && reach2) {
    candidates.push_back({PowerProfile({net.power_max(0), net.power_max(1)}), TwoUserCase::Mutual});
  }

  TwoUserResult best;
  bool have = false;
  for (const auto& c : candidates) {
    const double v = objective_value(net, c.profile, p_c, ObjectiveKind::Exact);
    if (!have || v > best.total) {
      best = {c.profile, c.label, v};
      have = true;
    }
  }
  return best;
}

}  // namespace dualpower
