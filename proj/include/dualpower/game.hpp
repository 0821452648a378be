// Strategic APs: Nash gaps of the one-shot game, the punishment-phase
// mechanism under perfect monitoring and its threshold-detection variant for
// noisy power observations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dualpower/network.hpp"
#include "dualpower/objective.hpp"
#include "dualpower/stats.hpp"

namespace dualpower {

struct Action {
  double power{0.0};
  double rate{0.0};

  friend bool operator==(const Action&, const Action&) = default;
};

using ActionProfile = std::vector<Action>;

// Rates an AP may deviate to: 0.01, 0.02, ..., 0.99.
inline std::vector<double> rate_grid() {
  std::vector<double> g;
  g.reserve(99);
  for (int k = 1; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

// Per-AP EXACT utility under heterogeneous powers and rates.
inline std::vector<double> stage_utilities(const NetworkConfig& net,
                                           const ActionProfile& actions) {
  std::vector<double> powers(actions.size()), rates(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    powers[i] = actions[i].power;
    rates[i] = actions[i].rate;
  }
  return evaluate(net, PowerProfile(std::move(powers)), AttemptProfile(std::move(rates)),
                  ObjectiveKind::Exact)
      .per_ap;
}

// gap_i = best utility AP i reaches by moving alone within its threshold
// levels, minus its current utility. All gaps <= 0 certifies a
// (lattice-restricted) equilibrium.
inline std::vector<double> nash_gap(const NetworkConfig& net, const PowerProfile& profile,
                                    double p_c) {
  require_rate(p_c);
  require_valid(net, profile);
  const auto space = reach_thresholds(net);
  const auto base = utility_total(net, profile, p_c, ObjectiveKind::Exact).per_ap;
  std::vector<double> gap(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    PowerProfile trial = profile;
    for (double level : space.levels(i)) {
      trial[i] = level;
      best = std::max(best, utility_total(net, trial, p_c, ObjectiveKind::Exact).per_ap[i]);
    }
    gap[i] = best - base[i];
  }
  return gap;
}

// Utility AP i obtains after moving alone to `power`.
inline double unilateral_utility(const NetworkConfig& net, const PowerProfile& profile,
                                 double p_c, std::size_t i, double power) {
  PowerProfile trial = profile;
  trial[i] = power;
  return utility_total(net, trial, p_c, ObjectiveKind::Exact).per_ap[i];
}

struct MechanismParams {
  double discount{0.9};
  std::size_t punish_len{1};
  // Rate of the punished AP i during its own phase.
  std::vector<double> punish_rate_self;
  // (j, i): rate of punisher j during i's phase.
  Matrix punish_rate_others;
  PowerProfile target;
  double p_c{0.5};

  static MechanismParams with_defaults(const NetworkConfig& net, PowerProfile target,
                                       double p_c, double discount, std::size_t punish_len,
                                       double self_rate = 0.9, double others_rate = 0.95) {
    MechanismParams m;
    m.discount = discount;
    m.punish_len = punish_len;
    m.punish_rate_self.assign(net.size(), self_rate);
    m.punish_rate_others = Matrix::Constant(net.size(), net.size(), others_rate);
    m.target = std::move(target);
    m.p_c = p_c;
    return m;
  }
};

inline void validate(const NetworkConfig& net, const MechanismParams& m) {
  const std::size_t n = net.size();
  if (!(m.discount > 0.0 && m.discount < 1.0)) {
    throw std::invalid_argument("discount must lie in (0, 1)");
  }
  if (m.punish_len < 1) throw std::invalid_argument("punishment length must be >= 1");
  require_rate(m.p_c);
  require_valid(net, m.target);
  if (m.punish_rate_self.size() != n ||
      static_cast<std::size_t>(m.punish_rate_others.rows()) != n ||
      static_cast<std::size_t>(m.punish_rate_others.cols()) != n) {
    throw std::invalid_argument("punishment rate shapes do not match AP count");
  }
  auto ok = [](double r) { return r > 0.0 && r <= 1.0; };
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok(m.punish_rate_self[i])) throw std::invalid_argument("punishment rates must lie in (0, 1]");
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !ok(m.punish_rate_others(j, i))) {
        throw std::invalid_argument("punishment rates must lie in (0, 1]");
      }
    }
  }
}

class GameState {
 public:
  static GameState cooperative() { return GameState(); }
  static GameState punishing(std::size_t ap, std::size_t stage) {
    GameState s;
    s.punishing_ = true;
    s.ap_ = ap;
    s.stage_ = stage;
    return s;
  }

  bool is_cooperative() const { return !punishing_; }
  std::size_t target() const { return ap_; }
  std::size_t stage() const { return stage_; }

  std::string label() const {
    if (!punishing_) return "S0";
    return "P" + std::to_string(ap_) + "(" + std::to_string(stage_) + ")";
  }

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  bool punishing_{false};
  std::size_t ap_{0};
  std::size_t stage_{0};
};

// Prescribed action of every AP in a given mechanism state.
inline ActionProfile prescribed_actions(const NetworkConfig& net, const MechanismParams& m,
                                        const GameState& state) {
  ActionProfile a(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (state.is_cooperative()) {
      a[i] = {m.target[i], m.p_c};
    } else {
      const std::size_t k = state.target();
      a[i] = {net.power_max(i), i == k ? m.punish_rate_self[k] : m.punish_rate_others(i, k)};
    }
  }
  return a;
}

// Transition given the set of APs seen deviating this period. Simultaneous
// deviators: the lowest index is punished.
inline GameState mpm_next(const GameState& state, const std::vector<std::size_t>& deviators,
                          std::size_t punish_len) {
  if (!deviators.empty()) {
    return GameState::punishing(*std::min_element(deviators.begin(), deviators.end()), 1);
  }
  if (state.is_cooperative()) return state;
  if (state.stage() >= punish_len) return GameState::cooperative();
  return GameState::punishing(state.target(), state.stage() + 1);
}

inline std::vector<std::size_t> deviators(const ActionProfile& prescribed,
                                          const ActionProfile& actual) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < prescribed.size(); ++i) {
    if (!(prescribed[i] == actual[i])) out.push_back(i);
  }
  return out;
}

// One step of the mechanism under perfect observation of actions.
inline GameState mpm_step(const NetworkConfig& net, const MechanismParams& m,
                          const GameState& state, const ActionProfile& actions) {
  return mpm_next(state, deviators(prescribed_actions(net, m, state), actions), m.punish_len);
}

struct EnforceabilityReport {
  std::vector<double> cooperative;    // U*_i
  std::vector<double> deviation_cap;  // M_i
  std::vector<double> punished;       // U^p_i
  std::vector<double> own_phase_cap;  // M'_i
  std::vector<bool> a1, a2, a3;
  // Exact one-step check for AP i deviating in its own punishment phase.
  std::vector<bool> own_phase_ok;
  // (U*_i - M_i) + (U*_i - U^p_i) (delta - delta^{L+1}) / (1 - delta) at the
  // configured L.
  std::vector<double> margin;
  bool s0_ok{false};
  bool enforceable{false};
  std::optional<std::size_t> violating_ap;
  std::optional<std::size_t> min_punish_len;
};

// (delta - delta^{L+1}) / (1 - delta) = delta + ... + delta^L.
inline double punishment_weight(double delta, std::size_t len) {
  return (delta - std::pow(delta, static_cast<double>(len) + 1.0)) / (1.0 - delta);
}

inline EnforceabilityReport mpm_enforceability(const NetworkConfig& net,
                                               const MechanismParams& m,
                                               std::size_t max_len = 1000) {
  validate(net, m);
  const std::size_t n = net.size();
  const auto grid = rate_grid();
  const auto space = reach_thresholds(net);
  const ActionProfile coop = prescribed_actions(net, m, GameState::cooperative());
  const auto u_star = stage_utilities(net, coop);

  EnforceabilityReport r;
  r.cooperative = u_star;
  r.deviation_cap.resize(n);
  r.punished.resize(n);
  r.own_phase_cap.resize(n);
  r.a1.assign(n, false);
  r.a2.assign(n, false);
  r.a3.assign(n, false);
  r.own_phase_ok.assign(n, false);
  r.margin.resize(n);

  ActionProfile all_max_fair(n);
  for (std::size_t i = 0; i < n; ++i) all_max_fair[i] = {net.power_max(i), m.p_c};
  const auto u_max_fair = stage_utilities(net, all_max_fair);

  std::vector<std::vector<double>> phase_util(n);
  for (std::size_t k = 0; k < n; ++k) {
    phase_util[k] = stage_utilities(net, prescribed_actions(net, m, GameState::punishing(k, 1)));
  }

  const double delta = m.discount;
  const double tail = std::pow(delta, static_cast<double>(m.punish_len));
  for (std::size_t i = 0; i < n; ++i) {
    double cap = u_star[i];
    ActionProfile trial = coop;
    std::vector<double> powers = space.levels(i);
    powers.push_back(m.target[i]);
    std::vector<double> rates = grid;
    rates.push_back(m.p_c);
    for (double p : powers) {
      for (double q : rates) {
        trial[i] = {p, q};
        cap = std::max(cap, stage_utilities(net, trial)[i]);
      }
    }
    r.deviation_cap[i] = cap;

    r.punished[i] = phase_util[i][i];
    r.a1[i] = r.punished[i] < u_star[i];
    bool prefers_others = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i && phase_util[k][i] < r.punished[i]) prefers_others = false;
    }
    r.a2[i] = prefers_others;

    ActionProfile own = prescribed_actions(net, m, GameState::punishing(i, 1));
    own[i].rate = 1.0;
    const double full_rate = stage_utilities(net, own)[i];
    r.a3[i] = full_rate - r.punished[i] < u_max_fair[i] - r.punished[i];

    double own_cap = std::max(full_rate, r.punished[i]);
    for (double q : grid) {
      own[i].rate = q;
      own_cap = std::max(own_cap, stage_utilities(net, own)[i]);
    }
    r.own_phase_cap[i] = own_cap;
    r.own_phase_ok[i] = r.punished[i] * (1.0 - tail) + tail * u_star[i] >= own_cap;

    r.margin[i] = (u_star[i] - cap) +
                  (u_star[i] - r.punished[i]) * punishment_weight(delta, m.punish_len);
    if (!r.a1[i] && !r.violating_ap) r.violating_ap = i;
  }

  auto holds_at = [&](std::size_t len) {
    const double w = punishment_weight(delta, len);
    for (std::size_t i = 0; i < n; ++i) {
      if ((u_star[i] - r.punished[i]) * w < r.deviation_cap[i] - u_star[i]) return false;
    }
    return true;
  };
  r.s0_ok = holds_at(m.punish_len);
  const bool restrictions = std::all_of(r.a1.begin(), r.a1.end(), [](bool b) { return b; }) &&
                            std::all_of(r.a2.begin(), r.a2.end(), [](bool b) { return b; }) &&
                            std::all_of(r.a3.begin(), r.a3.end(), [](bool b) { return b; });
  r.enforceable = restrictions && r.s0_ok;
  if (!r.violating_ap) {
    for (std::size_t len = 1; len <= max_len; ++len) {
      if (holds_at(len)) {
        r.min_punish_len = len;
        break;
      }
    }
  }
  return r;
}

// Receiver-side Gaussian noise on observed received power.
struct NoiseModel {
  std::vector<double> sigma;
  Matrix correlation;

  NoiseModel(std::vector<double> s, Matrix corr) : sigma(std::move(s)), correlation(std::move(corr)) {
    const std::size_t n = sigma.size();
    if (static_cast<std::size_t>(correlation.rows()) != n ||
        static_cast<std::size_t>(correlation.cols()) != n) {
      throw std::invalid_argument("correlation matrix must be N x N");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::isfinite(sigma[i]) && sigma[i] > 0.0)) {
        throw std::invalid_argument("noise sigma must be positive");
      }
      if (correlation(i, i) != 1.0) throw std::invalid_argument("correlation diagonal must be 1");
      for (std::size_t j = 0; j < n; ++j) {
        const double r = correlation(i, j);
        if (!(r >= -1.0 && r <= 1.0) || r != correlation(j, i)) {
          throw std::invalid_argument("correlation must be symmetric with entries in [-1, 1]");
        }
      }
    }
  }

  static NoiseModel independent(std::vector<double> s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    return NoiseModel(std::move(s), Matrix::Identity(n, n));
  }

  static NoiseModel uniform(std::size_t n, double s, double rho) {
    Matrix c = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), rho);
    c.diagonal().setOnes();
    return NoiseModel(std::vector<double>(n, s), c);
  }

  std::size_t size() const { return sigma.size(); }

  // Factor A with A A^T = D R D (D = diag(sigma)); negative eigenvalues of R
  // are clipped to 1e-12.
  Matrix factor() const {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(correlation);
    Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(1e-12).cwiseSqrt();
    Matrix a = eig.eigenvectors() * lambda.asDiagonal();
    for (std::size_t i = 0; i < size(); ++i) a.row(static_cast<Eigen::Index>(i)) *= sigma[i];
    return a;
  }
};

struct DetectionConfig {
  std::vector<double> epsilon;

  explicit DetectionConfig(std::vector<double> e) : epsilon(std::move(e)) {
    for (double x : epsilon) {
      if (!(std::isfinite(x) && x >= 0.0)) {
        throw std::invalid_argument("detection thresholds must be non-negative");
      }
    }
  }
};

struct DetectionProbs {
  double no_detect{0.0};
  double detect{0.0};
};

// Observer i watching transmitter j: flag probability when the true received
// power is displaced by `shift` from the expected value.
inline DetectionProbs mim_detection_probs(const NoiseModel& noise, const DetectionConfig& det,
                                          std::size_t i, std::size_t j, double shift) {
  if (i >= noise.size() || j >= noise.size()) throw std::out_of_range("AP index out of range");
  if (!(shift >= 0.0)) throw std::invalid_argument("shift must be non-negative");
  const double s = noise.sigma[i];
  const double eps = det.epsilon[i];
  const double inside =
      stats::normal_cdf((eps + shift) / s) + stats::normal_cdf((eps - shift) / s) - 1.0;
  return {inside, 1.0 - inside};
}

// Sufficient condition for positively correlated detection events between
// observers i and j, on standardized thresholds.
inline bool mim_correlation_ok(const NoiseModel& noise, const DetectionConfig& det,
                               std::size_t i, std::size_t j) {
  const double rho = noise.correlation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::domain_error("correlation must lie in [0, 1)");
  }
  const double ei = det.epsilon[i] / noise.sigma[i];
  const double ej = det.epsilon[j] / noise.sigma[j];
  const double scale = std::sqrt(1.0 - rho * rho);
  const double root = std::sqrt(rho);
  if (ei == ej) {
    return stats::normal_cdf(ei * (1.0 - root) / scale) > 0.75;
  }
  return stats::normal_cdf((ei - root * ej) / scale) +
             stats::normal_cdf((ei + root * ej) / scale) >
         1.5;
}

// P(observer i flags | observer j flags) for a compliant transmitter, from
// the bivariate normal by Simpson quadrature.
inline double mim_conditional_detection(const NoiseModel& noise, const DetectionConfig& det,
                                        std::size_t i, std::size_t j) {
  const double rho = noise.correlation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  const double a = det.epsilon[i] / noise.sigma[i];
  const double b = det.epsilon[j] / noise.sigma[j];
  const double in_a = 2.0 * stats::normal_cdf(a) - 1.0;
  const double in_b = 2.0 * stats::normal_cdf(b) - 1.0;
  double both_in = 0.0;
  if (rho >= 1.0 - 1e-14) {
    both_in = 2.0 * stats::normal_cdf(std::min(a, b)) - 1.0;
  } else if (a > 0.0) {
    const double s = std::sqrt(1.0 - rho * rho);
    const int intervals = 4000;
    const double h = 2.0 * a / intervals;
    auto f = [&](double x) {
      return stats::normal_pdf(x) *
             (stats::normal_cdf((b - rho * x) / s) - stats::normal_cdf((-b - rho * x) / s));
    };
    double acc = f(-a) + f(a);
    for (int k = 1; k < intervals; ++k) {
      acc += f(-a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    both_in = acc * h / 3.0;
  }
  const double flag_j = 1.0 - in_b;
  if (flag_j <= 0.0) return 0.0;
  const double both_flag = 1.0 - in_a - in_b + both_in;
  return both_flag / flag_j;
}

struct ImperfectMonitoring {
  NoiseModel noise;
  DetectionConfig detection;
};

// Action rule of one AP: (period, state, ap, prescribed action) -> action.
using Policy = std::function<Action(std::size_t, const GameState&, std::size_t, const Action&)>;

inline Policy compliant_policy() {
  return [](std::size_t, const GameState&, std::size_t, const Action& prescribed) {
    return prescribed;
  };
}

// Plays `deviation` once at `period`, complies otherwise.
inline Policy one_shot_policy(std::size_t period, Action deviation) {
  return [period, deviation](std::size_t t, const GameState&, std::size_t, const Action& prescribed) {
    return t == period ? deviation : prescribed;
  };
}

struct PeriodRecord {
  std::size_t period{0};
  GameState state;
  std::vector<std::size_t> flagged;
  std::vector<double> utility;
};

struct SimulationResult {
  std::vector<double> discounted;
  std::vector<PeriodRecord> history;
  std::size_t punishment_periods{0};
  // Observation counts of compliant (observer, transmitter) pairs and how
  // many of them raised a flag.
  std::size_t observations{0};
  std::size_t flags{0};

  double social() const {
    double s = 0.0;
    for (double d : discounted) s += d;
    return s;
  }
};

inline void write_history_csv(std::ostream& os, const SimulationResult& r) {
  os << "period,state,flags,utility\n";
  os.precision(12);
  for (const auto& rec : r.history) {
    os << rec.period << ',' << rec.state.label() << ',';
    for (std::size_t k = 0; k < rec.flagged.size(); ++k) os << (k ? ";" : "") << rec.flagged[k];
    os << ',';
    for (std::size_t k = 0; k < rec.utility.size(); ++k) os << (k ? ";" : "") << rec.utility[k];
    os << '\n';
  }
}

// Plays the mechanism for `horizon` periods. With `monitoring` unset every
// deviation in power or rate is observed; otherwise each observer sees the
// received power of every transmitter it expects within carrier-sense range
// plus its own noise sample and flags deviations larger than its threshold.
// Rates are unobservable in that mode.
inline SimulationResult simulate_repeated(const NetworkConfig& net, const MechanismParams& m,
                                          const std::vector<Policy>& policies,
                                          std::size_t horizon, std::uint64_t seed,
                                          const std::optional<ImperfectMonitoring>& monitoring = {},
                                          bool record_history = true) {
  validate(net, m);
  const std::size_t n = net.size();
  if (policies.size() != n) throw std::invalid_argument("need one policy per AP");
  if (monitoring && (monitoring->noise.size() != n || monitoring->detection.epsilon.size() != n)) {
    throw std::invalid_argument("noise model and thresholds must cover every AP");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix factor;
  if (monitoring) factor = monitoring->noise.factor();
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));

  SimulationResult out;
  out.discounted.assign(n, 0.0);
  GameState state = GameState::cooperative();
  double weight = 1.0;
  ActionProfile actions(n);
  for (std::size_t t = 0; t < horizon; ++t) {
    const ActionProfile expected = prescribed_actions(net, m, state);
    for (std::size_t i = 0; i < n; ++i) actions[i] = policies[i](t, state, i, expected[i]);
    const auto u = stage_utilities(net, actions);
    for (std::size_t i = 0; i < n; ++i) out.discounted[i] += weight * u[i];
    weight *= m.discount;
    if (!state.is_cooperative()) ++out.punishment_periods;

    std::vector<std::size_t> flagged;
    if (!monitoring) {
      flagged = deviators(expected, actions);
    } else {
      const auto& eps = monitoring->detection.epsilon;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) z(static_cast<Eigen::Index>(k)) = gauss(rng);
        const Eigen::VectorXd noise = factor * z;
        bool hit = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == j) continue;
          const double h = net.gain(j, i);
          const double want = expected[j].power * h;
          if (want < net.cs_threshold(i)) continue;
          const double seen = actions[j].power * h + noise(static_cast<Eigen::Index>(i));
          const bool flag = std::abs(seen - want) > eps[i];
          if (expected[j].power == actions[j].power) {
            ++out.observations;
            if (flag) ++out.flags;
          }
          hit = hit || flag;
        }
        if (hit) flagged.push_back(j);
      }
    }
    if (record_history) out.history.push_back({t, state, flagged, u});
    state = mpm_next(state, flagged, m.punish_len);
  }
  return out;
}

struct MimComparison {
  std::vector<double> threshold_social;
  std::vector<double> naive_social;
  double threshold_mean{0.0};
  double naive_mean{0.0};
  double mean_diff{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  double t_stat{0.0};
  // One-sided paired t-test at the 95% level that threshold detection wins.
  bool significant{false};
};

// Paired comparison of threshold detection against zero-tolerance detection
// applied to the same noisy observations, all agents compliant.
inline MimComparison compare_mim_mpm(const NetworkConfig& net, const MechanismParams& m,
                                     const NoiseModel& noise, const DetectionConfig& det,
                                     std::size_t horizon, const std::vector<std::uint64_t>& seeds) {
  const std::vector<Policy> policies(net.size(), compliant_policy());
  const DetectionConfig zero(std::vector<double>(net.size(), 0.0));
  MimComparison c;
  std::vector<double> diffs;
  for (auto seed : seeds) {
    const auto a = simulate_repeated(net, m, policies, horizon, seed,
                                     ImperfectMonitoring{noise, det}, false);
    const auto b = simulate_repeated(net, m, policies, horizon, seed,
                                     ImperfectMonitoring{noise, zero}, false);
    c.threshold_social.push_back(a.social());
    c.naive_social.push_back(b.social());
    diffs.push_back(a.social() - b.social());
  }
  c.threshold_mean = stats::mean_sd(c.threshold_social).mean;
  c.naive_mean = stats::mean_sd(c.naive_social).mean;
  const auto d = stats::mean_sd(diffs);
  c.mean_diff = d.mean;
  if (diffs.size() >= 2) {
    const double dof = static_cast<double>(diffs.size() - 1);
    const double se = d.sd / std::sqrt(static_cast<double>(diffs.size()));
    const double half = stats::student_t_quantile(0.975, dof) * se;
    c.ci_low = d.mean - half;
    c.ci_high = d.mean + half;
    if (se > 0.0) {
      c.t_stat = d.mean / se;
      c.significant = c.t_stat > stats::student_t_quantile(0.95, dof);
    } else {
      c.t_stat = d.mean > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      c.significant = d.mean > 0.0;
    }
  } else {
    c.ci_low = c.ci_high = d.mean;
  }
  return c;
}

}  // namespace dualpower
