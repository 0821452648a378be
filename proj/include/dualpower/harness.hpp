// Topology generation and method sweeps producing CSV result tables.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualpower/baselines.hpp"
#include "dualpower/network.hpp"
#include "dualpower/objective.hpp"
#include "dualpower/search.hpp"

namespace dualpower {

struct TopologyOptions {
  double noise_floor{1.0};
  // Calibrated so the default 10-AP layout (side 10, seed 1) has a mean
  // contention order of 3.2 at full power (0.2 gives 4.0, 0.1 gives 5.2).
  double cs_threshold{0.3};
  double power_min{1.0};
  double power_max{15.0};
  double exponent{3.0};
  double reference_gain{1.0};
};

inline constexpr std::size_t kDefaultAps = 10;
inline constexpr double kDefaultSide = 10.0;

struct GeneratedTopology {
  NetworkConfig config;
  std::vector<Point> positions;
  std::uint64_t seed{0};
};

// APs i.i.d. uniform on a side x side square.
inline GeneratedTopology gen_topology(std::size_t n, double side, std::uint64_t seed,
                                      const TopologyOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("need at least one AP");
  if (!(side > 0.0)) throw std::invalid_argument("square side must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, side);
  std::vector<Point> pos(n);
  for (auto& p : pos) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  NetworkConfig cfg(opt.noise_floor, std::vector<double>(n, opt.cs_threshold),
                    std::vector<double>(n, opt.power_min), std::vector<double>(n, opt.power_max),
                    build_gains(pos, opt.exponent, opt.reference_gain));
  return {std::move(cfg), std::move(pos), seed};
}

enum class Method { MaxPower, GreedyPL, GreedyPU, RandPL, RandPU, Rand, Exhaustive, Rpphy, Rpmac };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::MaxPower: return "MAX_POWER";
    case Method::GreedyPL: return "GREEDY_PL";
    case Method::GreedyPU: return "GREEDY_PU";
    case Method::RandPL: return "RAND_PL";
    case Method::RandPU: return "RAND_PU";
    case Method::Rand: return "RAND";
    case Method::Exhaustive: return "EXHAUSTIVE";
    case Method::Rpphy: return "RPPHY";
    case Method::Rpmac: return "RPMAC";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::MaxPower, Method::GreedyPL, Method::GreedyPU, Method::RandPL,
                   Method::RandPU, Method::Rand, Method::Exhaustive, Method::Rpphy, Method::Rpmac}) {
    if (method_name(m) == s) return m;
  }
  throw std::invalid_argument("unknown method '" + s + "'");
}

struct ExperimentPlan {
  // Either an explicit network or generated ones, one per seed.
  std::optional<NetworkConfig> topology;
  std::vector<std::uint64_t> topology_seeds{1};
  std::size_t n_aps{kDefaultAps};
  double side{kDefaultSide};
  TopologyOptions options{};
  std::vector<double> p_c{0.6};
  std::vector<Method> methods{Method::MaxPower, Method::GreedyPL, Method::GreedyPU, Method::Rand};
  std::vector<double> snr0{1.0};
  std::uint64_t search_seed{1};
  AnnealSchedule schedule{};

  void validate() const {
    if (p_c.empty()) throw std::invalid_argument("plan needs at least one attempt rate");
    if (methods.empty()) throw std::invalid_argument("plan needs at least one method");
    if (!topology && topology_seeds.empty()) throw std::invalid_argument("plan needs a topology");
    for (double p : p_c) require_rate(p);
  }
};

struct ResultRow {
  std::uint64_t topology_seed{0};
  double p_c{0.0};
  std::string method;
  std::string status{"ok"};
  double total_exact{std::numeric_limits<double>::quiet_NaN()};
  double total_surrogate{std::numeric_limits<double>::quiet_NaN()};
  std::vector<double> power;
  std::vector<double> utility;
  std::size_t total_order{0};
};

namespace detail {

struct MethodOutcome {
  PowerProfile profile;
  double surrogate{std::numeric_limits<double>::quiet_NaN()};
};

// Of the PL and PU candidates keep the one with the better exact total.
inline MethodOutcome better_exact(const NetworkConfig& net, double p_c, const SearchTrace& lower,
                                  const SearchTrace& upper) {
  const double el = objective_value(net, lower.best_profile, p_c, ObjectiveKind::Exact);
  const double eu = objective_value(net, upper.best_profile, p_c, ObjectiveKind::Exact);
  if (eu > el) return {upper.best_profile, upper.best_total};
  return {lower.best_profile, lower.best_total};
}

inline std::uint64_t cell_seed(std::uint64_t base, std::uint64_t topo, double p_c) {
  std::uint64_t h = base * 0x9E3779B97F4A7C15ull;
  h ^= topo + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(std::llround(p_c * 1e6)) + (h << 6) + (h >> 2);
  return h;
}

}  // namespace detail

inline ResultRow evaluate_row(const NetworkConfig& net, std::uint64_t seed, double p_c,
                              std::string method, const PowerProfile& profile, double surrogate) {
  require_valid(net, profile);
  const auto exact = utility_total(net, profile, p_c, ObjectiveKind::Exact);
  ResultRow row;
  row.topology_seed = seed;
  row.p_c = p_c;
  row.method = std::move(method);
  row.total_exact = exact.total;
  row.total_surrogate = surrogate;
  row.power = profile.values();
  row.utility = exact.per_ap;
  row.total_order = contention_view(net, profile).total_order();
  return row;
}

inline std::vector<ResultRow> run_cell(const NetworkConfig& net, std::uint64_t topo_seed,
                                       double p_c, Method method, const ExperimentPlan& plan) {
  const std::uint64_t seed = detail::cell_seed(plan.search_seed, topo_seed, p_c);
  const std::string name = method_name(method);
  auto failed = [&](std::string label, std::string status) {
    ResultRow r;
    r.topology_seed = topo_seed;
    r.p_c = p_c;
    r.method = std::move(label);
    r.status = std::move(status);
    return r;
  };
  switch (method) {
    case Method::MaxPower:
      return {evaluate_row(net, topo_seed, p_c, name, PowerProfile::max_power(net),
                           std::numeric_limits<double>::quiet_NaN())};
    case Method::GreedyPL:
    case Method::GreedyPU: {
      const auto kind = method == Method::GreedyPL ? ObjectiveKind::Lower : ObjectiveKind::Upper;
      const auto t = greedy(net, p_c, kind);
      return {evaluate_row(net, topo_seed, p_c, name, t.best_profile, t.best_total)};
    }
    case Method::RandPL:
    case Method::RandPU: {
      const auto kind = method == Method::RandPL ? ObjectiveKind::Lower : ObjectiveKind::Upper;
      const auto t = rand_search(net, p_c, kind, seed, plan.schedule);
      return {evaluate_row(net, topo_seed, p_c, name, t.best_profile, t.best_total)};
    }
    case Method::Rand: {
      const auto lo = rand_search(net, p_c, ObjectiveKind::Lower, seed, plan.schedule);
      const auto up = rand_search(net, p_c, ObjectiveKind::Upper, seed, plan.schedule);
      const auto pick = detail::better_exact(net, p_c, lo, up);
      return {evaluate_row(net, topo_seed, p_c, name, pick.profile, pick.surrogate)};
    }
    case Method::Exhaustive: {
      try {
        const auto lo = exhaustive(net, p_c, ObjectiveKind::Lower);
        const auto up = exhaustive(net, p_c, ObjectiveKind::Upper);
        const auto pick = detail::better_exact(net, p_c, lo, up);
        return {evaluate_row(net, topo_seed, p_c, name, pick.profile, pick.surrogate)};
      } catch (const SearchSpaceTooLarge&) {
        return {failed(name, "space_too_large")};
      }
    }
    case Method::Rpphy:
      return {evaluate_row(net, topo_seed, p_c, name, solve_rpphy(net),
                           std::numeric_limits<double>::quiet_NaN())};
    case Method::Rpmac: {
      std::vector<ResultRow> rows;
      for (double snr : plan.snr0) {
        std::ostringstream label;
        label << name << '@' << snr;
        try {
          const auto sol = solve_rpmac(net, p_c, RpmacConstraint(snr));
          rows.push_back(evaluate_row(net, topo_seed, p_c, label.str(), sol.profile,
                                      std::numeric_limits<double>::quiet_NaN()));
        } catch (const RpmacInfeasible&) {
          rows.push_back(failed(label.str(), "infeasible"));
        }
      }
      return rows;
    }
  }
  return {};
}

// Rows ordered by topology, then attempt rate, then method list order.
inline std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<ResultRow> rows;
  auto run_on = [&](const NetworkConfig& net, std::uint64_t topo_seed) {
    std::vector<double> grid = plan.p_c;
    std::sort(grid.begin(), grid.end());
    for (double p_c : grid) {
      for (Method m : plan.methods) {
        auto cell = run_cell(net, topo_seed, p_c, m, plan);
        rows.insert(rows.end(), cell.begin(), cell.end());
      }
    }
  };
  if (plan.topology) {
    run_on(*plan.topology, plan.topology_seeds.empty() ? 0 : plan.topology_seeds.front());
  } else {
    for (auto seed : plan.topology_seeds) {
      run_on(gen_topology(plan.n_aps, plan.side, seed, plan.options).config, seed);
    }
  }
  return rows;
}

namespace detail {

inline void write_number(std::ostream& os, double v) {
  if (std::isnan(v)) return;
  os << v;
}

inline void write_packed(std::ostream& os, const std::vector<double>& v) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) os << ';';
    os << v[k];
  }
}

}  // namespace detail

inline void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(10);
  os << "topology_seed,p_c,method,status,total_exact,total_surrogate,per_ap_power,per_ap_utility,"
        "total_order\n";
  for (const auto& r : rows) {
    os << r.topology_seed << ',' << r.p_c << ',' << r.method << ',' << r.status << ',';
    detail::write_number(os, r.total_exact);
    os << ',';
    detail::write_number(os, r.total_surrogate);
    os << ',';
    detail::write_packed(os, r.power);
    os << ',';
    detail::write_packed(os, r.utility);
    os << ',';
    if (r.status == "ok") os << r.total_order;
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace dualpower
