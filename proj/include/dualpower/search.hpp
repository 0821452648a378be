// Coordinate searches over the neighbor-reaching lattice.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualpower/network.hpp"
#include "dualpower/objective.hpp"

namespace dualpower {

struct TraceStep {
  std::size_t round{0};
  std::size_t coordinate{0};
  double level{0.0};
  double total{0.0};
};

struct SearchTrace {
  std::vector<TraceStep> steps;
  PowerProfile best_profile;
  double best_total{0.0};
  PowerProfile final_profile;
  std::size_t rounds{0};
  std::size_t evaluations{0};
  // Annealing chains that reached the stopping rule.
  std::size_t chains{0};
};

inline void write_trace_csv(std::ostream& os, const SearchTrace& trace) {
  os << "round,coordinate,level,total\n";
  os.precision(17);
  for (const auto& s : trace.steps) {
    os << s.round << ',' << s.coordinate << ',' << s.level << ',' << s.total << '\n';
  }
}

// Cooling schedule tau(n) = 1/n with a sweep-level stopping rule. A chain
// stops once a full sweep changes the objective by less than
// stop_threshold; with `restart` set, a fresh chain starts from full power
// until max_rounds rounds have been spent in total.
struct AnnealSchedule {
  double stop_threshold{1e-4};
  // 0 selects 5000 * N.
  std::size_t max_rounds{0};
  bool restart{true};

  double temperature(std::size_t round) const {
    return 1.0 / static_cast<double>(std::max<std::size_t>(round, 1));
  }

  std::size_t rounds_for(std::size_t n_aps) const {
    return max_rounds != 0 ? max_rounds : 5000 * n_aps;
  }
};

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  SearchSpaceTooLarge(double size, double limit)
      : std::runtime_error(message(size, limit)), size_(size) {}
  double size() const { return size_; }

 private:
  static std::string message(double size, double limit) {
    std::ostringstream os;
    os << "threshold space has " << size << " profiles, exceeding the limit of " << limit;
    return os.str();
  }
  double size_;
};

inline constexpr double kExhaustiveLimit = 1e7;

inline void require_surrogate(ObjectiveKind kind) {
  if (kind == ObjectiveKind::Exact) {
    throw std::invalid_argument("lattice searches optimize the LOWER or UPPER surrogate");
  }
}

// Gibbs transition row for one coordinate: probability of moving to each
// level (the current index holds the stay probability). Each alternative is
// proposed with weight 1/(L-1) and accepted with the logistic of the gain.
inline std::vector<double> gibbs_row(std::span<const double> level_totals,
                                     std::size_t current, double tau) {
  const std::size_t count = level_totals.size();
  std::vector<double> row(count, 0.0);
  if (count <= 1) {
    if (count == 1) row[0] = 1.0;
    return row;
  }
  const double norm = static_cast<double>(count - 1);
  const double here = level_totals[current];
  double stay = 0.0;
  for (std::size_t a = 0; a < count; ++a) {
    if (a == current) continue;
    const double accept = 1.0 / (1.0 + std::exp(-(level_totals[a] - here) / tau));
    row[a] = accept / norm;
    stay += (1.0 - accept) / norm;
  }
  row[current] = stay;
  return row;
}

namespace detail {

inline std::size_t index_of(const std::vector<double>& levels, double value) {
  auto it = std::find(levels.begin(), levels.end(), value);
  if (it == levels.end()) {
    throw std::invalid_argument("power level is not part of the threshold space");
  }
  return static_cast<std::size_t>(it - levels.begin());
}

}  // namespace detail

// Cyclic coordinate ascent over a finite lattice. A coordinate moves only
// on strict improvement; among equally good alternatives the lowest level
// wins. Stops after a full sweep without change.
template <class Score, class Eval>
SearchTrace coordinate_ascent(const ThresholdSpace& space, PowerProfile start, Eval&& eval,
                              std::function<double(const Score&)> report) {
  const std::size_t n = space.size();
  SearchTrace trace;
  PowerProfile profile = std::move(start);
  Score current = eval(profile);
  ++trace.evaluations;
  std::size_t unchanged = 0;
  std::size_t round = 0;
  while (unchanged < n) {
    ++round;
    const std::size_t m = (round - 1) % n;
    const double keep = profile[m];
    double best_level = keep;
    Score best = current;
    for (double level : space.levels(m)) {
      if (level == keep) continue;
      profile[m] = level;
      Score s = eval(profile);
      ++trace.evaluations;
      if (best < s) {
        best = s;
        best_level = level;
      }
    }
    profile[m] = best_level;
    if (best_level != keep) {
      current = best;
      unchanged = 0;
    } else {
      ++unchanged;
    }
    trace.steps.push_back({round, m, best_level, report(current)});
  }
  trace.rounds = round;
  trace.best_total = report(current);
  trace.best_profile = profile;
  trace.final_profile = profile;
  return trace;
}

inline SearchTrace greedy(const NetworkConfig& net, double p_c, ObjectiveKind kind) {
  require_surrogate(kind);
  require_rate(p_c);
  const ThresholdSpace space = reach_thresholds(net);
  auto eval = [&](const PowerProfile& p) { return objective_value(net, p, p_c, kind); };
  return coordinate_ascent<double>(space, PowerProfile::max_power(net), eval,
                                   [](const double& s) { return s; });
}

// Annealed Gibbs search; returns the best profile visited.
inline SearchTrace rand_search(const NetworkConfig& net, double p_c, ObjectiveKind kind,
                               std::uint64_t seed, const AnnealSchedule& schedule = {}) {
  require_surrogate(kind);
  require_rate(p_c);
  if (!(schedule.stop_threshold > 0.0)) {
    throw std::invalid_argument("stop threshold must be positive");
  }
  const std::size_t n = net.size();
  const ThresholdSpace space = reach_thresholds(net);
  const std::size_t max_rounds = schedule.rounds_for(n);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SearchTrace trace;
  PowerProfile profile = PowerProfile::max_power(net);
  const double start_total = objective_value(net, profile, p_c, kind);
  double current = start_total;
  ++trace.evaluations;
  trace.best_profile = profile;
  trace.best_total = current;

  double sweep_change = 0.0;
  std::vector<double> totals;
  std::size_t round = 0;
  std::size_t chain_round = 0;
  while (round < max_rounds) {
    ++round;
    ++chain_round;
    const std::size_t m = (chain_round - 1) % n;
    const auto& levels = space.levels(m);
    const double before = current;
    if (levels.size() > 1) {
      const std::size_t here = detail::index_of(levels, profile[m]);
      totals.assign(levels.size(), 0.0);
      for (std::size_t a = 0; a < levels.size(); ++a) {
        if (a == here) {
          totals[a] = current;
          continue;
        }
        profile[m] = levels[a];
        totals[a] = objective_value(net, profile, p_c, kind);
        ++trace.evaluations;
      }
      const auto row = gibbs_row(totals, here, schedule.temperature(chain_round));
      const double u = unit(rng);
      double acc = 0.0;
      std::size_t pick = here;
      for (std::size_t a = 0; a < row.size(); ++a) {
        acc += row[a];
        if (u < acc) {
          pick = a;
          break;
        }
      }
      profile[m] = levels[pick];
      current = totals[pick];
      if (current > trace.best_total) {
        trace.best_total = current;
        trace.best_profile = profile;
      }
    }
    trace.steps.push_back({round, m, profile[m], current});
    sweep_change += std::abs(current - before);
    if (chain_round % n == 0) {
      const bool settled = sweep_change < schedule.stop_threshold;
      sweep_change = 0.0;
      if (settled) {
        ++trace.chains;
        if (!schedule.restart) break;
        profile = PowerProfile::max_power(net);
        current = start_total;
        chain_round = 0;
      }
    }
  }
  trace.rounds = round;
  trace.final_profile = profile;
  return trace;
}

// Calls visit(profile) for every point of the lattice in lexicographic
// order of level indices (first AP varies slowest).
template <class Visit>
void enumerate_lattice(const ThresholdSpace& space, Visit&& visit) {
  const std::size_t n = space.size();
  if (n == 0) return;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> powers(n);
  for (std::size_t i = 0; i < n; ++i) powers[i] = space.levels(i).front();
  PowerProfile profile(powers);
  while (true) {
    visit(static_cast<const PowerProfile&>(profile));
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < space.levels(k).size()) {
        profile[k] = space.levels(k)[idx[k]];
        break;
      }
      idx[k] = 0;
      profile[k] = space.levels(k).front();
      if (k == 0) return;
    }
  }
}

inline SearchTrace exhaustive(const NetworkConfig& net, double p_c, ObjectiveKind kind,
                              double limit = kExhaustiveLimit) {
  require_surrogate(kind);
  require_rate(p_c);
  const ThresholdSpace space = reach_thresholds(net);
  const double size = space.cardinality();
  if (size > limit) throw SearchSpaceTooLarge(size, limit);

  SearchTrace trace;
  bool have = false;
  enumerate_lattice(space, [&](const PowerProfile& p) {
    const double v = objective_value(net, p, p_c, kind);
    ++trace.evaluations;
    if (!have || v > trace.best_total) {
      have = true;
      trace.best_total = v;
      trace.best_profile = p;
      trace.steps.push_back({trace.evaluations, 0, p[0], v});
    }
  });
  trace.rounds = trace.evaluations;
  trace.final_profile = trace.best_profile;
  return trace;
}

}  // namespace dualpower
