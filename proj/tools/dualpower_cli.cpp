// Command-line front end: topology generation, optimizers, baselines, the
// repeated-game mechanisms and method sweeps.
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dualpower/baselines.hpp"
#include "dualpower/game.hpp"
#include "dualpower/harness.hpp"
#include "dualpower/io.hpp"
#include "dualpower/search.hpp"

namespace dp = dualpower;

namespace {

struct Common {
  std::string topology;
  std::vector<double> pc{0.6};
  std::uint64_t seed{1};
  std::vector<std::string> methods;
  std::vector<double> snr0{1.0};
  std::string out;
  std::size_t n_aps{dp::kDefaultAps};
  double side{dp::kDefaultSide};
  double cs{dp::TopologyOptions{}.cs_threshold};
};

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

dp::TopologyOptions options_of(const Common& c) {
  dp::TopologyOptions o;
  o.cs_threshold = c.cs;
  return o;
}

dp::NetworkConfig network_of(const Common& c) {
  if (!c.topology.empty()) return dp::io::load_topology(c.topology).config;
  return dp::gen_topology(c.n_aps, c.side, c.seed, options_of(c)).config;
}

void add_topology_flags(CLI::App* app, Common& c) {
  app->add_option("--topology", c.topology, "topology JSON file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "topology seed when no file is given, and search seed");
  app->add_option("--aps", c.n_aps, "generated AP count")->check(CLI::PositiveNumber);
  app->add_option("--side", c.side, "generated square side")->check(CLI::PositiveNumber);
  app->add_option("--cs", c.cs, "generated carrier-sense threshold")->check(CLI::PositiveNumber);
}

void add_pc(CLI::App* app, Common& c) {
  app->add_option("--pc", c.pc, "attempt rates, comma separated")->delimiter(',');
}

dp::ExperimentPlan plan_of(const Common& c, std::vector<dp::Method> defaults) {
  dp::ExperimentPlan plan;
  if (!c.topology.empty()) plan.topology = dp::io::load_topology(c.topology).config;
  plan.topology_seeds = {c.seed};
  plan.n_aps = c.n_aps;
  plan.side = c.side;
  plan.options = options_of(c);
  plan.p_c = c.pc;
  plan.snr0 = c.snr0;
  plan.search_seed = c.seed;
  plan.methods.clear();
  for (const auto& m : c.methods) plan.methods.push_back(dp::parse_method(m));
  if (plan.methods.empty()) plan.methods = std::move(defaults);
  return plan;
}

void print_report(std::ostream& os, const dp::EnforceabilityReport& r) {
  os << "ap,cooperative,deviation_cap,punished,a1,a2,a3,own_phase_ok,margin\n";
  for (std::size_t i = 0; i < r.cooperative.size(); ++i) {
    os << i << ',' << r.cooperative[i] << ',' << r.deviation_cap[i] << ',' << r.punished[i] << ','
       << r.a1[i] << ',' << r.a2[i] << ',' << r.a3[i] << ',' << r.own_phase_ok[i] << ','
       << r.margin[i] << '\n';
  }
  os << "# enforceable=" << r.enforceable << " s0_ok=" << r.s0_ok;
  if (r.min_punish_len) os << " min_punish_len=" << *r.min_punish_len;
  if (r.violating_ap) os << " violating_ap=" << *r.violating_ap;
  os << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint PHY/MAC transmit power optimization for CSMA/CA access points"};
  app.require_subcommand(1);
  Common c;

  // gen-topology
  auto* gen = app.add_subcommand("gen-topology", "generate a uniform random topology as JSON");
  gen->add_option("--seed", c.seed, "placement seed");
  gen->add_option("--aps", c.n_aps, "AP count")->check(CLI::PositiveNumber);
  gen->add_option("--side", c.side, "square side")->check(CLI::PositiveNumber);
  gen->add_option("--cs", c.cs, "carrier-sense threshold")->check(CLI::PositiveNumber);
  gen->add_option("--out", c.out, "output JSON path");

  // optimize
  std::string trace_path;
  auto* opt = app.add_subcommand("optimize", "run power optimizers and report EXACT utility");
  add_topology_flags(opt, c);
  add_pc(opt, c);
  opt->add_option("--method", c.methods, "methods, comma separated")->delimiter(',');
  opt->add_option("--trace", trace_path, "search trace CSV (single RAND_*/GREEDY_* method)");
  opt->add_option("--out", c.out, "result CSV path");

  auto* phy = app.add_subcommand("baseline-phy", "relaxed PHY-only power allocation");
  add_topology_flags(phy, c);
  add_pc(phy, c);
  phy->add_option("--out", c.out, "result CSV path");

  auto* mac = app.add_subcommand("baseline-mac", "SNR-constrained contention minimization");
  add_topology_flags(mac, c);
  add_pc(mac, c);
  mac->add_option("--snr0", c.snr0, "SNR floors, comma separated")->delimiter(',');
  mac->add_option("--out", c.out, "result CSV path");

  // game-mpm / game-mim
  std::string mechanism_path;
  long deviate_ap = -1;
  std::size_t deviate_at = 0;
  double deviate_power = -1.0, deviate_rate = -1.0;
  auto add_game = [&](CLI::App* g) {
    add_topology_flags(g, c);
    g->add_option("--mechanism", mechanism_path, "mechanism JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    g->add_option("--deviate-ap", deviate_ap, "AP that deviates once (default: none)");
    g->add_option("--deviate-at", deviate_at, "period of the deviation");
    g->add_option("--deviate-power", deviate_power, "deviation power (default: max)");
    g->add_option("--deviate-rate", deviate_rate, "deviation rate (default: 0.99)");
    g->add_option("--out", c.out, "simulation CSV path");
  };
  auto* mpm = app.add_subcommand("game-mpm", "punishment mechanism under perfect monitoring");
  add_game(mpm);
  auto* mim = app.add_subcommand("game-mim", "punishment mechanism with threshold detection");
  add_game(mim);

  // sweep
  std::size_t topologies = 1;
  auto* sweep = app.add_subcommand("sweep", "methods x attempt rates x seeded topologies");
  add_topology_flags(sweep, c);
  add_pc(sweep, c);
  sweep->add_option("--method", c.methods, "methods, comma separated")->delimiter(',');
  sweep->add_option("--snr0", c.snr0, "SNR floors for RPMAC")->delimiter(',');
  sweep->add_option("--topologies", topologies, "number of seeded topologies from --seed")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", c.out, "result CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto t = dp::gen_topology(c.n_aps, c.side, c.seed, options_of(c));
      const dp::TopologyOptions o = options_of(c);
      Sink sink(c.out);
      sink.os() << dp::io::topology_to_json(t.config, t.positions,
                                            std::make_pair(o.exponent, o.reference_gain))
                       .dump(2)
                << '\n';
      for (auto i : dp::stand_alone_aps(t.config)) {
        std::cerr << "warning: AP " << i << " cannot reach any other AP\n";
      }
      return 0;
    }
    if (*opt) {
      auto plan = plan_of(c, {dp::Method::MaxPower, dp::Method::GreedyPL, dp::Method::GreedyPU,
                              dp::Method::Rand});
      if (!trace_path.empty()) {
        if (plan.methods.size() != 1 || plan.p_c.size() != 1) {
          throw std::invalid_argument("--trace needs exactly one method and one attempt rate");
        }
        const auto net = network_of(c);
        const auto m = plan.methods.front();
        const auto kind = (m == dp::Method::GreedyPL || m == dp::Method::RandPL)
                              ? dp::ObjectiveKind::Lower
                              : dp::ObjectiveKind::Upper;
        dp::SearchTrace t;
        if (m == dp::Method::GreedyPL || m == dp::Method::GreedyPU) {
          t = dp::greedy(net, plan.p_c.front(), kind);
        } else if (m == dp::Method::RandPL || m == dp::Method::RandPU) {
          t = dp::rand_search(net, plan.p_c.front(), kind, c.seed, plan.schedule);
        } else {
          throw std::invalid_argument("--trace supports GREEDY_PL, GREEDY_PU, RAND_PL, RAND_PU");
        }
        std::ofstream tf(trace_path);
        if (!tf) throw std::runtime_error("cannot write " + trace_path);
        dp::write_trace_csv(tf, t);
      }
      Sink sink(c.out);
      dp::write_rows_csv(sink.os(), dp::run_plan(plan));
      return 0;
    }
    if (*phy) {
      c.methods = {"MAX_POWER", "RPPHY"};
      Sink sink(c.out);
      dp::write_rows_csv(sink.os(), dp::run_plan(plan_of(c, {})));
      return 0;
    }
    if (*mac) {
      c.methods = {"RPMAC"};
      Sink sink(c.out);
      dp::write_rows_csv(sink.os(), dp::run_plan(plan_of(c, {})));
      return 0;
    }
    if (*mpm || *mim) {
      const auto net = network_of(c);
      const auto mech = dp::io::mechanism_from_json(dp::io::read_json(mechanism_path), net);
      std::optional<dp::ImperfectMonitoring> monitoring;
      if (*mim) {
        if (!mech.noise || !mech.detection) {
          throw std::invalid_argument("game-mim needs 'noise' and 'detection' in the mechanism file");
        }
        monitoring = dp::ImperfectMonitoring{*mech.noise, *mech.detection};
      }
      print_report(std::cerr, dp::mpm_enforceability(net, mech.params));

      std::vector<dp::Policy> policies(net.size(), dp::compliant_policy());
      if (deviate_ap >= 0) {
        const auto i = static_cast<std::size_t>(deviate_ap);
        if (i >= net.size()) throw std::invalid_argument("--deviate-ap out of range");
        dp::Action a{deviate_power < 0 ? net.power_max(i) : deviate_power,
                     deviate_rate < 0 ? 0.99 : deviate_rate};
        policies[i] = dp::one_shot_policy(deviate_at, a);
      }
      const auto seed = mech.seeds.empty() ? c.seed : mech.seeds.front();
      const auto res = dp::simulate_repeated(net, mech.params, policies, mech.horizon, seed, monitoring);
      std::cerr << "# discounted";
      for (double d : res.discounted) std::cerr << ' ' << d;
      std::cerr << " social=" << res.social() << " punishment_periods=" << res.punishment_periods
                << '\n';
      if (*mim && mech.seeds.size() >= 2) {
        const auto cmp = dp::compare_mim_mpm(net, mech.params, *mech.noise, *mech.detection,
                                             mech.horizon, mech.seeds);
        std::cerr << "# threshold_mean=" << cmp.threshold_mean << " naive_mean=" << cmp.naive_mean
                  << " diff=" << cmp.mean_diff << " ci=[" << cmp.ci_low << ", " << cmp.ci_high
                  << "] significant=" << cmp.significant << '\n';
      }
      Sink sink(c.out);
      dp::write_history_csv(sink.os(), res);
      return 0;
    }
    if (*sweep) {
      auto plan = plan_of(c, {dp::Method::MaxPower, dp::Method::GreedyPL, dp::Method::GreedyPU,
                              dp::Method::Rand, dp::Method::Rpphy, dp::Method::Rpmac});
      plan.topology_seeds.clear();
      for (std::size_t k = 0; k < topologies; ++k) plan.topology_seeds.push_back(c.seed + k);
      Sink sink(c.out);
      dp::write_rows_csv(sink.os(), dp::run_plan(plan));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
