// JSON topology and mechanism files.
#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualpower/game.hpp"
#include "dualpower/network.hpp"

namespace dualpower::io {

using nlohmann::json;

struct Topology {
  NetworkConfig config;
  std::vector<Point> positions;
};

namespace detail {

// Accepts a scalar (broadcast) or an array of length n.
inline std::vector<double> per_ap(const json& j, const char* key, std::size_t n) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("topology is missing '") + key + "'");
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (out.size() != n) {
    throw std::invalid_argument(std::string("'") + key + "' needs " + std::to_string(n) + " entries");
  }
  return out;
}

inline Matrix matrix_from(const json& rows) {
  const auto n = rows.size();
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = rows.at(i).get<std::vector<double>>();
    if (row.size() != n) throw std::invalid_argument("matrix must be square");
    for (std::size_t k = 0; k < n; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return m;
}

inline json matrix_to(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

// Explicit "gains" override positions and path loss.
inline Topology topology_from_json(const json& j) {
  std::vector<Point> positions;
  if (j.contains("positions")) {
    for (const auto& p : j.at("positions")) {
      if (p.size() != 2) throw std::invalid_argument("positions must be [x, y] pairs");
      positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
  }
  Matrix gains;
  if (j.contains("gains")) {
    gains = detail::matrix_from(j.at("gains"));
  } else {
    if (positions.empty()) throw std::invalid_argument("topology needs positions or gains");
    double exponent = 3.0, reference = 1.0;
    if (j.contains("pathloss")) {
      exponent = j.at("pathloss").value("exponent", 3.0);
      reference = j.at("pathloss").value("reference_gain", 1.0);
    }
    gains = build_gains(positions, exponent, reference);
  }
  const auto n = static_cast<std::size_t>(gains.rows());
  if (!positions.empty() && positions.size() != n) {
    throw std::invalid_argument("positions and gains disagree on AP count");
  }
  NetworkConfig config(j.at("noise_floor").get<double>(), detail::per_ap(j, "cs_threshold", n),
                       detail::per_ap(j, "power_min", n), detail::per_ap(j, "power_max", n),
                       std::move(gains));
  return {std::move(config), std::move(positions)};
}

inline json topology_to_json(const NetworkConfig& net, const std::vector<Point>& positions,
                             std::optional<std::pair<double, double>> pathloss = {}) {
  json j;
  json pos = json::array();
  for (const auto& p : positions) pos.push_back({p.x, p.y});
  if (!positions.empty()) j["positions"] = pos;
  j["noise_floor"] = net.noise_floor();
  j["cs_threshold"] = net.cs_thresholds();
  j["power_min"] = net.power_mins();
  j["power_max"] = net.power_maxs();
  if (pathloss) j["pathloss"] = {{"exponent", pathloss->first}, {"reference_gain", pathloss->second}};
  j["gains"] = detail::matrix_to(net.gains());
  return j;
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

inline Topology load_topology(const std::string& path) { return topology_from_json(read_json(path)); }

// Mechanism file:
// { "discount": 0.9, "punish_len": 3, "p_c": 0.5,
//   "target": [powers...]            (optional, defaults to max power)
//   "punish_rate_self": 0.9 | [...], "punish_rate_others": 0.95 | [[...]],
//   "noise": {"sigma": 0.01 | [...], "correlation": 0.0 | [[...]]},
//   "detection": {"epsilon": 0.02 | [...]},
//   "horizon": 1000, "seeds": [1, 2, 3] }
struct MechanismFile {
  MechanismParams params;
  std::optional<NoiseModel> noise;
  std::optional<DetectionConfig> detection;
  std::size_t horizon{1000};
  std::vector<std::uint64_t> seeds{1};
};

inline MechanismFile mechanism_from_json(const json& j, const NetworkConfig& net) {
  const std::size_t n = net.size();
  MechanismFile f;
  const double p_c = j.value("p_c", 0.5);
  PowerProfile target = j.contains("target")
                            ? PowerProfile(j.at("target").get<std::vector<double>>())
                            : PowerProfile::max_power(net);
  f.params = MechanismParams::with_defaults(net, std::move(target), p_c, j.value("discount", 0.9),
                                            j.value("punish_len", std::size_t{1}));
  if (j.contains("punish_rate_self")) f.params.punish_rate_self = detail::per_ap(j, "punish_rate_self", n);
  if (j.contains("punish_rate_others")) {
    const auto& v = j.at("punish_rate_others");
    f.params.punish_rate_others = v.is_number()
                                      ? Matrix::Constant(static_cast<Eigen::Index>(n),
                                                         static_cast<Eigen::Index>(n), v.get<double>())
                                      : detail::matrix_from(v);
  }
  validate(net, f.params);
  if (j.contains("noise")) {
    const auto& nz = j.at("noise");
    auto sigma = detail::per_ap(nz, "sigma", n);
    Matrix corr;
    const json c = nz.value("correlation", json(0.0));
    if (c.is_number()) {
      corr = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), c.get<double>());
      corr.diagonal().setOnes();
    } else {
      corr = detail::matrix_from(c);
    }
    f.noise.emplace(std::move(sigma), std::move(corr));
  }
  if (j.contains("detection")) f.detection.emplace(detail::per_ap(j.at("detection"), "epsilon", n));
  f.horizon = j.value("horizon", std::size_t{1000});
  if (j.contains("seeds")) f.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  return f;
}

}  // namespace dualpower::io
