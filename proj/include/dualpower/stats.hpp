// Distribution helpers shared by the detection model and the experiment
// reports.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace dualpower::stats {

inline double normal_cdf(double x) {
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  return boost::math::cdf(std_normal, x);
}

inline double normal_pdf(double x) {
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  return boost::math::pdf(std_normal, x);
}

inline double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  return boost::math::quantile(std_normal, p);
}

inline double student_t_quantile(double p, double dof) {
  boost::math::students_t_distribution<double> t(dof);
  return boost::math::quantile(t, p);
}

struct MeanSd {
  double mean{0.0};
  double sd{0.0};
};

inline MeanSd mean_sd(std::span<const double> xs) {
  MeanSd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

}  // namespace dualpower::stats
