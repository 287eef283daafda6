#ifndef RADBIF_CURVES_HPP
#define RADBIF_CURVES_HPP

/**
 * @file curves.hpp
 * @brief Scalar radial profiles and intersection counting between them.
 *
 * Anything exposing eval(x) -> Sample, lower(), upper() and breakpoints()
 * is a RadialCurve: 2-D trajectories, the singular profile, constant levels
 * and closed-form power laws.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "radbif/error.hpp"
#include "radbif/ode.hpp"

namespace radbif {

using ode::Sample;

template <class C>
concept RadialCurve = requires(const C& c, double x) {
  { c.eval(x) } -> std::convertible_to<Sample>;
  { c.lower() } -> std::convertible_to<double>;
  { c.upper() } -> std::convertible_to<double>;
  { c.breakpoints() } -> std::convertible_to<std::vector<double>>;
};

struct ConstantLevel {
  double level = 1.0;
  Sample eval(double) const { return {level, 0.0}; }
  double lower() const { return -std::numeric_limits<double>::infinity(); }
  double upper() const { return std::numeric_limits<double>::infinity(); }
  std::vector<double> breakpoints() const { return {}; }
};

/// c * x^{-exponent} on (0, inf).
struct PowerLaw {
  double coefficient = 1.0;
  double exponent = 0.0;
  Sample eval(double x) const {
    const double v = coefficient * std::pow(x, -exponent);
    return {v, -exponent * v / x};
  }
  double lower() const { return 0.0; }
  double upper() const { return std::numeric_limits<double>::infinity(); }
  std::vector<double> breakpoints() const { return {}; }
};

struct SignChangeReport {
  int crossings = 0;    ///< strict sign changes of a - b
  int tangencies = 0;   ///< exact zeros without a sign change (reported, not counted)
  std::vector<double> locations;  ///< bracket midpoints of each crossing
};

namespace detail {

/// Effective closed interval [lo, hi] on which both curves must be evaluated.
/// A left end of exactly 0 means "from the origin": it is clamped to the
/// curves' own lower limits, since radial profiles are only stored from s = h0 > 0.
/// Curves defined down to 0 in closed form start at their first positive node.
template <RadialCurve A, RadialCurve B>
std::pair<double, double> common_interval(const A& a, const B& b, double lo, double hi) {
  const double dom_lo = std::max(a.lower(), b.lower());
  const double dom_hi = std::min(a.upper(), b.upper());
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (!(hi > lo)) fail(ErrorKind::ParameterDomain, "empty interval");
  if (hi > dom_hi + slack)
    fail(ErrorKind::IntervalNotCovered,
         "interval end " + std::to_string(hi) + " beyond curve range " + std::to_string(dom_hi));
  if (lo == 0.0) {
    lo = dom_lo;
    if (!(lo > 0.0)) {
      // Closed-form tails reaching the origin: start at the first stored node.
      double first = std::numeric_limits<double>::infinity();
      for (double x : a.breakpoints())
        if (x > 0.0) first = std::min(first, x);
      for (double x : b.breakpoints())
        if (x > 0.0) first = std::min(first, x);
      if (!(first < hi))
        fail(ErrorKind::IntervalNotCovered, "curves are not resolved at the origin; pass a positive start");
      lo = first;
    }
  } else if (lo < dom_lo - 1e-12 * std::max(1.0, std::abs(lo))) {
    fail(ErrorKind::IntervalNotCovered,
         "interval start " + std::to_string(lo) + " below curve range " + std::to_string(dom_lo));
  }
  return {std::max(lo, dom_lo), std::min(hi, dom_hi)};
}

}  // namespace detail

/**
 * Sign changes of a - b on [lo, hi] (lo == 0 meaning the open end at the origin).
 *
 * The difference is sampled on the union of both node grids with `refine`
 * equally spaced extra points inside every grid interval.
 */
template <RadialCurve A, RadialCurve B>
SignChangeReport sign_changes(const A& a, const B& b, double lo, double hi, int refine = 3) {
  const auto [x_lo, x_hi] = detail::common_interval(a, b, lo, hi);

  std::vector<double> grid{x_lo, x_hi};
  for (double x : a.breakpoints())
    if (x > x_lo && x < x_hi) grid.push_back(x);
  for (double x : b.breakpoints())
    if (x > x_lo && x < x_hi) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 64) {
    // Neither curve carries a grid (closed forms): fall back to a uniform one.
    std::vector<double> uni(65);
    for (int i = 0; i <= 64; ++i) uni[i] = x_lo + (x_hi - x_lo) * i / 64.0;
    grid.insert(grid.end(), uni.begin(), uni.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  std::vector<double> xs;
  xs.reserve(grid.size() * (refine + 1));
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    xs.push_back(grid[i]);
    for (int k = 1; k <= refine; ++k) xs.push_back(grid[i] + (grid[i + 1] - grid[i]) * k / (refine + 1.0));
  }
  xs.push_back(grid.back());

  SignChangeReport rep;
  int last_sign = 0;
  double last_x = xs.front();
  bool pending_zero = false;
  for (double x : xs) {
    const double d = a.eval(x).u - b.eval(x).u;
    const int sg = (d > 0.0) - (d < 0.0);
    if (sg == 0) {
      pending_zero = true;
      continue;
    }
    if (last_sign != 0 && sg != last_sign) {
      ++rep.crossings;
      rep.locations.push_back(0.5 * (last_x + x));
    } else if (pending_zero && last_sign != 0) {
      ++rep.tangencies;
    }
    pending_zero = false;
    last_sign = sg;
    last_x = x;
  }
  return rep;
}

/// Number of strict sign changes of a - b on (lo, hi].
template <RadialCurve A, RadialCurve B>
int count_sign_changes(const A& a, const B& b, double lo, double hi, int refine = 3) {
  return sign_changes(a, b, lo, hi, refine).crossings;
}

}  // namespace radbif

#endif  // RADBIF_CURVES_HPP
