#ifndef RADBIF_SINGULAR_HPP
#define RADBIF_SINGULAR_HPP

/**
 * @file singular.hpp
 * @brief The singular solution u*(s) = A s^{-theta} y*(log(s)/m) and its
 *        critical points s_n*, lambda_n* = (s_n*)^2.
 *
 * y* solves  y'' + alpha y' - y + y^p - m^2 e^{2mt} y = 0  with y -> 1 as
 * t -> -inf. It is started at t0 (e^{2 m t0} = 1e-10, i.e. s0 = 1e-5) from
 *
 *     y(t0)  = 1 + c1 e^{2 m t0},             c1 = 1 / (2 (2(N-1) - 3 theta))
 *     y'(t0) = m / (2(N-1) - 3 theta) e^{2 m t0}
 *
 * and integrated forward. Below s0 the profile is evaluated from the same
 * expansion.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "radbif/curves.hpp"
#include "radbif/error.hpp"
#include "radbif/ode.hpp"
#include "radbif/params.hpp"
#include "radbif/shooting.hpp"

namespace radbif {

/// Start data of the singular orbit.
struct SingularStart {
  double t0 = 0.0;
  double c1 = 0.0;          ///< y(t0) = 1 + c1 e^{2 m t0}
  double slope_coeff = 0.0; ///< y'(t0) = slope_coeff e^{2 m t0}
};

namespace singular {

inline constexpr double kDefaultStartWeight = 1e-10;  // e^{2 m t0}

/// 2(N-1) - 3 theta, the denominator of the leading expansion coefficients.
inline double expansion_denominator(const DerivedConstants& c) { return 2.0 * (c.N() - 1.0) - 3.0 * c.theta; }

inline SingularStart default_start(const DerivedConstants& c, double start_weight = kDefaultStartWeight) {
  const EmdenScaling& e = c.require_supercritical();
  const double den = expansion_denominator(c);
  if (den <= 1e-10)
    fail(ErrorKind::DegenerateDenominator, "2(N-1) - 3 theta = " + std::to_string(den) + " is not positive");
  SingularStart st;
  st.t0 = std::log(start_weight) / (2.0 * e.m);
  st.slope_coeff = e.m / den;
  st.c1 = 1.0 / (2.0 * den);
  return st;
}

}  // namespace singular

/// u*(s) in the S frame, backed by the T-frame orbit.
class SingularCurve {
 public:
  SingularCurve() = default;
  SingularCurve(const DerivedConstants& c, ode::Trajectory<2> y, SingularStart start)
      : theta_(c.theta), A_(c.scaling().A), m_(c.scaling().m), y_(std::move(y)), start_(start) {}

  /// u and du/ds at s > 0.
  Sample eval(double s) const {
    if (!(s > 0.0)) fail(ErrorKind::IntervalNotCovered, "singular profile is undefined at s <= 0");
    const double t = std::log(s) / m_;
    double y, z;
    if (t < y_.lower()) {
      const double w = s * s;  // e^{2mt}
      y = 1.0 + start_.c1 * w;
      z = start_.slope_coeff * w;
    } else {
      const auto st = y_.at(t);
      y = st[0];
      z = st[1];
    }
    const double amp = A_ * std::pow(s, -theta_);
    return {amp * y, amp / s * (z / m_ - theta_ * y)};
  }

  /// The closed-form expansion extends the profile down to the origin.
  double lower() const { return 0.0; }
  double upper() const { return std::exp(m_ * y_.upper()); }
  double start_s() const { return std::exp(m_ * y_.lower()); }

  std::vector<double> breakpoints() const {
    std::vector<double> out;
    out.reserve(y_.num_nodes());
    for (std::size_t i = 0; i < y_.num_nodes(); ++i) out.push_back(std::exp(m_ * y_.node_x(i)));
    return out;
  }

  const ode::Trajectory<2>& orbit() const noexcept { return y_; }

 private:
  double theta_ = 0.0, A_ = 0.0, m_ = 1.0;
  ode::Trajectory<2> y_;
  SingularStart start_;
};

struct SingularProfile {
  ode::Trajectory<2> y_trajectory;  ///< (y, y') against t
  SingularCurve u_star;
  CriticalPointList criticals_star;
  std::vector<double> lambdas_star;
  double t0 = 0.0;
  double c1 = 0.0;

  double s_star(int n) const { return criticals_star.at(n - 1).s; }
  double lambda_star(int n) const { return lambdas_star.at(n - 1); }
};

/// Integrate the singular orbit from an explicit start and extract n_max critical points of u*.
/// n_max = 0 integrates to the default horizon and records whatever critical points occur.
inline SingularProfile compute_singular(const DerivedConstants& c, int n_max, double tol, const SingularStart& start) {
  const EmdenScaling& e = c.require_supercritical();
  if (n_max < 0) fail(ErrorKind::ParameterDomain, "n_max must be >= 0");
  const double p = c.p();
  const double m = e.m, alpha = e.alpha, theta = c.theta;

  const double w0 = std::exp(2.0 * m * start.t0);
  const ode::State<2> y0{1.0 + start.c1 * w0, start.slope_coeff * w0};
  const double s_h = shooting::horizon(c, 2.0, n_max);
  const double t_end = std::log(s_h) / m;

  const double m2 = m * m;
  auto rhs = [&](double t, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], -alpha * y[1] + y[0] - std::pow(y[0], p) + m2 * std::exp(2.0 * m * t) * y[0]};
  };
  // du*/ds has the sign of y' - m theta y.
  std::vector<ode::EventSpec<2>> events{ode::EventSpec<2>::custom(
      [m, theta](double, const ode::State<2>& y) { return y[1] - m * theta * y[0]; }, ode::Direction::Any, n_max)};

  ode::Options o;
  o.tol = tol;
  auto out = ode::integrate<2>(rhs, Frame::T, start.t0, y0, t_end, o, events);

  SingularProfile prof;
  prof.y_trajectory = out.trajectory;
  prof.u_star = SingularCurve(c, out.trajectory, start);
  prof.t0 = start.t0;
  prof.c1 = start.c1;
  for (const auto& hit : out.hits) {
    CriticalPoint cp;
    cp.n = static_cast<int>(prof.criticals_star.size()) + 1;
    cp.s = std::exp(m * hit.x);
    cp.kind = hit.crossing == ode::Direction::Up ? CriticalKind::Min : CriticalKind::Max;
    cp.value = e.A * std::pow(cp.s, -theta) * hit.y[0];
    prof.criticals_star.push_back(cp);
    prof.lambdas_star.push_back(cp.s * cp.s);
  }
  if (static_cast<int>(prof.criticals_star.size()) < n_max)
    fail(ErrorKind::HorizonExceeded, "singular profile: found " + std::to_string(prof.criticals_star.size()) +
                                         " of " + std::to_string(n_max) + " critical points");
  return prof;
}

inline SingularProfile compute_singular(const DerivedConstants& c, int n_max, double tol = 1e-10) {
  return compute_singular(c, n_max, tol, singular::default_start(c));
}

/// The singular entire solution A rho^{-theta} of  u'' + (N-1)/rho u' + u^p = 0.
inline double singular_entire(const DerivedConstants& c, double rho) {
  if (!(rho > 0.0)) fail(ErrorKind::ParameterDomain, "rho must be positive");
  return c.scaling().A * std::pow(rho, -c.theta);
}

inline PowerLaw singular_entire_curve(const DerivedConstants& c) { return PowerLaw{c.scaling().A, c.theta}; }

/// Orbit of the autonomous system y' = z, z' = -alpha z + y - y^p leaving the
/// saddle (0,0) along its unstable direction (y, z) ~ delta (1, m theta).
inline ode::Trajectory<2> autonomous_orbit(const DerivedConstants& c, double t_span, double delta = 1e-8,
                                           double tol = 1e-10) {
  const EmdenScaling& e = c.require_supercritical();
  const double p = c.p(), alpha = e.alpha;
  auto rhs = [&](double, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], -alpha * y[1] + y[0] - std::pow(y[0], p)};
  };
  ode::Options o;
  o.tol = tol;
  return ode::integrate<2>(rhs, Frame::T, 0.0, ode::State<2>{delta, e.m * c.theta * delta}, t_span, o).trajectory;
}

struct InitSensitivityReport {
  std::vector<double> lambdas_star;               ///< reference values
  std::vector<double> shift_earlier;              ///< max |d lambda / lambda| with t0 - 2/m
  std::vector<double> shift_later;                ///< t0 + 2/m
  std::vector<double> c1_plus;                    ///< c1 * 1.1
  std::vector<double> c1_minus;                   ///< c1 * 0.9
  double max_t0_shift = 0.0;
  double max_c1 = 0.0;
};

/// Recompute lambda_1* .. lambda_{n_max}* under perturbed start data.
inline InitSensitivityReport init_sensitivity(const DerivedConstants& c, int n_max, double tol = 1e-10) {
  const SingularStart base = singular::default_start(c);
  const double m = c.scaling().m;
  const SingularProfile ref = compute_singular(c, n_max, tol, base);

  auto deviation = [&](SingularStart st) {
    const SingularProfile alt = compute_singular(c, n_max, tol, st);
    std::vector<double> dev(n_max);
    for (int i = 0; i < n_max; ++i)
      dev[i] = std::abs(alt.lambdas_star[i] - ref.lambdas_star[i]) / ref.lambdas_star[i];
    return dev;
  };

  InitSensitivityReport r;
  r.lambdas_star = ref.lambdas_star;
  SingularStart st = base;
  st.t0 = base.t0 - 2.0 / m;
  r.shift_earlier = deviation(st);
  st.t0 = base.t0 + 2.0 / m;
  r.shift_later = deviation(st);
  st = base;
  st.c1 = 1.1 * base.c1;
  r.c1_plus = deviation(st);
  st.c1 = 0.9 * base.c1;
  r.c1_minus = deviation(st);
  for (int i = 0; i < n_max; ++i) {
    r.max_t0_shift = std::max({r.max_t0_shift, r.shift_earlier[i], r.shift_later[i]});
    r.max_c1 = std::max({r.max_c1, r.c1_plus[i], r.c1_minus[i]});
  }
  return r;
}

}  // namespace radbif

#endif  // RADBIF_SINGULAR_HPP
