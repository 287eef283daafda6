#ifndef RADBIF_LAYER1D_HPP
#define RADBIF_LAYER1D_HPP

/**
 * @file layer1d.hpp
 * @brief One-dimensional boundary-layer objects for  w'' + f(w) = 0:
 *        the homoclinic orbit w*, the half-period map T(alpha), increasing
 *        layer solutions of  eps^2 w'' + f(w) = 0  on [0, 1], and the limiting
 *        eigenpairs of  L* = d^2/ds^2 + f'(w*).
 *
 * With F(w) = w^2 - 2 w^{p+1}/(p+1), the orbit through the minimum beta in (0,1)
 * and the maximum alpha in (1, alpha_bar) satisfies  w'^2 = F(w) - F(beta)
 * and F(alpha) = F(beta).
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "radbif/error.hpp"
#include "radbif/ode.hpp"
#include "radbif/params.hpp"

namespace radbif::layer {

using ld = long double;

inline void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorKind::ParameterDomain, "exponent p must satisfy p > 1");
}

/// ((p+1)/2)^{1/(p-1)}, the maximum of the homoclinic orbit.
template <class Real = double>
Real alpha_bar(Real p) {
  using std::pow;
  return pow((p + 1) / 2, 1 / (p - 1));
}

/// F(w) written as w^2 (1 - (w / alpha_bar)^{p-1}), accurate near both zeros.
template <class Real = double>
Real F(Real p, Real w) {
  using std::expm1, std::log;
  return -w * w * expm1((p - 1) * log(w / alpha_bar<Real>(p)));
}

/// w*(y) = alpha_bar cosh((p-1) y / 2)^{-2/(p-1)}.
template <class Real = double>
Real homoclinic(Real p, Real y) {
  using std::cosh, std::pow;
  return alpha_bar<Real>(p) * pow(cosh((p - 1) * y / 2), -2 / (p - 1));
}

/// max |w*'' - w* + w*^p| over y in [-y_max, y_max] using a five-point
/// central difference at step h, evaluated in extended precision.
inline double homoclinic_residual(double p, double h = 1e-4, double y_max = 10.0, int points = 2001) {
  require_p(p);
  const ld P = p, H = h;
  ld worst = 0;
  for (int i = 0; i < points; ++i) {
    const ld y = -static_cast<ld>(y_max) + 2 * static_cast<ld>(y_max) * i / (points - 1);
    const ld wm2 = homoclinic<ld>(P, y - 2 * H), wm1 = homoclinic<ld>(P, y - H), w0 = homoclinic<ld>(P, y);
    const ld wp1 = homoclinic<ld>(P, y + H), wp2 = homoclinic<ld>(P, y + 2 * H);
    const ld d2 = (-wm2 + 16 * wm1 - 30 * w0 + 16 * wp1 - wp2) / (12 * H * H);
    worst = std::max(worst, std::abs(d2 - w0 + std::pow(w0, P)));
  }
  return static_cast<double>(worst);
}

/// Bracketed root in extended precision, by default to full working accuracy.
template <class G>
ld solve(G&& g, ld a, ld b, ld rel = 4 * std::numeric_limits<ld>::epsilon()) {
  const ld ga = g(a), gb = g(b);
  if (ga == 0) return a;
  if (gb == 0) return b;
  if ((ga > 0) == (gb > 0)) fail(ErrorKind::BracketingFailed, "layer: no sign change in bracket");
  std::uintmax_t it = 300;
  auto tol = [rel](ld lo, ld hi) { return std::abs(hi - lo) <= rel * std::max(std::abs(lo), std::abs(hi)); };
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, it);
  return (lo + hi) / 2;
}

/// Minimum beta in (0,1) with F(beta) = F(alpha).
inline ld beta_of(ld p, ld alpha) {
  const ld target = F<ld>(p, alpha);
  return solve([&](ld b) { return F<ld>(p, b) - target; }, 0, 1);
}

/// Maximum alpha in (1, alpha_bar) with F(alpha) = F(beta), solved for
/// xi = log(alpha_bar / alpha) so that the bracket ends have exact signs.
inline ld alpha_of(ld p, ld beta) {
  const ld target = F<ld>(p, beta);
  const ld ab = alpha_bar<ld>(p);
  const ld xi = solve([&](ld x) { return F<ld>(p, ab * std::exp(-x)) - target; }, 0, std::log(ab));
  return ab * std::exp(-xi);
}

/// (F(w) - F(a)) / (w - a), free of cancellation in the power term.
inline ld divided_difference(ld p, ld a, ld w) {
  const ld x = (w - a) / a;
  const ld e = x == 0 ? p + 1 : std::expm1((p + 1) * std::log1p(x)) / x;
  return (w + a) - 2 * std::pow(a, p) * e / (p + 1);
}

/// T = int_beta^alpha dw / sqrt(F(w) - F(beta)), split at the midpoint with
/// w - beta = tau^2 and alpha - w = tau^2 removing the endpoint singularities.
/// Each half uses the level of its own endpoint, so the regularized
/// integrands 2 / sqrt((F(w) - F(end)) / tau^2) stay finite at tau = 0.
inline ld half_period(ld p, ld alpha, ld beta) {
  const ld mid = (alpha + beta) / 2;
  using Q = boost::math::quadrature::gauss_kronrod<ld, 31>;
  const ld tol = 1e-12L;
  auto lower = [&](ld tau) { return 2 / std::sqrt(divided_difference(p, beta, beta + tau * tau)); };
  auto upper = [&](ld tau) { return 2 / std::sqrt(-divided_difference(p, alpha, alpha - tau * tau)); };
  // The lower integrand peaks at 2/sqrt(2 beta) and varies on the scale
  // tau ~ sqrt(beta): integrate in sigma = tau / sqrt(beta), split geometrically.
  const ld sb = std::min(std::sqrt(beta), ld{1});
  auto lower_scaled = [&](ld sigma) { return sb * lower(sb * sigma); };
  const ld s_mid = std::sqrt(mid - beta) / sb;
  ld lo = 0, a = 0, b = std::min(ld{1}, s_mid);
  while (true) {
    lo += Q::integrate(lower_scaled, a, b, 14, tol);
    if (b >= s_mid) break;
    a = b;
    b = std::min(2 * b, s_mid);
  }
  const ld hi = Q::integrate(upper, 0, std::sqrt(alpha - mid), 14, tol);
  return lo + hi;
}

}  // namespace radbif::layer

namespace radbif {

struct LayerState {
  double alpha_max = 0.0;
  double beta_min = 0.0;
  double half_period = 0.0;
};

/// Minimum, maximum and half-period of the orbit with maximum alpha in (1, alpha_bar).
inline LayerState layer_state(double p, double alpha) {
  layer::require_p(p);
  const double ab = layer::alpha_bar(p);
  if (!(alpha > 1.0 && alpha < ab))
    fail(ErrorKind::AlphaOutOfRange,
         "alpha = " + std::to_string(alpha) + " outside (1, " + std::to_string(ab) + ")");
  const layer::ld beta = layer::beta_of(p, alpha);
  return {alpha, static_cast<double>(beta), static_cast<double>(layer::half_period(p, alpha, beta))};
}

/// T(alpha).
inline double period(double p, double alpha) { return layer_state(p, alpha).half_period; }

struct LayerSolution {
  double p = 0.0;
  double epsilon = 0.0;
  LayerState state;
  ode::Trajectory<2> profile;  ///< (w, dw/dx) on x in [0, 1]

  ode::Sample eval(double x) const { return profile.eval(x); }

  /// w~(s) = w(1 - eps s), the layer seen from the maximum at x = 1.
  double stretched(double s) const { return profile.eval(std::clamp(1.0 - epsilon * s, 0.0, 1.0)).u; }

  /// sup |w~(s) - w*(s)| over s in [0, 1/eps].
  double homoclinic_distance(int points = 2001) const {
    double d = 0.0;
    for (int i = 0; i < points; ++i) {
      const double s = (1.0 / epsilon) * i / (points - 1.0);
      d = std::max(d, std::abs(stretched(s) - layer::homoclinic(p, s)));
    }
    return d;
  }

  /// max |(eps w')^2 - F(w) + F(w(0))| over the integrator nodes.
  double energy_defect() const {
    const double Fb = layer::F(p, state.beta_min);
    double d = 0.0;
    for (std::size_t i = 0; i < profile.num_nodes(); ++i) {
      const auto y = profile.node(i);
      const double ew = epsilon * y[1];
      d = std::max(d, std::abs(ew * ew - layer::F(p, y[0]) + Fb));
    }
    return d;
  }
};

/**
 * Increasing solution of  eps^2 w'' + f(w) = 0  on [0, 1] with w'(0) = w'(1) = 0.
 *
 * The orbit is located by bisection on log(beta) for T = 1/eps, then
 * integrated from (beta, 0).
 * Throws NoSolution if 1/eps does not exceed the small-amplitude limit pi/sqrt(p-1).
 */
inline LayerSolution layer_solution(double p, double epsilon, double tol = 1e-12) {
  layer::require_p(p);
  if (!(epsilon > 0.0)) fail(ErrorKind::ParameterDomain, "epsilon must be positive");
  using layer::ld;
  const ld P = p;
  const ld target = 1.0L / epsilon;
  auto T_of_logbeta = [&](ld lb) {
    const ld b = std::exp(lb);
    return layer::half_period(P, layer::alpha_of(P, b), b) - target;
  };
  // beta near 1 is the small-amplitude end, beta -> 0 the homoclinic end.
  ld lb_hi = std::log(1.0L - 1e-4L);
  if (T_of_logbeta(lb_hi) >= 0)
    fail(ErrorKind::NoSolution, "no increasing layer for eps = " + std::to_string(epsilon) +
                                    ": 1/eps must exceed pi/sqrt(p-1) = " +
                                    std::to_string(std::numbers::pi / std::sqrt(p - 1.0)));
  ld lb_lo = -1;
  while (T_of_logbeta(lb_lo) < 0) {
    lb_lo *= 2;
    if (lb_lo < -2000) fail(ErrorKind::NoSolution, "layer: could not bracket T = 1/eps");
  }
  // T carries quadrature noise near 1e-12, so log(beta) is only resolved to match.
  const ld lb = layer::solve(T_of_logbeta, lb_lo, lb_hi, 1e-13L);
  const ld beta = std::exp(lb), alpha = layer::alpha_of(P, beta);

  LayerSolution sol;
  sol.p = p;
  sol.epsilon = epsilon;
  sol.state = {static_cast<double>(alpha), static_cast<double>(beta),
               static_cast<double>(layer::half_period(P, alpha, beta))};

  auto rhs = [p](double, const ode::State<2>& y) -> ode::State<2> { return {y[1], -nonlinearity(p, y[0])}; };
  ode::Options o;
  o.tol = tol;
  const double s_end = sol.state.half_period;
  // The orbit starts within beta of the saddle at 0; tolerances must be relative to beta.
  const double sc = std::min(1.0, sol.state.beta_min);
  auto out = ode::integrate<2>(rhs, Frame::S, 0.0, ode::State<2>{sol.state.beta_min, 0.0}, s_end, o, {},
                               ode::State<2>{sc, sc});
  sol.profile = out.trajectory.rescaled(Frame::R, epsilon, 1.0);
  return sol;
}

struct EigenpairResidual {
  double kappa = 0.0;
  double residual = 0.0;  ///< max |L* phi - kappa phi| / max |phi|
  double slope_at_origin = 0.0;
};

struct EigenpairReport {
  double p = 0.0;
  EigenpairResidual pair0;
  std::optional<EigenpairResidual> pair1;  ///< only for 1 < p < 3
};

namespace layer {

inline double kappa0(double p) { return (p - 1.0) * (p + 3.0) / 4.0; }
inline double kappa1(double p) { return -(p - 1.0) * (5.0 - p) / 4.0; }

inline double phi0(double p, double s) { return std::pow(homoclinic(p, s), (p + 1.0) / 2.0); }

inline double phi1(double p, double s) {
  const double w = homoclinic(p, s);
  return std::pow(w, (3.0 - p) / 2.0) - (p + 3.0) / (2.0 * (p + 1.0)) * std::pow(w, (p + 1.0) / 2.0);
}

template <class Phi>
EigenpairResidual eigen_residual(double p, double kappa, Phi&& phi, double h, double s_max) {
  EigenpairResidual r;
  r.kappa = kappa;
  double worst = 0.0, scale = 0.0;
  const int n = static_cast<int>(std::lround(s_max / h));
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    const double f0 = phi(s);
    const double d2 = (phi(s + h) - 2.0 * f0 + phi(s - h)) / (h * h);
    const double pot = nonlinearity_prime(p, homoclinic(p, s));
    worst = std::max(worst, std::abs(d2 + pot * f0 - kappa * f0));
    scale = std::max(scale, std::abs(f0));
  }
  r.residual = worst / scale;
  r.slope_at_origin = (phi(h) - phi(-h)) / (2.0 * h);
  return r;
}

}  // namespace layer

/// Residuals of the closed-form eigenpairs of L* = d^2/ds^2 + f'(w*) on [0, s_max].
inline EigenpairReport limit_eigenpair_check(double p, double h = 1e-3, double s_max = 20.0) {
  layer::require_p(p);
  EigenpairReport rep;
  rep.p = p;
  rep.pair0 = layer::eigen_residual(p, layer::kappa0(p), [p](double s) { return layer::phi0(p, s); }, h, s_max);
  if (p < 3.0)
    rep.pair1 = layer::eigen_residual(p, layer::kappa1(p), [p](double s) { return layer::phi1(p, s); }, h, s_max);
  return rep;
}

}  // namespace radbif

#endif  // RADBIF_LAYER1D_HPP
