#ifndef RADBIF_SHOOTING_HPP
#define RADBIF_SHOOTING_HPP

/**
 * @file shooting.hpp
 * @brief Regular radial solutions u(s, gamma) of
 *
 *     u'' + (N-1)/s u' + f(u) = 0,   u(0) = gamma,  u'(0) = 0,   f(u) = -u + u^p,
 *
 * their critical points s_n (so that lambda_n(gamma) = s_n^2 solves the
 * Neumann problem on the unit ball), and the radial Neumann eigenvalues mu_n.
 */

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "radbif/error.hpp"
#include "radbif/frame.hpp"
#include "radbif/ode.hpp"
#include "radbif/params.hpp"
#include "radbif/roots.hpp"

namespace radbif {

enum class CriticalKind { Min, Max };

constexpr std::string_view to_string(CriticalKind k) noexcept { return k == CriticalKind::Min ? "min" : "max"; }

struct CriticalPoint {
  int n = 0;          ///< 1-based index
  double s = 0.0;     ///< abscissa in the S frame
  CriticalKind kind = CriticalKind::Min;
  double value = 0.0; ///< u(s_n)
};

using CriticalPointList = std::vector<CriticalPoint>;

struct ShotResult {
  double gamma = 1.0;
  ode::Trajectory<2> trajectory;  ///< presented in the S frame
  CriticalPointList criticals;
  std::vector<double> zeros_of_u_minus_1;
  Frame integration_frame = Frame::S;  ///< S, or Rho for very large gamma
  double h0 = 0.0;                     ///< Taylor start offset in the integration frame
};

struct ShootOptions {
  double tol = 1e-10;
  /// Above this initial height the shot is integrated in the Rho frame.
  double rho_frame_above = 1e4;
  /// Overrides the automatic horizon when positive.
  double horizon = 0.0;
};

namespace shooting {

/// Taylor start of a regular solution with source g: u = u0 + a2 x^2 + a4 x^4.
struct TaylorStart {
  double a2 = 0.0;
  double a4 = 0.0;
  ode::State<2> at(double u0, double x) const {
    return {u0 + a2 * x * x + a4 * x * x * x * x, 2.0 * a2 * x + 4.0 * a4 * x * x * x};
  }
};

/// Coefficients from 2N a2 = -g(u0) and 4(N+2) a4 = -g'(u0) a2.
inline TaylorStart taylor_coefficients(int N, double g0, double dg0) {
  TaylorStart t;
  t.a2 = -g0 / (2.0 * N);
  t.a4 = g0 * dg0 / (8.0 * N * (N + 2.0));
  return t;
}

/// Start offset keeping the O(h0^6) Taylor remainder below double rounding.
inline double start_offset(double g0) { return 1e-6 / std::sqrt(std::abs(g0) + 1.0); }

/// Safety horizon in s: (n_max + 2) pi / sqrt(p-1) + 20, plus the run-up
/// distance log(1/gamma) a small initial height needs before oscillating.
inline double horizon(const DerivedConstants& c, double gamma, int n_max) {
  double h = (n_max + 2) * std::numbers::pi / std::sqrt(c.p() - 1.0) + 20.0;
  if (gamma < 1.0) h += 2.0 * std::log(1.0 / gamma);
  return h;
}

}  // namespace shooting

/**
 * Shoot the regular solution with u(0) = gamma until n_max critical points
 * are found.
 *
 * gamma == 1 returns the constant solution with no critical points.
 * Throws HorizonExceeded if gamma != 1 and fewer than n_max critical points
 * lie before the horizon, and NotPositive if u reaches 0 first (possible for p < p_S).
 */
inline ShotResult shoot(const DerivedConstants& c, double gamma, int n_max, const ShootOptions& opt = {}) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    fail(ErrorKind::ParameterDomain, "initial height gamma must be positive, got " + std::to_string(gamma));
  if (n_max < 1) fail(ErrorKind::ParameterDomain, "n_max must be >= 1");

  const double p = c.p();
  const int N = c.N();
  const double s_h = opt.horizon > 0.0 ? opt.horizon : shooting::horizon(c, gamma, n_max);

  ShotResult res;
  res.gamma = gamma;

  const bool rho = gamma > opt.rho_frame_above;
  res.integration_frame = rho ? Frame::Rho : Frame::S;

  // In the Rho frame u~ = u/gamma solves u~'' + (N-1)/rho u~' + u~^p - kappa u~ = 0, u~(0) = 1.
  const double kappa = rho ? std::pow(gamma, 1.0 - p) : 1.0;
  const double x_scale = rho ? 1.0 / frame::rho_factor(gamma, p) : 1.0;  // s = x_scale * rho
  const double u_scale = rho ? gamma : 1.0;
  const double u0 = rho ? 1.0 : gamma;

  // u^p is continued oddly below 0 so that a step may cross u = 0 and trigger the NotPositive event.
  auto power = [p](double u) { return u >= 0.0 ? std::pow(u, p) : -std::pow(-u, p); };
  auto source = [&](double u) { return -kappa * u + power(u); };
  auto dsource = [&](double u) { return -kappa + p * std::pow(std::abs(u), p - 1.0); };

  const double g0 = source(u0);
  const double h0 = shooting::start_offset(g0);
  res.h0 = h0;
  const auto taylor = shooting::taylor_coefficients(N, g0, dsource(u0));
  const ode::State<2> y0 = taylor.at(u0, h0);

  const double nm1 = N - 1.0;
  auto rhs = [&](double x, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], -nm1 / x * y[1] - source(y[0])};
  };

  const double x_end = s_h / x_scale;
  std::vector<ode::EventSpec<2>> events{
      ode::EventSpec<2>::derivative_zero(ode::Direction::Any, n_max),
      ode::EventSpec<2>::value_crossing(1.0 / u_scale),
      ode::EventSpec<2>::value_crossing(0.0, ode::Direction::Down, 1),
  };
  // Absolute tolerances chosen so the error is `tol` in S-frame units.
  const ode::State<2> atol_scale =
      rho ? ode::State<2>{1.0 / u_scale, x_scale / u_scale} : ode::State<2>{1.0, 1.0};

  ode::Options o;
  o.tol = opt.tol;
  auto out = ode::integrate<2>(rhs, res.integration_frame, h0, y0, x_end, o, events, atol_scale);

  res.trajectory = rho ? out.trajectory.rescaled(Frame::S, x_scale, u_scale) : out.trajectory;

  for (const auto& hit : out.hits) {
    const double s = hit.x * x_scale;
    if (hit.spec_index == 0) {
      CriticalPoint cp;
      cp.n = static_cast<int>(res.criticals.size()) + 1;
      cp.s = s;
      // u' going - to + is a minimum.
      cp.kind = hit.crossing == ode::Direction::Up ? CriticalKind::Min : CriticalKind::Max;
      cp.value = hit.y[0] * u_scale;
      res.criticals.push_back(cp);
    } else if (hit.spec_index == 1) {
      res.zeros_of_u_minus_1.push_back(s);
    } else {
      fail(ErrorKind::NotPositive, "u(., " + std::to_string(gamma) + ") reaches 0 at s = " + std::to_string(s));
    }
  }

  if (gamma != 1.0 && static_cast<int>(res.criticals.size()) < n_max)
    fail(ErrorKind::HorizonExceeded, "found " + std::to_string(res.criticals.size()) + " of " +
                                         std::to_string(n_max) + " critical points before s = " +
                                         std::to_string(s_h) + " (gamma = " + std::to_string(gamma) + ")");
  return res;
}

inline ShotResult shoot(const DerivedConstants& c, double gamma, int n_max, double tol) {
  ShootOptions o;
  o.tol = tol;
  return shoot(c, gamma, n_max, o);
}

/// lambda_n(gamma) = s_n^2, s_n the n-th positive critical point of u(., gamma).
inline double lambda_n(const DerivedConstants& c, double gamma, int n, double tol = 1e-10) {
  if (gamma == 1.0) fail(ErrorKind::ParameterDomain, "lambda_n undefined on the constant solution gamma = 1");
  const ShotResult r = shoot(c, gamma, n, tol);
  const double s = r.criticals[n - 1].s;
  return s * s;
}

/// Regular entire solution of  u'' + (N-1)/rho u' + u^p = 0,  u(0) = 1, on [h0, rho_max], Rho frame.
inline ode::Trajectory<2> shoot_lane_emden(const DerivedConstants& c, double rho_max, double tol = 1e-10) {
  const double p = c.p();
  const int N = c.N();
  const double h0 = shooting::start_offset(1.0);
  const auto taylor = shooting::taylor_coefficients(N, 1.0, p);
  const double nm1 = N - 1.0;
  auto rhs = [&](double x, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], -nm1 / x * y[1] - std::pow(y[0], p)};
  };
  ode::Options o;
  o.tol = tol;
  return ode::integrate<2>(rhs, Frame::Rho, h0, taylor.at(1.0, h0), rho_max, o).trajectory;
}

/// phi'(1) for the radial eigenproblem -(phi'' + (N-1)/r phi') = k^2 phi, phi(0) = 1, phi'(0) = 0.
inline double neumann_boundary_slope(int N, double k, double tol = 1e-12) {
  const double mu = k * k;
  const double h0 = std::min(1e-6, 1e-3 / (1.0 + k));
  const auto taylor = shooting::taylor_coefficients(N, mu, mu);  // source g(phi) = mu phi
  const double nm1 = N - 1.0;
  auto rhs = [&](double r, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], -nm1 / r * y[1] - mu * y[0]};
  };
  ode::Options o;
  o.tol = tol;
  const auto out = ode::integrate<2>(rhs, Frame::R, h0, taylor.at(1.0, h0), 1.0, o);
  return out.trajectory.node(out.trajectory.num_nodes() - 1)[1];
}

/**
 * n-th positive radial Neumann eigenvalue mu_n of -Laplacian on the unit ball
 * of R^N, by shooting in k = sqrt(mu) and bisecting on phi'(1).
 *
 * Brackets are scanned in steps of pi/4, a quarter of the asymptotic
 * spacing of sqrt(mu_n).
 */
inline double neumann_eigenvalue(int N, int n, double tol = 1e-12) {
  if (N < 1) fail(ErrorKind::ParameterDomain, "dimension must be positive");
  if (n < 1) fail(ErrorKind::ParameterDomain, "eigenvalue index must be >= 1");
  const double dk = std::numbers::pi / 4.0;
  const double k_cap = (n + N + 4) * std::numbers::pi + 20.0;
  double ka = 0.5;
  double fa = neumann_boundary_slope(N, ka, tol);
  int found = 0;
  while (ka < k_cap) {
    const double kb = ka + dk;
    const double fb = neumann_boundary_slope(N, kb, tol);
    if ((fa < 0.0) != (fb < 0.0)) {
      if (++found == n) {
        auto g = [&](double k) { return neumann_boundary_slope(N, k, tol); };
        auto width = [](double k) { return 1e-14 * k; };
        const double k = roots::bracketed(g, ka, kb, fa, fb, width);
        return k * k;
      }
    }
    ka = kb;
    fa = fb;
  }
  fail(ErrorKind::BracketingFailed, "could not bracket Neumann eigenvalue " + std::to_string(n));
}

/// Bifurcation point lambda_bar_n = mu_n / (p - 1) from the constant solution.
inline double bifurcation_point(const DerivedConstants& c, int n) {
  return neumann_eigenvalue(c.N(), n) / (c.p() - 1.0);
}

}  // namespace radbif

#endif  // RADBIF_SHOOTING_HPP
