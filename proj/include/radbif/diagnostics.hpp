#ifndef RADBIF_DIAGNOSTICS_HPP
#define RADBIF_DIAGNOSTICS_HPP

/**
 * @file diagnostics.hpp
 * @brief Identity-based consistency checks for computed trajectories: the
 *        integral Pohozaev identity and the Lyapunov functions of the radial
 *        and transformed equations.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "radbif/curves.hpp"
#include "radbif/error.hpp"
#include "radbif/ode.hpp"
#include "radbif/params.hpp"

namespace radbif {

struct IdentityReport {
  std::string name;
  double residual = 0.0;           ///< signed
  double scale = 0.0;              ///< largest constituent term
  double relative_residual = 0.0;  ///< |residual| / scale (0 when everything vanishes)
};

namespace diagnostics {

inline double relative(double residual, double scale) { return scale > 0.0 ? std::abs(residual) / scale : 0.0; }

/// Quadrature partition of [a, b]: the curve's breakpoints (or 64 equal
/// pieces when it has none), each split into `subdivide` parts.
template <RadialCurve C>
std::vector<double> partition(const C& curve, double a, double b, int subdivide) {
  std::vector<double> g{a, b};
  for (double x : curve.breakpoints())
    if (x > a && x < b) g.push_back(x);
  std::sort(g.begin(), g.end());
  if (g.size() < 3) {
    g.clear();
    for (int i = 0; i <= 64; ++i) g.push_back(a + (b - a) * i / 64.0);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    for (int k = 0; k < subdivide; ++k) out.push_back(g[i] + (g[i + 1] - g[i]) * k / subdivide);
  out.push_back(b);
  return out;
}

}  // namespace diagnostics

/**
 * Residual of the integral Pohozaev identity on [eps, R]:
 *
 *   0 = (N/2 - 1 - N/(p+1)) int s^{N-1} u'^2 + (N/2 - N/(p+1)) int s^{N-1} u^2
 *       + N/(p+1) [s^{N-1} u u'] + 1/2 [s^N u'^2] - 1/2 [s^N u^2] + 1/(p+1) [s^N u^{p+1}]
 *
 * with [g] = g(R) - g(eps). Integrals use 7-point Gauss-Legendre on the
 * curve's own step partition.
 */
template <RadialCurve C>
IdentityReport pohozaev_residual(const DerivedConstants& c, const C& curve, double eps, double R, int subdivide = 1) {
  if (!(eps > 0.0 && R > eps)) fail(ErrorKind::ParameterDomain, "Pohozaev interval must satisfy 0 < eps < R");
  if (eps < curve.lower() || R > curve.upper())
    fail(ErrorKind::IntervalNotCovered, "Pohozaev interval [" + std::to_string(eps) + ", " + std::to_string(R) +
                                            "] not covered by the trajectory");
  const double p = c.p();
  const double N = c.N();
  const double q = p + 1.0;

  auto weight = [N](double s) { return std::pow(s, N - 1.0); };
  double I_du = 0.0, I_u = 0.0;
  const auto grid = diagnostics::partition(curve, eps, R, subdivide);
  using GL = boost::math::quadrature::gauss<double, 7>;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    I_du += GL::integrate([&](double s) { const auto v = curve.eval(s); return weight(s) * v.du * v.du; },
                          grid[i], grid[i + 1]);
    I_u += GL::integrate([&](double s) { const auto v = curve.eval(s); return weight(s) * v.u * v.u; },
                         grid[i], grid[i + 1]);
  }

  auto boundary = [&](double s) {
    const auto v = curve.eval(s);
    if (!(v.u > 0.0)) fail(ErrorKind::ParameterDomain, "Pohozaev identity needs u > 0 on the interval");
    const double sN = std::pow(s, N);
    return std::array<double, 4>{N / q * weight(s) * v.u * v.du, 0.5 * sN * v.du * v.du, -0.5 * sN * v.u * v.u,
                                 sN * std::pow(v.u, q) / q};
  };
  const auto bR = boundary(R), be = boundary(eps);

  std::vector<double> terms{(N / 2.0 - 1.0 - N / q) * I_du, (N / 2.0 - N / q) * I_u};
  for (int k = 0; k < 4; ++k) {
    terms.push_back(bR[k]);
    terms.push_back(-be[k]);
  }
  IdentityReport rep;
  rep.name = "pohozaev";
  for (double t : terms) {
    rep.residual += t;
    rep.scale = std::max(rep.scale, std::abs(t));
  }
  rep.relative_residual = diagnostics::relative(rep.residual, rep.scale);
  return rep;
}

enum class Energy {
  Plane,   ///< E = z^2/2 - y^2/2 + y^{p+1}/(p+1) along the autonomous T-frame system, dE/dt = -alpha z^2
  Radial,  ///< E = v^2/2 - u^2/2 + u^{p+1}/(p+1) along the S-frame equation, dE/ds = -(N-1) v^2 / s
  Tilde,   ///< z^2/2 - (1 + m^2 e^{2mt}) y^2/2 + y^{p+1}/(p+1) along the singular orbit, -alpha z^2 - m^3 e^{2mt} y^2
};

constexpr std::string_view to_string(Energy e) noexcept {
  switch (e) {
    case Energy::Plane: return "E_plane";
    case Energy::Radial: return "E_radial";
    case Energy::Tilde: return "E_tilde";
  }
  return "?";
}

struct LyapunovReport {
  IdentityReport identity;  ///< worst per-step |Delta E - int dE| against the largest per-step dissipation
  bool monotone = false;    ///< E never increases by more than 10 tol max(1, |E|) between nodes
  double max_increase = 0.0;
  double initial = 0.0;
  double final = 0.0;
};

/**
 * Audit a Lyapunov function along a trajectory: per integrator step the change
 * in energy is compared with the Gauss-Legendre integral of its stated
 * derivative on the dense output, and global monotone decrease is checked.
 *
 * Throws FrameMismatch if the trajectory's frame does not match the energy.
 */
inline LyapunovReport lyapunov_audit(const DerivedConstants& c, const ode::Trajectory<2>& traj, Energy which,
                                     double tol = 1e-10) {
  const Frame want = which == Energy::Radial ? Frame::S : Frame::T;
  if (traj.frame() != want)
    fail(ErrorKind::FrameMismatch, std::string(to_string(which)) + " needs a " + std::string(to_string(want)) +
                                       "-frame trajectory, got " + std::string(to_string(traj.frame())));
  if (traj.num_nodes() < 2) fail(ErrorKind::ParameterDomain, "trajectory has no steps");
  const double p = c.p(), q = p + 1.0, N = c.N();
  double alpha = 0.0, m = 0.0;
  if (which != Energy::Radial) {
    const EmdenScaling& e = c.require_supercritical();
    alpha = e.alpha;
    m = e.m;
  }

  auto energy = [&](double x, const ode::State<2>& y) {
    const double pot = std::pow(y[0], q) / q;
    switch (which) {
      case Energy::Plane:
      case Energy::Radial: return 0.5 * y[1] * y[1] - 0.5 * y[0] * y[0] + pot;
      case Energy::Tilde: {
        const double beta = 1.0 + m * m * std::exp(2.0 * m * x);
        return 0.5 * y[1] * y[1] - 0.5 * beta * y[0] * y[0] + pot;
      }
    }
    return 0.0;
  };
  auto rate = [&](double x, const ode::State<2>& y) {
    switch (which) {
      case Energy::Plane: return -alpha * y[1] * y[1];
      case Energy::Radial: return -(N - 1.0) * y[1] * y[1] / x;
      case Energy::Tilde: return -alpha * y[1] * y[1] - m * m * m * std::exp(2.0 * m * x) * y[0] * y[0];
    }
    return 0.0;
  };

  LyapunovReport rep;
  rep.identity.name = std::string(to_string(which));
  rep.monotone = true;
  using GL = boost::math::quadrature::gauss<double, 7>;
  double worst = 0.0, worst_signed = 0.0, scale = 0.0;
  double E_prev = energy(traj.node_x(0), traj.node(0));
  rep.initial = E_prev;
  for (std::size_t i = 0; i + 1 < traj.num_nodes(); ++i) {
    const double a = traj.node_x(i), b = traj.node_x(i + 1);
    const double E_next = energy(b, traj.node(i + 1));
    const double integral = GL::integrate([&](double x) { return rate(x, traj.at(x)); }, a, b);
    const double mismatch = (E_next - E_prev) - integral;
    if (std::abs(mismatch) > worst) {
      worst = std::abs(mismatch);
      worst_signed = mismatch;
    }
    scale = std::max(scale, std::abs(integral));
    const double increase = E_next - E_prev;
    rep.max_increase = std::max(rep.max_increase, increase);
    if (increase > 10.0 * tol * std::max(1.0, std::abs(E_prev))) rep.monotone = false;
    E_prev = E_next;
  }
  rep.final = E_prev;
  rep.identity.residual = worst_signed;
  rep.identity.scale = scale;
  rep.identity.relative_residual = diagnostics::relative(worst, scale);
  return rep;
}

/// Smallest u over the nodes of a trajectory.
inline double min_value(const ode::Trajectory<2>& traj) {
  double v = traj.node(0)[0];
  for (std::size_t i = 1; i < traj.num_nodes(); ++i) v = std::min(v, traj.node(i)[0]);
  return v;
}

}  // namespace radbif

#endif  // RADBIF_DIAGNOSTICS_HPP
