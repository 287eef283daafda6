#ifndef RADBIF_ODE_HPP
#define RADBIF_ODE_HPP

/**
 * @file ode.hpp
 * @brief Adaptive Dormand–Prince 5(4) integrator with continuous 4th-order
 *        dense output and event localization on the interpolant.
 *
 * A Trajectory stores every accepted step together with its interpolation
 * coefficients, so it can be evaluated anywhere on its range after the fact.
 * Trajectories can be re-expressed in a linearly rescaled frame
 * (x -> c_x x, y_i -> c_i y_i) without copying the step data; this is how
 * shots computed in the Rho frame are presented in the S frame.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "radbif/error.hpp"
#include "radbif/frame.hpp"
#include "radbif/roots.hpp"

namespace radbif::ode {

template <std::size_t D>
using State = std::array<double, D>;

/// Value and first derivative of a scalar profile at one abscissa.
struct Sample {
  double u = 0.0;
  double du = 0.0;
};

template <std::size_t D>
struct Step {
  double x0 = 0.0;
  double x1 = 0.0;
  State<D> y0{};
  State<D> y1{};
  // Dense-output coefficients (Hairer's rcont3..rcont5); rcont1 = y0, rcont2 = y1 - y0.
  State<D> c3{};
  State<D> c4{};
  State<D> c5{};

  State<D> interpolate(double x) const {
    if (x == x0) return y0;
    if (x == x1) return y1;
    const double th = (x - x0) / (x1 - x0);
    const double th1 = 1.0 - th;
    State<D> out{};
    for (std::size_t i = 0; i < D; ++i) {
      const double c2 = y1[i] - y0[i];
      out[i] = y0[i] + th * (c2 + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
    }
    return out;
  }

  /// d/dx of the interpolant.
  State<D> interpolate_derivative(double x) const {
    const double h = x1 - x0;
    const double th = (x - x0) / h;
    const double th1 = 1.0 - th;
    State<D> out{};
    for (std::size_t i = 0; i < D; ++i) {
      const double c2 = y1[i] - y0[i];
      const double P = c3[i] + th * (c4[i] + th1 * c5[i]);
      const double dP = c4[i] + (1.0 - 2.0 * th) * c5[i];
      const double Q = c2 + th1 * P;
      const double dQ = -P + th1 * dP;
      out[i] = (Q + th * dQ) / h;
    }
    return out;
  }
};

/// Immutable dense solution curve. Cheap to copy (shared step storage).
template <std::size_t D>
class Trajectory {
 public:
  Trajectory() = default;

  Trajectory(Frame frame, std::vector<Step<D>> steps) : frame_(frame) {
    auto d = std::make_shared<Data>();
    d->steps = std::move(steps);
    data_ = std::move(d);
    comp_scale_.fill(1.0);
  }

  Frame frame() const noexcept { return frame_; }
  bool empty() const noexcept { return !data_ || data_->steps.empty(); }
  std::size_t num_steps() const noexcept { return data_ ? data_->steps.size() : 0; }
  std::size_t num_nodes() const noexcept { return empty() ? 0 : num_steps() + 1; }

  double lower() const { return map_x(data_->steps.front().x0); }
  double upper() const { return map_x(data_->steps.back().x1); }

  /// Abscissa of node i (i = 0 .. num_nodes()-1) in the presented frame.
  double node_x(std::size_t i) const {
    const auto& s = data_->steps;
    return i < s.size() ? map_x(s[i].x0) : map_x(s.back().x1);
  }
  State<D> node(std::size_t i) const {
    const auto& s = data_->steps;
    return map_y(i < s.size() ? s[i].y0 : s.back().y1);
  }

  std::vector<double> breakpoints() const {
    std::vector<double> out;
    out.reserve(num_nodes());
    for (std::size_t i = 0; i < num_nodes(); ++i) out.push_back(node_x(i));
    return out;
  }

  bool covers(double x) const {
    if (empty()) return false;
    const double lo = lower(), hi = upper();
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    return x >= lo - slack && x <= hi + slack;
  }

  /// Dense-output state at x (presented frame).
  State<D> at(double x) const { return map_y(step_for(x).interpolate(clamp_raw(unmap_x(x)))); }

  /// d/dx of the dense output at x (presented frame).
  State<D> derivative_at(double x) const {
    const auto& st = step_for(x);
    State<D> d = st.interpolate_derivative(clamp_raw(unmap_x(x)));
    for (std::size_t i = 0; i < D; ++i) d[i] *= comp_scale_[i] / x_scale_;
    return d;
  }

  /// Scalar view: component 0 as the value, component 1 as its derivative.
  Sample eval(double x) const
    requires(D == 2)
  {
    const State<D> y = at(x);
    return {y[0], y[1]};
  }

  /// Same steps presented in another frame: x' = x_scale x, y'_i = comp_scale_i y_i.
  Trajectory rescaled(Frame frame, double x_scale, const State<D>& comp_scale) const {
    Trajectory out = *this;
    out.frame_ = frame;
    out.x_scale_ = x_scale_ * x_scale;
    for (std::size_t i = 0; i < D; ++i) out.comp_scale_[i] = comp_scale_[i] * comp_scale[i];
    return out;
  }

  /// Scalar second-order rescaling: x' = x_scale x, u' = u_scale u, du'/dx' = u_scale/x_scale du/dx.
  Trajectory rescaled(Frame frame, double x_scale, double u_scale) const
    requires(D == 2)
  {
    return rescaled(frame, x_scale, State<2>{u_scale, u_scale / x_scale});
  }

  const std::vector<Step<D>>& raw_steps() const { return data_->steps; }
  double x_scale() const noexcept { return x_scale_; }

 private:
  struct Data {
    std::vector<Step<D>> steps;
  };

  double map_x(double raw) const { return raw * x_scale_; }
  double unmap_x(double x) const { return x / x_scale_; }
  State<D> map_y(State<D> y) const {
    for (std::size_t i = 0; i < D; ++i) y[i] *= comp_scale_[i];
    return y;
  }
  double clamp_raw(double raw) const {
    const auto& s = data_->steps;
    return std::clamp(raw, s.front().x0, s.back().x1);
  }

  const Step<D>& step_for(double x) const {
    if (!covers(x))
      fail(ErrorKind::IntervalNotCovered, "abscissa " + std::to_string(x) + " outside trajectory range [" +
                                              std::to_string(lower()) + ", " + std::to_string(upper()) + "]");
    const double raw = clamp_raw(unmap_x(x));
    const auto& s = data_->steps;
    auto it = std::lower_bound(s.begin(), s.end(), raw, [](const Step<D>& st, double v) { return st.x1 < v; });
    if (it == s.end()) --it;
    return *it;
  }

  Frame frame_ = Frame::S;
  std::shared_ptr<const Data> data_;
  double x_scale_ = 1.0;
  State<D> comp_scale_{};
};

enum class EventKind { DerivativeZero, ValueCrossing, CurveCrossing, Custom };
enum class Direction { Any, Up, Down };

/// What to look for during integration. All event functions see the raw
/// integration frame (abscissa and state as integrated).
template <std::size_t D>
struct EventSpec {
  EventKind kind = EventKind::DerivativeZero;
  Direction direction = Direction::Any;
  double level = 0.0;
  std::function<double(double)> reference;                   // CurveCrossing
  std::function<double(double, const State<D>&)> function;   // Custom
  int terminal_after = 0;  ///< stop after this many hits; 0 = never stop

  static EventSpec derivative_zero(Direction dir = Direction::Any, int terminal_after = 0) {
    EventSpec e;
    e.kind = EventKind::DerivativeZero;
    e.direction = dir;
    e.terminal_after = terminal_after;
    return e;
  }
  static EventSpec value_crossing(double level, Direction dir = Direction::Any, int terminal_after = 0) {
    if (!std::isfinite(level)) fail(ErrorKind::ParameterDomain, "event level must be finite");
    EventSpec e;
    e.kind = EventKind::ValueCrossing;
    e.level = level;
    e.direction = dir;
    e.terminal_after = terminal_after;
    return e;
  }
  static EventSpec curve_crossing(std::function<double(double)> ref, Direction dir = Direction::Any,
                                  int terminal_after = 0) {
    EventSpec e;
    e.kind = EventKind::CurveCrossing;
    e.reference = std::move(ref);
    e.direction = dir;
    e.terminal_after = terminal_after;
    return e;
  }
  static EventSpec custom(std::function<double(double, const State<D>&)> g, Direction dir = Direction::Any,
                          int terminal_after = 0) {
    EventSpec e;
    e.kind = EventKind::Custom;
    e.function = std::move(g);
    e.direction = dir;
    e.terminal_after = terminal_after;
    return e;
  }

  double operator()(double x, const State<D>& y) const {
    switch (kind) {
      case EventKind::DerivativeZero: return y[1];
      case EventKind::ValueCrossing: return y[0] - level;
      case EventKind::CurveCrossing: return y[0] - reference(x);
      case EventKind::Custom: return function(x, y);
    }
    return 0.0;
  }
};

template <std::size_t D>
struct EventHit {
  std::size_t spec_index = 0;
  double x = 0.0;      ///< raw integration abscissa
  State<D> y{};
  Direction crossing = Direction::Up;  ///< Up: event function went from - to +
};

struct Options {
  double tol = 1e-10;        ///< rtol, and atol before per-component scaling
  double h_initial = 0.0;    ///< 0 selects automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

template <std::size_t D>
struct IntegrationResult {
  Trajectory<D> trajectory;
  std::vector<EventHit<D>> hits;
  bool stopped_by_event = false;
};

namespace detail {

template <std::size_t D>
double error_norm(const State<D>& e, const State<D>& y0, const State<D>& y1, double rtol,
                  const State<D>& atol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double sc = atol[i] + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = e[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / D);
}

template <std::size_t D>
bool all_finite(const State<D>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/**
 * Integrate y' = rhs(x, y) from x0 to x_end (x0 < x_end).
 *
 * atol_scale multiplies opt.tol per component to form the absolute tolerance;
 * rtol is opt.tol. Events are checked on the dense output of every accepted
 * step (four interior probes) and localized to 1e-12 max(1, |x|).
 */
template <std::size_t D, class Rhs>
IntegrationResult<D> integrate(Rhs&& rhs, Frame frame, double x0, const State<D>& y0, double x_end,
                               const Options& opt, std::span<const EventSpec<D>> events = {},
                               const State<D>& atol_scale = [] {
                                 State<D> s;
                                 s.fill(1.0);
                                 return s;
                               }()) {
  if (!(opt.tol >= 1e-13 && opt.tol <= 1e-6))
    fail(ErrorKind::ParameterDomain, "tolerance must lie in [1e-13, 1e-6], got " + std::to_string(opt.tol));
  if (!(x0 < x_end)) fail(ErrorKind::ParameterDomain, "integration requires x0 < x_end");
  if (!detail::all_finite(y0)) fail(ErrorKind::NonFiniteState, "non-finite initial state");

  // Dormand–Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const double rtol = opt.tol;
  State<D> atol;
  for (std::size_t i = 0; i < D; ++i) atol[i] = opt.tol * atol_scale[i];

  auto axpy = [](const State<D>& y, double h, std::initializer_list<std::pair<double, const State<D>*>> terms) {
    State<D> out = y;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < D; ++i) out[i] += h * c * (*k)[i];
    return out;
  };

  double x = x0;
  State<D> y = y0;
  State<D> k1 = rhs(x, y);
  if (!detail::all_finite(k1)) fail(ErrorKind::NonFiniteState, "non-finite derivative at start");

  // Initial step (Hairer, Nørsett & Wanner, II.4).
  double h = opt.h_initial;
  if (h <= 0.0) {
    double dn0 = 0.0, dn1 = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double sc = atol[i] + rtol * std::abs(y[i]);
      dn0 += (y[i] / sc) * (y[i] / sc);
      dn1 += (k1[i] / sc) * (k1[i] / sc);
    }
    dn0 = std::sqrt(dn0 / D);
    dn1 = std::sqrt(dn1 / D);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 * std::max(1.0, std::abs(x)) : 0.01 * dn0 / dn1;
    h0 = std::min(h0, x_end - x);
    const State<D> y1 = axpy(y, h0, {{1.0, &k1}});
    const State<D> f1 = rhs(x + h0, y1);
    double dn2 = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double sc = atol[i] + rtol * std::abs(y[i]);
      const double r = (f1[i] - k1[i]) / sc;
      dn2 += r * r;
    }
    dn2 = std::sqrt(dn2 / D) / h0;
    const double dmax = std::max(dn1, dn2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, 1e-3 * h0) : std::pow(0.01 / dmax, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.h_max, x_end - x});

  std::vector<Step<D>> steps;
  std::vector<EventHit<D>> hits;
  std::vector<int> hit_counts(events.size(), 0);
  std::vector<double> g_prev(events.size());
  for (std::size_t j = 0; j < events.size(); ++j) g_prev[j] = events[j](x, y);

  bool stopped = false;
  bool last_rejected = false;
  std::size_t n_steps = 0;

  while (x < x_end && !stopped) {
    if (++n_steps > opt.max_steps)
      fail(ErrorKind::MaxStepsExceeded, "exceeded " + std::to_string(opt.max_steps) + " steps at x = " +
                                            std::to_string(x));
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
    if (h <= h_min || h <= std::numeric_limits<double>::min())
      fail(ErrorKind::StepSizeUnderflow, "step size underflow at x = " + std::to_string(x));
    if (x + h > x_end || x_end - (x + h) < h_min) h = x_end - x;

    const State<D> k2 = rhs(x + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State<D> k3 = rhs(x + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State<D> k4 = rhs(x + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<D> k5 = rhs(x + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const double xph = x + h;
    const State<D> k6 = rhs(xph, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<D> ynew = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State<D> k7 = rhs(xph, ynew);

    State<D> err;
    for (std::size_t i = 0; i < D; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const bool finite = detail::all_finite(ynew) && detail::all_finite(k7);
    const double en = finite ? detail::error_norm(err, y, ynew, rtol, atol) : std::numeric_limits<double>::infinity();

    if (!(en <= 1.0)) {
      // Reject; a non-finite trial state just shrinks the step.
      h *= finite ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.25;
      last_rejected = true;
      continue;
    }

    Step<D> st;
    st.x0 = x;
    st.x1 = xph;
    st.y0 = y;
    st.y1 = ynew;
    for (std::size_t i = 0; i < D; ++i) {
      const double dy = ynew[i] - y[i];
      const double bspl = h * k1[i] - dy;
      st.c3[i] = bspl;
      st.c4[i] = dy - h * k7[i] - bspl;
      st.c5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    // Event probes on the dense output.
    if (!events.empty()) {
      std::vector<EventHit<D>> step_hits;
      constexpr std::array<double, 4> probes{0.25, 0.5, 0.75, 1.0};
      for (std::size_t j = 0; j < events.size(); ++j) {
        const auto& ev = events[j];
        double xa = x;
        double ga = g_prev[j];
        for (double th : probes) {
          const double xb = th == 1.0 ? xph : x + th * h;
          const double gb = ev(xb, th == 1.0 ? ynew : st.interpolate(xb));
          const bool up = ga < 0.0 && gb >= 0.0;
          const bool down = ga > 0.0 && gb <= 0.0;
          if (up || down) {
            const Direction dir = up ? Direction::Up : Direction::Down;
            if (ev.direction == Direction::Any || ev.direction == dir) {
              auto g = [&](double xx) { return ev(xx, st.interpolate(xx)); };
              auto width = [](double xx) { return 1e-12 * std::max(1.0, std::abs(xx)); };
              const double xr = roots::bracketed(g, xa, xb, ga, gb, width);
              step_hits.push_back(EventHit<D>{j, xr, st.interpolate(xr), dir});
            }
          }
          xa = xb;
          ga = gb;
        }
        g_prev[j] = ga;
      }
      std::sort(step_hits.begin(), step_hits.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
      for (const auto& hit : step_hits) {
        hits.push_back(hit);
        const int target = events[hit.spec_index].terminal_after;
        if (target > 0 && ++hit_counts[hit.spec_index] >= target) {
          stopped = true;
          break;
        }
      }
    }

    steps.push_back(st);
    x = xph;
    y = ynew;
    k1 = k7;

    double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
    last_rejected = false;
    h = std::min(h * fac, opt.h_max);
  }

  return IntegrationResult<D>{Trajectory<D>(frame, std::move(steps)), std::move(hits), stopped};
}

}  // namespace radbif::ode

#endif  // RADBIF_ODE_HPP
