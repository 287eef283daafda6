#ifndef RADBIF_PARAMS_HPP
#define RADBIF_PARAMS_HPP

/**
 * @file params.hpp
 * @brief Model parameters (p, N) of  u'' + (N-1)/s u' - u + u^p = 0  and every
 *        closed-form constant derived from them.
 *
 * All other headers take a DerivedConstants and never recompute these
 * quantities on their own.
 */

#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "radbif/error.hpp"

namespace radbif {

/// Relative tolerance used to decide the boundary cases p = p_S and p = p_JL.
inline constexpr double kBoundaryRelTol = 1e-12;

/// A real number or +infinity, compared exactly against finite doubles.
class ExtendedReal {
 public:
  static constexpr ExtendedReal infinity() noexcept { return ExtendedReal(0.0, true); }
  static constexpr ExtendedReal finite(double v) noexcept { return ExtendedReal(v, false); }

  constexpr bool is_infinite() const noexcept { return infinite_; }

  double value() const {
    if (infinite_) fail(ErrorKind::ParameterDomain, "value() on an infinite ExtendedReal");
    return value_;
  }

  /// Finite value, or IEEE +inf when infinite (for printing only).
  double as_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, double b) noexcept {
    if (a.infinite_) return std::partial_ordering::greater;
    return a.value_ <=> b;
  }
  friend constexpr bool operator==(const ExtendedReal& a, double b) noexcept {
    return !a.infinite_ && a.value_ == b;
  }

 private:
  constexpr ExtendedReal(double v, bool inf) noexcept : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

enum class Regime {
  Subcritical,
  Critical,
  SupercriticalSpiral,
  SupercriticalNode,
  SupercriticalDegenerate,
};

constexpr std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::SupercriticalSpiral: return "SupercriticalSpiral";
    case Regime::SupercriticalNode: return "SupercriticalNode";
    case Regime::SupercriticalDegenerate: return "SupercriticalDegenerate";
  }
  return "Unknown";
}

constexpr bool is_supercritical(Regime r) noexcept {
  return r == Regime::SupercriticalSpiral || r == Regime::SupercriticalNode ||
         r == Regime::SupercriticalDegenerate;
}

struct ModelParams {
  double p = 0.0;
  int N = 0;

  /// Validates p > 1 and N >= 3.
  static ModelParams make(double p, int N) {
    if (!(p > 1.0) || !std::isfinite(p))
      fail(ErrorKind::ParameterDomain, "exponent p must be a finite real > 1, got " + std::to_string(p));
    if (N < 3) fail(ErrorKind::ParameterDomain, "dimension N must be >= 3, got " + std::to_string(N));
    return ModelParams{p, N};
  }
};

/// Constants of the Emden change of variables y = A^{-1} s^theta u(s), t = log(s)/m.
/// They exist only when theta (N-2-theta) > 0, i.e. p > N/(N-2).
struct EmdenScaling {
  double A = 0.0;      ///< singular amplitude {theta(N-2-theta)}^{1/(p-1)}
  double m = 0.0;      ///< {theta(N-2-theta)}^{-1/2}
  double m_alt = 0.0;  ///< A^{-(p-1)/2}; equals m up to rounding
  double alpha = 0.0;  ///< damping m(N-2-2 theta)
};

struct DerivedConstants {
  ModelParams params;
  double theta = 0.0;  ///< 2/(p-1)
  double p_S = 0.0;    ///< (N+2)/(N-2)
  ExtendedReal p_JL = ExtendedReal::infinity();
  std::optional<EmdenScaling> emden;
  Regime regime = Regime::Subcritical;

  double p() const noexcept { return params.p; }
  int N() const noexcept { return params.N; }

  const EmdenScaling& scaling() const {
    if (!emden)
      fail(ErrorKind::ParameterDomain, "Emden scaling undefined: need p > N/(N-2)");
    return *emden;
  }

  /// Throws unless p > p_S; returns the Emden scaling.
  const EmdenScaling& require_supercritical() const {
    if (!is_supercritical(regime))
      fail(ErrorKind::ParameterDomain, "operation requires p > p_S = " + std::to_string(p_S) +
                                           ", got p = " + std::to_string(params.p));
    return scaling();
  }
};

/// f(u) = -u + u^p.
inline double nonlinearity(double p, double u) { return -u + std::pow(u, p); }
/// f'(u) = -1 + p u^{p-1}.
inline double nonlinearity_prime(double p, double u) { return -1.0 + p * std::pow(u, p - 1.0); }

inline double sobolev_exponent(int N) { return (N + 2.0) / (N - 2.0); }

inline ExtendedReal joseph_lundgren_exponent(int N) {
  if (N <= 10) return ExtendedReal::infinity();
  return ExtendedReal::finite(1.0 + 4.0 / (N - 4.0 - 2.0 * std::sqrt(N - 1.0)));
}

inline DerivedConstants derive(const ModelParams& in) {
  const ModelParams prm = ModelParams::make(in.p, in.N);
  const double p = prm.p;
  const int N = prm.N;

  DerivedConstants c;
  c.params = prm;
  c.theta = 2.0 / (p - 1.0);
  c.p_S = sobolev_exponent(N);
  c.p_JL = joseph_lundgren_exponent(N);

  const double q = c.theta * (N - 2.0 - c.theta);
  if (q > 0.0) {
    EmdenScaling e;
    e.A = std::pow(q, 1.0 / (p - 1.0));
    e.m = 1.0 / std::sqrt(q);
    e.m_alt = std::pow(e.A, -(p - 1.0) / 2.0);
    e.alpha = e.m * (N - 2.0 - 2.0 * c.theta);
    c.emden = e;
  }

  // p = p_S  <=>  N - 2 - 2 theta = 0.
  const double crit_gap = N - 2.0 - 2.0 * c.theta;
  if (std::abs(crit_gap) <= kBoundaryRelTol * (N - 2.0)) {
    c.regime = Regime::Critical;
  } else if (crit_gap < 0.0) {
    c.regime = Regime::Subcritical;
  } else {
    // alpha^2 - 4(p-1) decides the type of the equilibrium (1,0).
    const double alpha = c.emden->alpha;
    const double disc = alpha * alpha - 4.0 * (p - 1.0);
    if (std::abs(disc) <= kBoundaryRelTol * 4.0 * (p - 1.0))
      c.regime = Regime::SupercriticalDegenerate;
    else if (disc < 0.0)
      c.regime = Regime::SupercriticalSpiral;
    else
      c.regime = Regime::SupercriticalNode;
  }
  return c;
}

inline DerivedConstants derive(double p, int N) { return derive(ModelParams{p, N}); }

enum class FocusType { Spiral, Node, DegenerateNode };

constexpr std::string_view to_string(FocusType f) noexcept {
  switch (f) {
    case FocusType::Spiral: return "spiral";
    case FocusType::Node: return "node";
    case FocusType::DegenerateNode: return "degenerate";
  }
  return "unknown";
}

/// Linearization of y' = z, z' = -alpha z + y - y^p at its two equilibria.
struct EquilibriumReport {
  double saddle_unstable = 0.0;  ///< m theta
  double saddle_stable = 0.0;    ///< -m (N-2-theta)
  double focus_discriminant = 0.0;  ///< alpha^2 - 4(p-1)
  FocusType focus = FocusType::Spiral;
};

inline EquilibriumReport classify_equilibrium(const DerivedConstants& c) {
  const EmdenScaling& e = c.require_supercritical();
  EquilibriumReport r;
  r.saddle_unstable = e.m * c.theta;
  r.saddle_stable = -e.m * (c.N() - 2.0 - c.theta);
  r.focus_discriminant = e.alpha * e.alpha - 4.0 * (c.p() - 1.0);
  switch (c.regime) {
    case Regime::SupercriticalNode: r.focus = FocusType::Node; break;
    case Regime::SupercriticalDegenerate: r.focus = FocusType::DegenerateNode; break;
    default: r.focus = FocusType::Spiral; break;
  }
  return r;
}

}  // namespace radbif

#endif  // RADBIF_PARAMS_HPP
