#ifndef RADBIF_BRANCH_HPP
#define RADBIF_BRANCH_HPP

/**
 * @file branch.hpp
 * @brief Tracing lambda_n(gamma) over gamma, locating turning points and
 *        crossings of lambda_n*, and the intersection-number machinery that
 *        explains the oscillation.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "radbif/curves.hpp"
#include "radbif/error.hpp"
#include "radbif/params.hpp"
#include "radbif/shooting.hpp"
#include "radbif/singular.hpp"

namespace radbif {

struct GammaRange {
  double lo = 1e-4;
  double hi = 1e6;
  double exclusion = 1e-3;  ///< half-width of the excluded neighbourhood of gamma = 1
};

struct BranchSample {
  double gamma = 0.0;
  double lambda = 0.0;
  /// u(s_n*, gamma) - u*(s_n*) and u_s(s_n*, gamma); NaN unless lambda_n* is known and gamma > 1.
  double endpoint_gap = std::numeric_limits<double>::quiet_NaN();
  double endpoint_slope = std::numeric_limits<double>::quiet_NaN();
};

struct BranchCurve {
  int n = 1;
  std::vector<BranchSample> minus;  ///< gamma < 1, increasing gamma
  std::vector<BranchSample> plus;   ///< gamma > 1, increasing gamma
  std::optional<double> lambda_star;
  std::vector<double> turning_points;  ///< gamma where d lambda / d gamma changes sign
  std::vector<double> crossings;       ///< gamma > 1 where lambda_n - lambda_n* changes sign
  int evaluations = 0;

  std::vector<BranchSample> samples() const {
    std::vector<BranchSample> out = minus;
    out.insert(out.end(), plus.begin(), plus.end());
    return out;
  }
};

struct BranchOptions {
  double tol = 1e-10;
  int points_per_decade = 64;
  int budget = 20000;
  double max_relative_jump = 0.05;
  double crossing_rel_gamma = 1e-6;
  double crossing_rel_lambda = 1e-9;
  double turning_rel_gamma = 1e-4;
  /// Differences below this (relative to lambda) are shot noise: they neither
  /// make a turning point nor fix the sign of lambda - lambda_n*.
  double noise_rel_lambda = 1e-7;
  /// Singular profile supplying lambda_n*; computed internally when null and p > p_S
  /// (and left out if u* has fewer than n critical points).
  const SingularProfile* profile = nullptr;
};

namespace branch {

/// Shot whose trajectory reaches at least s_min.
inline ShotResult shoot_covering(const DerivedConstants& c, double gamma, int n, double s_min, double tol) {
  for (int extra = 0; extra <= 6; ++extra) {
    ShotResult r = shoot(c, gamma, n + extra, tol);
    if (r.trajectory.upper() >= s_min) return r;
  }
  fail(ErrorKind::HorizonExceeded, "shot does not reach s = " + std::to_string(s_min));
}

class Sampler {
 public:
  Sampler(const DerivedConstants& c, int n, const BranchOptions& opt, const SingularProfile* prof)
      : c_(c), n_(n), opt_(opt), prof_(prof) {}

  BranchSample operator()(double gamma) {
    if (++evaluations_ > opt_.budget)
      fail(ErrorKind::BudgetExceeded, "branch tracing exceeded " + std::to_string(opt_.budget) + " shots");
    BranchSample smp;
    smp.gamma = gamma;
    if (prof_ && gamma > 1.0) {
      const double s_star = prof_->s_star(n_);
      const ShotResult r = shoot_covering(c_, gamma, n_, s_star, opt_.tol);
      smp.lambda = r.criticals[n_ - 1].s * r.criticals[n_ - 1].s;
      const Sample u = r.trajectory.eval(s_star);
      smp.endpoint_gap = u.u - prof_->criticals_star[n_ - 1].value;
      smp.endpoint_slope = u.du;
    } else {
      smp.lambda = lambda_n(c_, gamma, n_, opt_.tol);
    }
    return smp;
  }

  int evaluations() const noexcept { return evaluations_; }

 private:
  const DerivedConstants& c_;
  int n_;
  const BranchOptions& opt_;
  const SingularProfile* prof_;
  int evaluations_ = 0;
};

inline double geometric_mid(double a, double b) { return std::sqrt(a * b); }

inline std::vector<double> log_grid(double a, double b, int per_decade) {
  const double decades = std::log10(b / a);
  const int n = std::max(8, static_cast<int>(std::ceil(per_decade * decades)) + 1);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  g.back() = b;
  return g;
}

inline void insert_sorted(std::vector<BranchSample>& v, const BranchSample& s) {
  auto it = std::lower_bound(v.begin(), v.end(), s.gamma,
                             [](const BranchSample& a, double g) { return a.gamma < g; });
  if (it != v.end() && it->gamma == s.gamma) return;
  v.insert(it, s);
}

/// Refine until adjacent lambdas differ by at most max_relative_jump.
inline void refine_jumps(std::vector<BranchSample>& v, Sampler& sample, double max_jump) {
  for (int pass = 0; pass < 40; ++pass) {
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double l0 = v[i].lambda, l1 = v[i + 1].lambda;
      const double rel = std::abs(l1 - l0) / std::min(std::abs(l0), std::abs(l1));
      if (rel > max_jump && v[i + 1].gamma / v[i].gamma - 1.0 > 1e-12)
        mids.push_back(geometric_mid(v[i].gamma, v[i + 1].gamma));
    }
    if (mids.empty()) return;
    for (double g : mids) insert_sorted(v, sample(g));
  }
}

/// Local extrema of lambda over the samples, each refined until the bracketing
/// spacing is below rel_gamma; returns the refined gamma of each extremum.
inline std::vector<double> locate_turning_points(std::vector<BranchSample>& v, Sampler& sample, double rel_gamma,
                                                 double rel_lambda) {
  std::vector<double> out;
  std::size_t i = 1;
  while (i + 1 < v.size()) {
    const double dl = v[i].lambda - v[i - 1].lambda;
    const double dr = v[i + 1].lambda - v[i].lambda;
    const bool flat = std::max(std::abs(dl), std::abs(dr)) <= rel_lambda * std::abs(v[i].lambda);
    if (flat || !((dl > 0.0 && dr < 0.0) || (dl < 0.0 && dr > 0.0))) {
      ++i;
      continue;
    }
    const bool is_max = dl > 0.0;
    double g_best = v[i].gamma;
    for (int it = 0; it < 60; ++it) {
      auto pos = std::lower_bound(v.begin(), v.end(), g_best, [](const BranchSample& a, double g) { return a.gamma < g; });
      const std::size_t k = static_cast<std::size_t>(pos - v.begin());
      if (k == 0 || k + 1 >= v.size()) break;
      const double ga = v[k - 1].gamma, gb = v[k + 1].gamma;
      if (gb / ga - 1.0 < rel_gamma) break;
      insert_sorted(v, sample(geometric_mid(ga, v[k].gamma)));
      insert_sorted(v, sample(geometric_mid(v[k].gamma, gb)));
      // Best of the five samples around the previous extremum.
      pos = std::lower_bound(v.begin(), v.end(), g_best, [](const BranchSample& a, double g) { return a.gamma < g; });
      const std::size_t c = static_cast<std::size_t>(pos - v.begin());
      const std::size_t lo = c >= 2 ? c - 2 : 0, hi = std::min(v.size() - 1, c + 2);
      std::size_t best = c;
      for (std::size_t j = lo; j <= hi; ++j)
        if (is_max ? v[j].lambda > v[best].lambda : v[j].lambda < v[best].lambda) best = j;
      g_best = v[best].gamma;
    }
    out.push_back(g_best);
    auto pos = std::lower_bound(v.begin(), v.end(), g_best, [](const BranchSample& a, double g) { return a.gamma < g; });
    i = static_cast<std::size_t>(pos - v.begin()) + 1;
  }
  return out;
}

/// Sign changes of lambda - lambda_star along v, each bisected to the requested accuracy.
/// Samples within noise_rel * lambda_star of lambda_star carry no sign.
inline std::vector<double> locate_crossings(std::vector<BranchSample>& v, Sampler& sample, double lambda_star,
                                            double rel_gamma, double rel_lambda, double noise_rel) {
  struct Bracket {
    double ga, gb, fa, fb;
  };
  std::vector<Bracket> brackets;
  const double floor = noise_rel * std::abs(lambda_star);
  const BranchSample* last = nullptr;
  for (const auto& smp : v) {
    if (std::abs(smp.lambda - lambda_star) <= floor) continue;
    if (last && (last->lambda < lambda_star) != (smp.lambda < lambda_star))
      brackets.push_back({last->gamma, smp.gamma, last->lambda - lambda_star, smp.lambda - lambda_star});
    last = &smp;
  }
  std::vector<double> out;
  for (auto [ga, gb, fa, fb] : brackets) {
    while (gb / ga - 1.0 > rel_gamma && std::min(std::abs(fa), std::abs(fb)) > rel_lambda * lambda_star) {
      const double gm = geometric_mid(ga, gb);
      const BranchSample sm = sample(gm);
      insert_sorted(v, sm);
      const double fm = sm.lambda - lambda_star;
      if ((fm < 0.0) == (fa < 0.0)) {
        ga = gm;
        fa = fm;
      } else {
        gb = gm;
        fb = fm;
      }
    }
    // Linear interpolation in log gamma inside the final bracket.
    const double la = std::log(ga), lb = std::log(gb);
    const double w = fa == fb ? 0.5 : fa / (fa - fb);
    out.push_back(std::exp(la + w * (lb - la)));
  }
  return out;
}

}  // namespace branch

/**
 * Sample lambda_n(gamma) on both sub-branches (gamma < 1 and gamma > 1) of a
 * log-spaced grid, refined near large jumps, turning points and crossings of
 * lambda_n*.
 */
inline BranchCurve trace_branch(const DerivedConstants& c, int n, const GammaRange& range,
                                const BranchOptions& opt = {}) {
  if (n < 1) fail(ErrorKind::ParameterDomain, "branch index must be >= 1");
  if (!(range.lo > 0.0 && range.hi > range.lo))
    fail(ErrorKind::ParameterDomain, "gamma range must satisfy 0 < lo < hi");
  if (range.exclusion < 1e-4)
    fail(ErrorKind::ParameterDomain, "the neighbourhood of gamma = 1 excluded from the sweep must have radius >= 1e-4");

  std::optional<SingularProfile> own;
  const SingularProfile* prof = opt.profile;
  if (!prof && is_supercritical(c.regime)) {
    // Without n critical points of u* (node regime) there is no lambda_n* to compare with.
    try {
      own = compute_singular(c, n, opt.tol);
      prof = &*own;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HorizonExceeded) throw;
    }
  }

  BranchCurve curve;
  curve.n = n;
  if (prof) curve.lambda_star = prof->lambda_star(n);

  branch::Sampler sample(c, n, opt, prof);

  auto build = [&](double a, double b) {
    std::vector<BranchSample> v;
    if (!(b > a)) return v;
    for (double g : branch::log_grid(a, b, opt.points_per_decade)) v.push_back(sample(g));
    branch::refine_jumps(v, sample, opt.max_relative_jump);
    return v;
  };

  curve.minus = build(range.lo, std::min(range.hi, 1.0 - range.exclusion));
  curve.plus = build(std::max(range.lo, 1.0 + range.exclusion), range.hi);

  for (auto* side : {&curve.minus, &curve.plus}) {
    for (double g : branch::locate_turning_points(*side, sample, opt.turning_rel_gamma, opt.noise_rel_lambda))
      curve.turning_points.push_back(g);
  }
  std::sort(curve.turning_points.begin(), curve.turning_points.end());

  if (curve.lambda_star)
    curve.crossings = branch::locate_crossings(curve.plus, sample, *curve.lambda_star, opt.crossing_rel_gamma,
                                               opt.crossing_rel_lambda, opt.noise_rel_lambda);

  curve.evaluations = sample.evaluations();
  return curve;
}

enum class OscillationStatus { Oscillating, NoCrossingFound };

struct EndpointCrossing {
  double gamma = 0.0;            ///< u(s_n*, gamma) = u*(s_n*)
  double slope = 0.0;            ///< u_s(s_n*, gamma)
  double lambda_minus_star = 0.0;
  bool parity_ok = false;
};

struct OscillationReport {
  int n = 1;
  OscillationStatus status = OscillationStatus::NoCrossingFound;
  std::vector<double> crossing_gammas;
  std::vector<int> signs_after;  ///< sign of lambda_n - lambda_n* after each crossing
  bool alternating = false;
  std::vector<EndpointCrossing> endpoint_crossings;
  bool matches_S1E8 = false;
};

namespace branch {

/// Expected sign of lambda_n - lambda_n* when u(., gamma) meets u* at s_n* with slope `slope`.
inline int expected_parity_sign(int n, double slope) {
  const int s = slope < 0.0 ? 1 : -1;  // odd n: still descending at the minimum => lambda_n > lambda_n*
  return n % 2 == 1 ? s : -s;
}

}  // namespace branch

/**
 * Sign changes of lambda_n - lambda_n* on the gamma > 1 sub-branch and the
 * parity rule tying each sign to the way u(., gamma) meets u* at s_n*.
 *
 * In the spiral regime a curve without crossings is an error; for other
 * regimes the report carries NoCrossingFound.
 */
inline OscillationReport detect_oscillation(const DerivedConstants& c, const BranchCurve& curve,
                                            const SingularProfile& profile, const BranchOptions& opt = {}) {
  if (curve.plus.empty() || curve.plus.back().gamma < 1e5)
    fail(ErrorKind::ParameterDomain, "oscillation detection needs the branch sampled up to gamma >= 1e5");
  const int n = curve.n;

  OscillationReport rep;
  rep.n = n;
  rep.crossing_gammas = curve.crossings;
  if (rep.crossing_gammas.empty()) {
    if (c.regime == Regime::SupercriticalSpiral)
      fail(ErrorKind::NoCrossingFound, "no crossing of lambda_" + std::to_string(n) + "* in the spiral regime");
    return rep;
  }
  const double lstar = profile.lambda_star(n);
  rep.status = OscillationStatus::Oscillating;

  auto sign_at = [&](double lo, double hi) {
    // Sign of lambda - lambda* at the sample farthest from both ends of (lo, hi).
    int sg = 0;
    double best = -1.0;
    for (const auto& s : curve.plus) {
      if (s.gamma <= lo || s.gamma >= hi) continue;
      const double d = std::min(s.gamma / lo, hi / s.gamma);
      if (d > best && s.lambda != lstar) {
        best = d;
        sg = s.lambda > lstar ? 1 : -1;
      }
    }
    return sg;
  };
  const auto& cg = rep.crossing_gammas;
  for (std::size_t i = 0; i < cg.size(); ++i) {
    const double hi = i + 1 < cg.size() ? cg[i + 1] : std::numeric_limits<double>::infinity();
    rep.signs_after.push_back(sign_at(cg[i], hi));
  }
  rep.alternating = true;
  for (std::size_t i = 0; i < rep.signs_after.size(); ++i) {
    if (rep.signs_after[i] == 0) rep.alternating = false;
    if (i > 0 && rep.signs_after[i] != -rep.signs_after[i - 1]) rep.alternating = false;
  }

  // Gammas where u(., gamma) meets u* exactly at s_n*.
  const double s_star = profile.s_star(n);
  const double u_star_val = profile.criticals_star[n - 1].value;
  auto gap = [&](double g) {
    const ShotResult r = branch::shoot_covering(c, g, n, s_star, opt.tol);
    return r.trajectory.eval(s_star).u - u_star_val;
  };
  rep.matches_S1E8 = true;
  for (std::size_t i = 0; i + 1 < curve.plus.size(); ++i) {
    const double a = curve.plus[i].endpoint_gap, b = curve.plus[i + 1].endpoint_gap;
    if (std::isnan(a) || std::isnan(b) || (a < 0.0) == (b < 0.0)) continue;
    auto done = [&](double lo, double hi) { return hi / lo - 1.0 <= opt.crossing_rel_gamma; };
    const auto [lo, hi] = roots::bisect(gap, curve.plus[i].gamma, curve.plus[i + 1].gamma, a, done);
    EndpointCrossing ec;
    ec.gamma = branch::geometric_mid(lo, hi);
    const ShotResult r = branch::shoot_covering(c, ec.gamma, n, s_star, opt.tol);
    ec.slope = r.trajectory.eval(s_star).du;
    const double sn = r.criticals[n - 1].s;
    ec.lambda_minus_star = sn * sn - lstar;
    const int actual = ec.lambda_minus_star > 0.0 ? 1 : -1;
    ec.parity_ok = actual == branch::expected_parity_sign(n, ec.slope);
    rep.matches_S1E8 = rep.matches_S1E8 && ec.parity_ok;
    rep.endpoint_crossings.push_back(ec);
  }
  if (rep.endpoint_crossings.empty()) rep.matches_S1E8 = false;
  return rep;
}

struct IntersectionCount {
  double gamma = 0.0;
  int Z = 0;
};

/// Z_(0, s_n*] [u* - u(., gamma)] for each gamma.
inline std::vector<IntersectionCount> intersection_growth(const DerivedConstants& c, const SingularProfile& profile,
                                                          const std::vector<double>& gammas, int n,
                                                          double tol = 1e-10, int refine = 3) {
  const double s_star = profile.s_star(n);
  std::vector<IntersectionCount> out;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 1.0) || (i > 0 && !(gammas[i] > gammas[i - 1])))
      fail(ErrorKind::ParameterDomain, "gammas must be increasing and > 1");
    const ShotResult r = branch::shoot_covering(c, gammas[i], n, s_star, tol);
    out.push_back({gammas[i], count_sign_changes(profile.u_star, r.trajectory, 0.0, s_star, refine)});
  }
  return out;
}

struct ProfileDistance {
  double value = 0.0;       ///< sup |u - u*|
  double derivative = 0.0;  ///< sup |u' - u*'|
};

/// Sup distances between u(., gamma) and u* on a 1000-point grid over [a, b].
inline ProfileDistance convergence_profile(const DerivedConstants& c, const SingularProfile& profile, double gamma,
                                           double a, double b, double tol = 1e-10) {
  if (!(a > 0.0 && b > a)) fail(ErrorKind::ParameterDomain, "window must satisfy 0 < a < b");
  const ShotResult r = branch::shoot_covering(c, gamma, 1, b, tol);
  if (a < r.trajectory.lower()) fail(ErrorKind::IntervalNotCovered, "window starts below the shot's start offset");
  ProfileDistance d;
  constexpr int kPoints = 1000;
  for (int i = 0; i < kPoints; ++i) {
    const double s = a + (b - a) * i / (kPoints - 1.0);
    const Sample u = r.trajectory.eval(s);
    const Sample us = profile.u_star.eval(s);
    d.value = std::max(d.value, std::abs(u.u - us.u));
    d.derivative = std::max(d.derivative, std::abs(u.du - us.du));
  }
  return d;
}

}  // namespace radbif

#endif  // RADBIF_BRANCH_HPP
