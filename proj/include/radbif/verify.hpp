#ifndef RADBIF_VERIFY_HPP
#define RADBIF_VERIFY_HPP

/**
 * @file verify.hpp
 * @brief Desk-scale invariant suite for one (p, N): each check reports
 *        pass, fail or not-applicable (regime-gated) with the measured value.
 */

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "radbif/branch.hpp"
#include "radbif/diagnostics.hpp"
#include "radbif/layer1d.hpp"
#include "radbif/params.hpp"
#include "radbif/shooting.hpp"
#include "radbif/singular.hpp"

namespace radbif {

enum class CheckStatus { Pass, Fail, NotApplicable };

constexpr std::string_view to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct VerifyReport {
  double p = 0.0;
  int N = 0;
  Regime regime = Regime::Subcritical;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) return false;
    return true;
  }
  const Check* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace verify {

inline Check below(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value < threshold ? CheckStatus::Pass : CheckStatus::Fail, value, threshold,
          std::move(detail)};
}

inline Check truth(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, ok ? 1.0 : 0.0, 1.0, std::move(detail)};
}

inline Check skipped(std::string name, std::string why) {
  return {std::move(name), CheckStatus::NotApplicable, std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN(), std::move(why)};
}

}  // namespace verify

/**
 * Run the invariant suite. Numerical failures inside a check are recorded as
 * a failed check carrying the error text; parameter-domain errors propagate.
 */
inline VerifyReport run_verify(double p, int N, double tol = 1e-10) {
  using verify::below;
  using verify::skipped;
  using verify::truth;

  const DerivedConstants c = derive(p, N);
  VerifyReport rep;
  rep.p = p;
  rep.N = N;
  rep.regime = c.regime;
  const bool super = is_supercritical(c.regime);
  const bool spiral = c.regime == Regime::SupercriticalSpiral;
  const double period_limit = std::numbers::pi / std::sqrt(p - 1.0);

  auto guarded = [&](const std::string& name, const std::function<Check()>& body) {
    try {
      rep.checks.push_back(body());
    } catch (const Error& e) {
      if (!e.is_numerical()) throw;
      rep.checks.push_back({name, CheckStatus::Fail, std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), e.what()});
    }
  };

  // Constants.
  if (c.emden) {
    const double rel = std::abs(c.emden->m - c.emden->m_alt) / c.emden->m;
    rep.checks.push_back(below("constants.m_consistency", rel, 1e-14));
  } else {
    rep.checks.push_back(skipped("constants.m_consistency", "no Emden scaling for p <= p_S"));
  }

  // Bifurcation from the constant solution.
  guarded("bifurcation.anchor", [&] {
    const double bar = bifurcation_point(c, 1);
    const double worst = std::max(std::abs(lambda_n(c, 1.0 - 1e-3, 1, tol) - bar),
                                  std::abs(lambda_n(c, 1.0 + 1e-3, 1, tol) - bar)) / bar;
    return below("bifurcation.anchor", worst, 1e-2, "lambda_1(1 +- 1e-3) against mu_1/(p-1)");
  });

  // Ordering of the first two branches at 20 initial heights.
  guarded("branch.ordering", [&] {
    int bad = 0, sampled = 0;
    double min_l1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
      double g = std::pow(10.0, -3.0 + 7.0 * i / 19.0);
      if (std::abs(g - 1.0) < 1e-3) g = 1.0 + 1e-3;
      ShotResult r;
      try {
        r = shoot(c, g, 2, tol);
      } catch (const Error& e) {
        // Below p_S large heights leave the positive cone; those heights carry no branch point.
        if (e.kind() == ErrorKind::NotPositive && !super) continue;
        throw;
      }
      ++sampled;
      const double l1 = r.criticals[0].s * r.criticals[0].s, l2 = r.criticals[1].s * r.criticals[1].s;
      if (!(l1 < l2)) ++bad;
      min_l1 = std::min(min_l1, l1);
    }
    Check ch = truth("branch.ordering", bad == 0 && sampled > 0 && min_l1 > 0.0,
                     "lambda_1 < lambda_2 at " + std::to_string(sampled) +
                         " heights; min lambda_1 = " + std::to_string(min_l1));
    ch.value = bad;
    ch.threshold = 0;
    return ch;
  });

  guarded("branch.small_gamma_blowup", [&] {
    bool ok = true;
    double prev = 0.0;
    for (double g : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double l = lambda_n(c, g, 1, tol);
      const double slope = (lambda_n(c, g * (1.0 + 1e-3), 1, tol) - lambda_n(c, g * (1.0 - 1e-3), 1, tol)) /
                           (2e-3 * g);
      if (!(l > prev) || !(slope < 0.0)) ok = false;
      prev = l;
    }
    return truth("branch.small_gamma_blowup", ok, "lambda_1 increasing and d lambda_1/d gamma < 0 for small gamma");
  });

  // Identities on a regular shot.
  guarded("pohozaev.regular", [&] {
    const ShotResult r = branch::shoot_covering(c, 2.0, 1, 5.0, tol);
    return below("pohozaev.regular", pohozaev_residual(c, r.trajectory, 1e-4, 5.0).relative_residual, 1e-7,
                 "gamma = 2 on [1e-4, 5]");
  });
  guarded("lyapunov.radial", [&] {
    const ShotResult r = shoot(c, 2.0, 4, tol);
    const LyapunovReport L = lyapunov_audit(c, r.trajectory, Energy::Radial, tol);
    Check ch = below("lyapunov.radial", L.identity.relative_residual, 1e-6);
    if (!L.monotone) {
      ch.status = CheckStatus::Fail;
      ch.detail = "energy increased by " + std::to_string(L.max_increase);
    }
    return ch;
  });

  if (p >= c.p_S) {
    guarded("decay.none", [&] {
      double lowest = std::numeric_limits<double>::infinity();
      for (double g : {2.0, 10.0, 1e3, 1e5}) lowest = std::min(lowest, min_value(shoot(c, g, 4, tol).trajectory));
      Check ch = truth("decay.none", lowest > 1e-6, "smallest u before the 4th critical point");
      ch.value = lowest;
      ch.threshold = 1e-6;
      return ch;
    });
  } else {
    rep.checks.push_back(skipped("decay.none", "p < p_S"));
  }

  // Singular solution.
  std::optional<SingularProfile> prof;
  const int n_crit = spiral ? 10 : 0;
  if (super) {
    guarded("singular.profile", [&] {
      prof = compute_singular(c, n_crit, tol);
      return truth("singular.profile", true, std::to_string(prof->criticals_star.size()) + " critical points");
    });
  } else {
    rep.checks.push_back(skipped("singular.profile", "needs p > p_S"));
  }

  if (prof) {
    const double s = 10.0 * prof->u_star.start_s();
    const double norm = prof->u_star.eval(s).u * std::pow(s, c.theta) / c.scaling().A;
    rep.checks.push_back(below("singular.normalization", std::abs(norm - 1.0), 1e-6));

    const double R = prof->criticals_star.empty() ? 1.0 : prof->s_star(1);
    guarded("pohozaev.singular", [&] {
      return below("pohozaev.singular", pohozaev_residual(c, prof->u_star, 1e-3, R).relative_residual, 1e-6);
    });
    guarded("lyapunov.tilde", [&] {
      const LyapunovReport L = lyapunov_audit(c, prof->y_trajectory, Energy::Tilde, tol);
      Check ch = below("lyapunov.tilde", L.identity.relative_residual, 1e-6);
      if (!L.monotone) ch.status = CheckStatus::Fail;
      return ch;
    });
    guarded("lyapunov.plane", [&] {
      const LyapunovReport L = lyapunov_audit(c, autonomous_orbit(c, 40.0 / c.scaling().m, 1e-8, tol),
                                              Energy::Plane, tol);
      Check ch = below("lyapunov.plane", L.identity.relative_residual, 1e-6);
      if (!L.monotone) ch.status = CheckStatus::Fail;
      return ch;
    });
  } else {
    for (const char* n : {"singular.normalization", "pohozaev.singular", "lyapunov.tilde", "lyapunov.plane"})
      rep.checks.push_back(skipped(n, "no singular profile"));
  }

  if (prof && spiral) {
    const auto& cr = prof->criticals_star;
    bool ok = true;
    for (std::size_t i = 0; i + 2 < cr.size(); ++i) {
      if (cr[i].kind == cr[i + 1].kind) ok = false;
      const bool is_min = cr[i].kind == CriticalKind::Min;
      if (is_min ? !(cr[i].value < cr[i + 2].value && cr[i + 2].value < 1.0)
                 : !(cr[i].value > cr[i + 2].value && cr[i + 2].value > 1.0))
        ok = false;
    }
    rep.checks.push_back(truth("singular.critical_values", ok, "alternating, monotone towards 1"));
    const double gap = prof->s_star(9) - prof->s_star(8);
    rep.checks.push_back(below("singular.gap_limit", std::abs(gap - period_limit) / period_limit, 2e-2,
                               "s_9* - s_8* against pi/sqrt(p-1)"));

    guarded("branch.oscillation", [&] {
      BranchOptions o;
      o.tol = tol;
      o.profile = &*prof;
      const BranchCurve cur = trace_branch(c, 1, {1.0 + 1e-3, 1e6, 1e-3}, o);
      const OscillationReport osc = detect_oscillation(c, cur, *prof, o);
      const int k = static_cast<int>(osc.crossing_gammas.size());
      Check ch = truth("branch.oscillation", k >= 3 && osc.alternating && osc.matches_S1E8,
                       std::to_string(k) + " crossings of lambda_1* on (1, 1e6]");
      ch.value = k;
      ch.threshold = 3;
      return ch;
    });
    guarded("branch.intersection_growth", [&] {
      const auto z = intersection_growth(c, *prof, {1e1, 1e2, 1e3, 1e4}, 1, tol);
      bool ok = z.back().Z > z.front().Z;
      std::string d = "Z =";
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (i > 0 && z[i].Z < z[i - 1].Z) ok = false;
        d += " " + std::to_string(z[i].Z);
      }
      return truth("branch.intersection_growth", ok, d);
    });
    guarded("branch.profile_convergence", [&] {
      const double b = prof->s_star(1);
      double prev = std::numeric_limits<double>::infinity();
      bool ok = true;
      for (double g : {1e2, 1e3, 1e4}) {
        const double d = convergence_profile(c, *prof, g, 0.5 * b, b, tol).value;
        if (!(d < prev)) ok = false;
        prev = d;
      }
      return truth("branch.profile_convergence", ok, "sup |u - u*| decreasing at gamma = 1e2, 1e3, 1e4");
    });
  } else {
    const std::string why = super ? "equilibrium is a node: no oscillation is asserted" : "needs p > p_S";
    for (const char* n : {"singular.critical_values", "singular.gap_limit", "branch.oscillation",
                          "branch.intersection_growth", "branch.profile_convergence"})
      rep.checks.push_back(skipped(n, why));
  }

  // One-dimensional layer.
  rep.checks.push_back(below("layer.homoclinic_residual", layer::homoclinic_residual(p), 1e-9));
  guarded("layer.period_limit", [&] {
    return below("layer.period_limit", std::abs(period(p, 1.0 + 1e-4) - period_limit) / period_limit, 1e-4);
  });
  // Step 1e-4: the three-point truncation error at 1e-3 grows with p.
  const EigenpairReport eig = limit_eigenpair_check(p, 1e-4);
  rep.checks.push_back(below("layer.eigenpair0", eig.pair0.residual, 1e-5));
  if (eig.pair1)
    rep.checks.push_back(below("layer.eigenpair1", eig.pair1->residual, 1e-5));
  else
    rep.checks.push_back(skipped("layer.eigenpair1", "second eigenfunction is not in H^1 for p >= 3"));

  return rep;
}

}  // namespace radbif

#endif  // RADBIF_VERIFY_HPP
