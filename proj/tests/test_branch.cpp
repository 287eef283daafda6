#include <chrono>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "radbif/branch.hpp"

using namespace radbif;

namespace {

const DerivedConstants& c6() {
  static const DerivedConstants c = derive(6.0, 3);
  return c;
}

const SingularProfile& profile() {
  static const SingularProfile prof = compute_singular(c6(), 2, 1e-10);
  return prof;
}

BranchOptions options() {
  BranchOptions o;
  o.profile = &profile();
  return o;
}

const BranchCurve& full_curve() {
  static const BranchCurve cur = trace_branch(c6(), 1, {1e-4, 1e6, 1e-3}, options());
  return cur;
}

// Crossings of lambda_1* on (1, 1e6] at tol = 1e-10 (p = 6, N = 3), frozen after one full run.
const std::vector<double> kCrossings{2.80396, 12.0443, 34.7849, 125.142, 373.156, 1257.62,
                                     3837.87, 12552.3, 38880.5, 125251,  391483};

// Smallest lambda_1 over the traced branch (first minimum, near gamma = 7.95).
constexpr double kLowestLambda1 = 0.6617153929;

}  // namespace

TEST(Branch, SubBranchesAndDensity) {
  const BranchCurve& cur = full_curve();
  ASSERT_FALSE(cur.minus.empty());
  ASSERT_FALSE(cur.plus.empty());
  EXPECT_NEAR(cur.minus.front().gamma, 1e-4, 1e-16);
  EXPECT_NEAR(cur.minus.back().gamma, 1.0 - 1e-3, 1e-15);
  EXPECT_NEAR(cur.plus.front().gamma, 1.0 + 1e-3, 1e-15);
  EXPECT_NEAR(cur.plus.back().gamma, 1e6, 1e-6);
  for (const auto* side : {&cur.minus, &cur.plus})
    for (std::size_t i = 0; i + 1 < side->size(); ++i) {
      const double a = (*side)[i].lambda, b = (*side)[i + 1].lambda;
      EXPECT_LT((*side)[i].gamma, (*side)[i + 1].gamma);
      EXPECT_LE(std::abs(b - a) / std::min(a, b), 0.05) << "gamma = " << (*side)[i].gamma;
    }
  EXPECT_EQ(cur.samples().size(), cur.minus.size() + cur.plus.size());
  ASSERT_TRUE(cur.lambda_star.has_value());
  EXPECT_EQ(*cur.lambda_star, profile().lambda_star(1));
}

TEST(Branch, EndpointConsistency) {
  const double bar = bifurcation_point(c6(), 1);
  EXPECT_LT(std::abs(full_curve().minus.back().lambda - bar) / bar, 1e-2);
  EXPECT_LT(std::abs(full_curve().plus.front().lambda - bar) / bar, 1e-2);
}

// The tail value at gamma = 1e5 is compared with lambda_1* at 1%.
TEST(Branch, TailConsistency) {
  const double lstar = profile().lambda_star(1);
  EXPECT_LT(std::abs(lambda_n(c6(), 1e5, 1) - lstar) / lstar, 1e-2);
}

TEST(Branch, SmallGammaBlowUp) {
  double prev = 0.0;
  for (double g : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double l = lambda_n(c6(), g, 1);
    EXPECT_GT(l, prev) << "gamma = " << g;
    const double slope = (lambda_n(c6(), g * (1 + 1e-3), 1) - lambda_n(c6(), g * (1 - 1e-3), 1)) / (2e-3 * g);
    EXPECT_LT(slope, 0.0) << "gamma = " << g;
    prev = l;
  }
}

TEST(Branch, OrderingAndLowerBound) {
  for (int i = 0; i < 20; ++i) {
    double g = std::pow(10.0, -3.0 + 7.0 * i / 19.0);
    if (std::abs(g - 1.0) < 1e-3) g = 1.0 + 1e-3;
    const ShotResult r = shoot(c6(), g, 3);
    EXPECT_LT(r.criticals[0].s, r.criticals[1].s);
    EXPECT_LT(r.criticals[1].s, r.criticals[2].s);
  }
  double lowest = INFINITY;
  for (const auto& s : full_curve().samples()) lowest = std::min(lowest, s.lambda);
  EXPECT_GT(lowest, 0.0);
  EXPECT_NEAR(lowest, kLowestLambda1, 1e-4);
}

TEST(Branch, CrossingsFrozen) {
  const auto& cr = full_curve().crossings;
  ASSERT_EQ(cr.size(), kCrossings.size());
  for (std::size_t i = 0; i < cr.size(); ++i) EXPECT_NEAR(cr[i], kCrossings[i], 1e-5 * kCrossings[i]) << i;
}

TEST(Branch, OscillationAlternatesWithParity) {
  const OscillationReport rep = detect_oscillation(c6(), full_curve(), profile(), options());
  EXPECT_EQ(rep.status, OscillationStatus::Oscillating);
  EXPECT_GE(rep.crossing_gammas.size(), 3u);
  EXPECT_TRUE(rep.alternating);
  ASSERT_EQ(rep.signs_after.size(), rep.crossing_gammas.size());
  EXPECT_EQ(rep.signs_after.front(), -1);
  for (std::size_t i = 1; i < rep.signs_after.size(); ++i) EXPECT_EQ(rep.signs_after[i], -rep.signs_after[i - 1]);
  EXPECT_EQ(rep.endpoint_crossings.size(), 12u);
  for (const auto& e : rep.endpoint_crossings) EXPECT_TRUE(e.parity_ok) << "gamma = " << e.gamma;
  EXPECT_TRUE(rep.matches_S1E8);
}

TEST(Branch, SecondBranchParity) {
  BranchOptions o = options();
  const BranchCurve cur = trace_branch(c6(), 2, {1.001, 1e6, 1e-3}, o);
  const OscillationReport rep = detect_oscillation(c6(), cur, profile(), o);
  EXPECT_GE(rep.crossing_gammas.size(), 3u);
  EXPECT_TRUE(rep.alternating);
  EXPECT_TRUE(rep.matches_S1E8);
  for (const auto& s : cur.plus) {
    const ShotResult r = shoot(c6(), s.gamma, 2);
    EXPECT_LT(r.criticals[0].s * r.criticals[0].s, s.lambda);
  }
}

TEST(Branch, TurningPointsBetweenCrossings) {
  const auto& tp = full_curve().turning_points;
  const auto& cr = full_curve().crossings;
  ASSERT_GE(tp.size(), cr.size() - 1);
  // Each pair of consecutive crossings encloses an extremum.
  for (std::size_t i = 0; i + 1 < cr.size(); ++i) {
    bool found = false;
    for (double g : tp) found = found || (g > cr[i] && g < cr[i + 1]);
    EXPECT_TRUE(found) << "between " << cr[i] << " and " << cr[i + 1];
  }
}

TEST(Branch, NodeRegimeReportsNoCrossing) {
  const DerivedConstants c = derive(8.0, 11);
  const SingularProfile prof = compute_singular(c, 1, 1e-10);
  BranchOptions o;
  o.profile = &prof;
  const BranchCurve cur = trace_branch(c, 1, {1.001, 1e6, 1e-3}, o);
  OscillationReport rep;
  ASSERT_NO_THROW(rep = detect_oscillation(c, cur, prof, o));
  EXPECT_EQ(rep.status, OscillationStatus::NoCrossingFound);
  EXPECT_TRUE(rep.crossing_gammas.empty());
  // Monotone approach from above.
  for (const auto& s : cur.plus) EXPECT_GE(s.lambda, prof.lambda_star(1) * (1.0 - 1e-7));
}

TEST(Branch, IntersectionGrowth) {
  const auto z = intersection_growth(c6(), profile(), {1.01, 1e1, 1e2, 1e3, 1e4}, 1);
  ASSERT_EQ(z.size(), 5u);
  EXPECT_EQ(z[0].Z, 1);
  for (std::size_t i = 1; i < z.size(); ++i) EXPECT_GE(z[i].Z, z[i - 1].Z);
  EXPECT_GT(z.back().Z, z[1].Z);
  EXPECT_EQ(z.back().Z, 9);
  const auto fine = intersection_growth(c6(), profile(), {1.01, 1e1, 1e2, 1e3, 1e4}, 1, 1e-10, 7);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(fine[i].Z, z[i].Z);
  EXPECT_THROW(intersection_growth(c6(), profile(), {10.0, 5.0}, 1), Error);
  EXPECT_THROW(intersection_growth(c6(), profile(), {0.5}, 1), Error);
}

TEST(Branch, ProfileConvergence) {
  const double b = profile().s_star(1);
  double prev = INFINITY;
  for (double g : {1e2, 1e3, 1e4}) {
    const double d = convergence_profile(c6(), profile(), g, 0.5 * b, b).value;
    EXPECT_LT(d, prev) << "gamma = " << g;
    prev = d;
  }
  const double d1 = convergence_profile(c6(), profile(), 1e3, 0.5 * b, b, 1e-10).value;
  const double d2 = convergence_profile(c6(), profile(), 1e3, 0.5 * b, b, 1e-11).value;
  EXPECT_NEAR(d1, d2, 1e-6);
  // Singular against regular near the origin.
  EXPECT_GT(convergence_profile(c6(), profile(), 1e3, 1e-4, b).value,
            convergence_profile(c6(), profile(), 1e3, 1e-2, b).value);
}

TEST(Branch, ToleranceStability) {
  for (double g : {3.0, 300.0, 3e4}) {
    const double a = lambda_n(c6(), g, 1, 1e-10), b = lambda_n(c6(), g, 1, 1e-11);
    EXPECT_NEAR(a, b, 1e-6 * a) << "gamma = " << g;
  }
}

TEST(Branch, Errors) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NoSolution;
  };
  BranchOptions tiny = options();
  tiny.budget = 10;
  EXPECT_EQ(kind_of([&] { trace_branch(c6(), 1, {1e-2, 1e2, 1e-3}, tiny); }), ErrorKind::BudgetExceeded);
  EXPECT_EQ(kind_of([&] { trace_branch(c6(), 1, {1e-2, 1e2, 5e-5}, options()); }), ErrorKind::ParameterDomain);
  EXPECT_EQ(kind_of([&] { trace_branch(c6(), 1, {1e2, 1e-2, 1e-3}, options()); }), ErrorKind::ParameterDomain);
  EXPECT_EQ(kind_of([&] { trace_branch(c6(), 0, {1e-2, 1e2, 1e-3}, options()); }), ErrorKind::ParameterDomain);
  const BranchCurve short_curve = trace_branch(c6(), 1, {1.01, 1e3, 1e-3}, options());
  EXPECT_EQ(kind_of([&] { detect_oscillation(c6(), short_curve, profile(), options()); }),
            ErrorKind::ParameterDomain);
}

TEST(Branch, ParityRule) {
  EXPECT_EQ(branch::expected_parity_sign(1, -0.1), 1);
  EXPECT_EQ(branch::expected_parity_sign(1, 0.1), -1);
  EXPECT_EQ(branch::expected_parity_sign(2, -0.1), -1);
  EXPECT_EQ(branch::expected_parity_sign(2, 0.1), 1);
}
