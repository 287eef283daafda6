#include <cmath>
#include <cstring>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "radbif/curves.hpp"
#include "radbif/singular.hpp"

using namespace radbif;

namespace {

const DerivedConstants& c6() {
  static const DerivedConstants c = derive(6.0, 3);
  return c;
}

const SingularProfile& profile() {
  static const SingularProfile prof = compute_singular(c6(), 10, 1e-10);
  return prof;
}

// Calibrated once at tol = 1e-10 (p = 6, N = 3) and frozen.
constexpr double kLambda1Star = 1.36094271156859;
constexpr double kS9MinusS8 = 1.405286848;

}  // namespace

TEST(Singular, StartCoefficients) {
  const auto st = singular::default_start(c6());
  EXPECT_NEAR(st.slope_coeff, 0.729014804399755386, 1e-14);
  EXPECT_NEAR(st.c1, st.slope_coeff / (2.0 * c6().scaling().m), 1e-15);
  EXPECT_NEAR(std::exp(2.0 * c6().scaling().m * st.t0), 1e-10, 1e-22);
  EXPECT_THROW(singular::default_start(derive(3.0, 3)), Error);
}

TEST(Singular, NormalizationNearOrigin) {
  const auto& prof = profile();
  const double s = 10.0 * prof.u_star.start_s();
  const double ratio = prof.u_star.eval(s).u * std::pow(s, c6().theta) / c6().scaling().A;
  EXPECT_NEAR(ratio, 1.0, 1e-6);
}

TEST(Singular, RegressionValues) {
  EXPECT_NEAR(profile().lambda_star(1), kLambda1Star, 1e-9 * kLambda1Star);
  EXPECT_NEAR(profile().s_star(9) - profile().s_star(8), kS9MinusS8, 1e-6);
}

TEST(Singular, GapsApproachLimit) {
  const double limit = std::numbers::pi / std::sqrt(5.0);
  EXPECT_NEAR(limit, 1.40496294620814527, 1e-15);
  const auto& prof = profile();
  for (int n = 8; n < 10; ++n) {
    const double gap = prof.s_star(n + 1) - prof.s_star(n);
    EXPECT_LT(std::abs(gap - limit) / limit, 2e-2) << "n = " << n;
  }
  // Even and odd gaps each approach the limit monotonically.
  for (int n = 2; n + 2 < 10; ++n) {
    const double g0 = prof.s_star(n + 1) - prof.s_star(n), g1 = prof.s_star(n + 3) - prof.s_star(n + 2);
    EXPECT_LT(std::abs(g1 - limit), std::abs(g0 - limit)) << "n = " << n;
  }
}

TEST(Singular, CriticalValuesAlternateAndConverge) {
  const auto& cr = profile().criticals_star;
  ASSERT_EQ(cr.size(), 10u);
  for (std::size_t i = 0; i < cr.size(); ++i) {
    EXPECT_EQ(cr[i].kind, i % 2 == 0 ? CriticalKind::Min : CriticalKind::Max);
    EXPECT_EQ(cr[i].value < 1.0, i % 2 == 0);
    if (i + 2 < cr.size()) {
      if (i % 2 == 0) {
        EXPECT_LT(cr[i].value, cr[i + 2].value);
      } else {
        EXPECT_GT(cr[i].value, cr[i + 2].value);
      }
    }
    EXPECT_NEAR(profile().lambdas_star[i], cr[i].s * cr[i].s, 1e-12 * cr[i].s * cr[i].s);
  }
}

TEST(Singular, OrbitBounds) {
  const auto& y = profile().y_trajectory;
  const double p = 6.0, m = c6().scaling().m;
  for (std::size_t i = 0; i < y.num_nodes(); ++i) {
    const double t = y.node_x(i), v = y.node(i)[0];
    const double beta = 1.0 + m * m * std::exp(2.0 * m * t);
    ASSERT_GT(v, 0.0) << "t = " << t;
    ASSERT_LT(v, std::pow((p + 1.0) * beta / 2.0, 1.0 / (p - 1.0))) << "t = " << t;
  }
}

TEST(Singular, PerturbedEnergyDecays) {
  const auto& y = profile().y_trajectory;
  const double p = 6.0, m = c6().scaling().m, tol = 1e-10;
  auto E = [&](std::size_t i) {
    const double t = y.node_x(i), v = y.node(i)[0], z = y.node(i)[1];
    const double beta = 1.0 + m * m * std::exp(2.0 * m * t);
    return 0.5 * z * z - 0.5 * beta * v * v + std::pow(v, p + 1.0) / (p + 1.0);
  };
  double prev = E(0);
  for (std::size_t i = 1; i < y.num_nodes(); ++i) {
    const double e = E(i);
    ASSERT_LE(e, prev + 10 * tol * std::max(1.0, std::abs(prev))) << "node " << i;
    prev = e;
  }
}

TEST(Singular, ZeroCount) {
  for (int n = 1; n <= 10; ++n)
    EXPECT_EQ(count_sign_changes(profile().u_star, ConstantLevel{1.0}, 0.0, profile().s_star(n)), n);
}

TEST(Singular, EntireSolution) {
  const DerivedConstants c5 = derive(5.5, 3);
  // p = 5, N = 3: theta = 1/2, A = (1/2 * 1/2)^{1/4} = 2^{-1/2}.
  const DerivedConstants c = derive(5.0, 3);
  EXPECT_NEAR(singular_entire(c, 1.0), 0.70710678118654752, 1e-15);
  for (const DerivedConstants* k : {&c, &c5, &c6()}) {
    const double th = k->theta, A = k->scaling().A, p = k->p();
    const int N = k->N();
    for (double r : {0.1, 1.0, 10.0}) {
      const double u = singular_entire(*k, r);
      const double du = -th * A * std::pow(r, -th - 1.0);
      const double d2u = th * (th + 1.0) * A * std::pow(r, -th - 2.0);
      EXPECT_LT(std::abs(d2u + (N - 1.0) / r * du + std::pow(u, p)), 1e-10 * std::max(1.0, std::abs(d2u)));
      EXPECT_NEAR(singular_entire(*k, 3.0 * r), std::pow(3.0, -th) * u, 1e-14 * u);
    }
  }
  EXPECT_THROW(singular_entire(c, 0.0), Error);
}

TEST(Singular, InitSensitivity) {
  const auto r = init_sensitivity(c6(), 6, 1e-10);
  EXPECT_LT(r.max_t0_shift, 1e-8);
  EXPECT_LT(r.max_c1, 1e-7);
}

TEST(Singular, Deterministic) {
  const SingularProfile a = compute_singular(c6(), 5, 1e-10), b = compute_singular(c6(), 5, 1e-10);
  ASSERT_EQ(a.lambdas_star.size(), b.lambdas_star.size());
  for (std::size_t i = 0; i < a.lambdas_star.size(); ++i)
    EXPECT_EQ(std::memcmp(&a.lambdas_star[i], &b.lambdas_star[i], sizeof(double)), 0);
}

TEST(Singular, H1IntegralConverges) {
  const auto& prof = profile();
  const DerivedConstants& c = c6();
  const double th = c.theta, A = c.scaling().A;
  const int N = c.N();
  const double delta = 1.0;
  auto total = [&](double eps) {
    // Leading-order closed form on (0, eps).
    double head = A * A * std::pow(eps, N - 2 * th) / (N - 2 * th) +
                  th * th * A * A * std::pow(eps, N - 2 * th - 2) / (N - 2 * th - 2);
    auto g = [&](double x) {
      const double s = std::exp(x);
      const Sample v = prof.u_star.eval(s);
      return (v.u * v.u + v.du * v.du) * std::pow(s, N);
    };
    return head + boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, std::log(eps), std::log(delta),
                                                                                  15, 1e-13);
  };
  const double ref = total(1e-4);
  for (double eps = 5e-5; eps >= 1e-8; eps /= 2) EXPECT_NEAR(total(eps), ref, 1e-6 * ref) << "eps = " << eps;
}

TEST(Singular, NeedsSupercritical) {
  EXPECT_THROW(compute_singular(derive(5.0, 3), 1), Error);
  EXPECT_THROW(compute_singular(derive(4.0, 3), 1), Error);
}
