#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/ellint_1.hpp>
#include <gtest/gtest.h>

#include "radbif/layer1d.hpp"
#include "radbif/shooting.hpp"

using namespace radbif;

TEST(Homoclinic, ClosedForm) {
  EXPECT_NEAR(layer::homoclinic(3.0, 0.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(layer::alpha_bar(6.0), std::pow(3.5, 0.2), 1e-15);
  for (double p : {1.5, 3.0, 6.0})
    for (double y : {0.1, 1.0, 4.0}) EXPECT_EQ(layer::homoclinic(p, y), layer::homoclinic(p, -y));
  double prev = layer::homoclinic(6.0, 0.0);
  for (double y = 1.0; y <= 30.0; y += 1.0) {
    const double w = layer::homoclinic(6.0, y);
    EXPECT_LT(w, prev);
    prev = w;
  }
  EXPECT_LT(layer::homoclinic(6.0, 30.0), 2.0 * layer::alpha_bar(6.0) * std::exp(-30.0));
}

TEST(Homoclinic, Residual) {
  for (double p : {1.5, 2.0, 3.0, 6.0, 8.0}) EXPECT_LT(layer::homoclinic_residual(p), 1e-9) << "p = " << p;
}

TEST(Homoclinic, EnergyLevels) {
  // F(alpha) = F(beta) with F(w) = w^2 - 2 w^{p+1}/(p+1).
  for (double p : {2.0, 3.0, 6.0})
    for (double a : {1.01, 1.1, 0.5 * (1.0 + layer::alpha_bar(p))}) {
      const double b = static_cast<double>(layer::beta_of(p, a));
      auto Fdirect = [p](double w) { return w * w - 2.0 * std::pow(w, p + 1) / (p + 1); };
      EXPECT_GT(b, 0.0);
      EXPECT_LT(b, 1.0);
      EXPECT_NEAR(Fdirect(a), Fdirect(b), 1e-13);
      EXPECT_NEAR(layer::F(p, a), Fdirect(a), 1e-14);
    }
  EXPECT_NEAR(layer::F(6.0, layer::alpha_bar(6.0)), 0.0, 1e-15);
}

TEST(Period, EllipticOracleAtP3) {
  // p = 3: T(alpha) = sqrt(2) K(k) / alpha, k^2 = (alpha^2 - beta^2)/alpha^2, beta^2 = 2 - alpha^2.
  for (double a : {1.001, 1.05, 1.2, 1.35, 1.41, 1.414}) {
    const double b2 = 2.0 - a * a;
    const double k = std::sqrt((a * a - b2) / (a * a));
    const double oracle = std::sqrt(2.0) * boost::math::ellint_1(k) / a;
    EXPECT_NEAR(period(3.0, a), oracle, 1e-10 * oracle) << "alpha = " << a;
  }
}

TEST(Period, SmallAmplitudeLimit) {
  for (double p : {2.0, 3.0, 6.0}) {
    const double lim = std::numbers::pi / std::sqrt(p - 1.0);
    EXPECT_LT(std::abs(period(p, 1.0 + 1e-4) - lim) / lim, 1e-4) << "p = " << p;
  }
}

TEST(Period, IncreasingAndUnbounded) {
  const double ab = layer::alpha_bar(3.0);
  double prev = 0.0;
  for (double a = 1.05; a < ab; a += 0.05) {
    const double T = period(3.0, a);
    EXPECT_GT(T, prev) << "alpha = " << a;
    prev = T;
  }
  EXPECT_GT(period(3.0, ab * (1.0 - 1e-12)), 10.0);
}

TEST(Period, AlphaOutOfRange) {
  for (double a : {1.0, 0.9, layer::alpha_bar(6.0), 2.0}) {
    try {
      period(6.0, a);
      FAIL() << "accepted alpha = " << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::AlphaOutOfRange);
    }
  }
}

TEST(Period, AgainstDirectIntegration) {
  for (double p : {2.0, 6.0})
    for (double a : {1.05, 1.2}) {
      const LayerState st = layer_state(p, a);
      auto rhs = [p](double, const ode::State<2>& y) -> ode::State<2> { return {y[1], -nonlinearity(p, y[0])}; };
      ode::Options o;
      o.tol = 1e-12;
      std::vector<ode::EventSpec<2>> ev{ode::EventSpec<2>::derivative_zero(ode::Direction::Any, 2)};
      const auto r = ode::integrate<2>(rhs, Frame::S, 0.0, {st.beta_min, 0.0}, 10.0 * st.half_period, o, ev);
      ASSERT_EQ(r.hits.size(), 2u);
      EXPECT_NEAR(r.hits[0].x, st.half_period, 1e-6 * st.half_period);
      EXPECT_NEAR(r.hits[1].x - r.hits[0].x, st.half_period, 1e-6 * st.half_period);
      EXPECT_NEAR(r.hits[0].y[0], a, 1e-9);
    }
}

class LayerProfile : public ::testing::TestWithParam<double> {};

TEST_P(LayerProfile, EnergyMonotonicityBoundary) {
  const double eps = GetParam();
  const LayerSolution sol = layer_solution(6.0, eps);
  EXPECT_NEAR(sol.state.half_period, 1.0 / eps, 1e-9 / eps);
  EXPECT_LT(sol.energy_defect(), 1e-8);
  const auto& tr = sol.profile;
  EXPECT_NEAR(tr.lower(), 0.0, 1e-14);
  EXPECT_NEAR(tr.upper(), 1.0, 1e-9);
  EXPECT_EQ(tr.node(0)[1], 0.0);
  EXPECT_LT(std::abs(tr.node(tr.num_nodes() - 1)[1]) * eps, 1e-6);
  for (std::size_t i = 1; i + 1 < tr.num_nodes(); ++i) ASSERT_GT(tr.node(i)[1], 0.0) << "x = " << tr.node_x(i);
}

INSTANTIATE_TEST_SUITE_P(Eps, LayerProfile, ::testing::Values(0.3, 0.2, 0.1, 0.05, 0.02));

TEST(Layer, ApproachesHomoclinic) {
  double prev_d = INFINITY, prev_F = INFINITY;
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    const LayerSolution sol = layer_solution(6.0, eps);
    const double d = sol.homoclinic_distance();
    const double Fb = std::abs(layer::F(6.0, sol.state.beta_min));
    EXPECT_LT(d, prev_d) << "eps = " << eps;
    EXPECT_LT(Fb, prev_F) << "eps = " << eps;
    prev_d = d;
    prev_F = Fb;
  }
  EXPECT_LT(prev_d, 1e-8);
  EXPECT_LT(prev_F, 1e-12);
}

TEST(Layer, NoSolutionForLargeEpsilon) {
  for (double eps : {1.0, 0.8}) {  // 1/eps below pi/sqrt(5)
    try {
      layer_solution(6.0, eps);
      FAIL() << "eps = " << eps;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NoSolution);
    }
  }
  EXPECT_THROW(layer_solution(6.0, 0.0), Error);
}

TEST(Layer, MatchesBallProfileAtSmallGamma) {
  const DerivedConstants c = derive(6.0, 3);
  double prev = INFINITY;
  for (double g : {1e-3, 1e-4}) {
    const ShotResult r = shoot(c, g, 1);
    const double s1 = r.criticals[0].s, eps = 1.0 / s1;  // lambda = s1^2
    const LayerSolution L = layer_solution(6.0, eps);
    double d = 0.0, top = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = 1.0 - 5.0 * eps * i / 400.0;
      const double u = r.trajectory.eval(s1 * x).u;
      d = std::max(d, std::abs(u - L.eval(x).u));
      top = std::max(top, std::abs(u));
    }
    EXPECT_LT(d / top, 0.1) << "gamma = " << g;
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Eigenpairs, ClosedForms) {
  EXPECT_DOUBLE_EQ(layer::kappa0(3.0), 3.0);
  EXPECT_DOUBLE_EQ(layer::kappa1(2.0), -0.75);

  const EigenpairReport r3 = limit_eigenpair_check(3.0);
  EXPECT_DOUBLE_EQ(r3.pair0.kappa, 3.0);
  EXPECT_LT(r3.pair0.residual, 1e-5);
  EXPECT_EQ(r3.pair0.slope_at_origin, 0.0);
  EXPECT_FALSE(r3.pair1.has_value());

  const EigenpairReport r2 = limit_eigenpair_check(2.0);
  ASSERT_TRUE(r2.pair1.has_value());
  EXPECT_DOUBLE_EQ(r2.pair1->kappa, -0.75);
  EXPECT_LT(r2.pair1->residual, 1e-5);
  EXPECT_LT(r2.pair0.residual, 1e-5);
}

TEST(Eigenpairs, ResidualShrinksWithStep) {
  for (double p : {2.0, 6.0}) {
    const double coarse = limit_eigenpair_check(p, 1e-2).pair0.residual;
    const double fine = limit_eigenpair_check(p, 1e-3).pair0.residual;
    EXPECT_LT(fine, coarse / 50.0) << "p = " << p;
  }
}
