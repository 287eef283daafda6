#include <cmath>

#include <gtest/gtest.h>

#include "radbif/curves.hpp"
#include "radbif/shooting.hpp"
#include "radbif/singular.hpp"

using namespace radbif;

TEST(Curves, IdenticalCurvesHaveNoSignChange) {
  const DerivedConstants c = derive(6.0, 3);
  const ShotResult r = shoot(c, 3.0, 3);
  EXPECT_EQ(count_sign_changes(r.trajectory, r.trajectory, 0.0, r.criticals[2].s), 0);
  const auto rep = sign_changes(r.trajectory, r.trajectory, 0.0, r.criticals[2].s);
  EXPECT_EQ(rep.crossings, 0);
}

TEST(Curves, ConstantAgainstPowerLaw) {
  // 2 x^{-1} meets 1 once, at x = 2.
  const auto rep = sign_changes(PowerLaw{2.0, 1.0}, ConstantLevel{1.0}, 0.5, 7.0);
  ASSERT_EQ(rep.crossings, 1);
  EXPECT_NEAR(rep.locations[0], 2.0, 0.1);
}

TEST(Curves, TangencyIsReportedNotCounted) {
  // (x - 1)^2 touches 0 at a grid node without changing sign.
  struct Bump {
    Sample eval(double x) const { return {(x - 1.0) * (x - 1.0), 2.0 * (x - 1.0)}; }
    double lower() const { return 0.0; }
    double upper() const { return 2.0; }
    std::vector<double> breakpoints() const { return {0.5, 1.0, 1.5}; }
  };
  const auto rep = sign_changes(Bump{}, ConstantLevel{0.0}, 0.5, 1.5);
  EXPECT_EQ(rep.crossings, 0);
  EXPECT_EQ(rep.tangencies, 1);
}

TEST(Curves, SingularProfileAgainstOne) {
  const DerivedConstants c = derive(6.0, 3);
  const SingularProfile prof = compute_singular(c, 6);
  for (int n = 1; n <= 6; ++n)
    EXPECT_EQ(count_sign_changes(prof.u_star, ConstantLevel{1.0}, 0.0, prof.s_star(n)), n) << "n = " << n;
}

TEST(Curves, LaneEmdenAgainstSingularEntire) {
  const DerivedConstants c = derive(6.0, 3);
  const auto le = shoot_lane_emden(c, 2000.0);
  const PowerLaw sing = singular_entire_curve(c);
  int prev = 0;
  for (double R : {1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 2000.0}) {
    const int z = count_sign_changes(le, sing, 0.0, R);
    EXPECT_GE(z, prev) << "R = " << R;
    prev = z;
  }
  EXPECT_GE(prev, 3);
}

TEST(Curves, RefinementDoesNotChangeCounts) {
  const DerivedConstants c = derive(6.0, 3);
  const SingularProfile prof = compute_singular(c, 4);
  for (double g : {10.0, 1e3}) {
    const ShotResult r = shoot(c, g, 1);
    const double b = std::min(r.criticals[0].s, prof.s_star(1));
    EXPECT_EQ(count_sign_changes(r.trajectory, prof.u_star, 0.0, b, 3),
              count_sign_changes(r.trajectory, prof.u_star, 0.0, b, 7))
        << "gamma = " << g;
  }
}

TEST(Curves, IntervalNotCovered) {
  const DerivedConstants c = derive(6.0, 3);
  const ShotResult r = shoot(c, 2.0, 1);
  try {
    count_sign_changes(r.trajectory, ConstantLevel{1.0}, 0.0, 10.0 * r.trajectory.upper());
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IntervalNotCovered);
  }
  try {
    count_sign_changes(r.trajectory, ConstantLevel{1.0}, 1e-12, 1.0);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IntervalNotCovered);
  }
}
