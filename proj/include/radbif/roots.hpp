#ifndef RADBIF_ROOTS_HPP
#define RADBIF_ROOTS_HPP

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "radbif/error.hpp"

namespace radbif::roots {

/// Bracketed root of f on [a, b] given f(a) f(b) <= 0, located until the bracket
/// is narrower than width(x). Returns the bracket midpoint.
template <class F, class Width>
double bracketed(F&& f, double a, double b, double fa, double fb, Width&& width,
                 std::uintmax_t max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    fail(ErrorKind::BracketingFailed, "root bracket has no sign change");
  auto tol = [&](double lo, double hi) { return std::abs(hi - lo) <= width(0.5 * (lo + hi)); };
  std::uintmax_t iters = max_iter;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (lo + hi);
}

/// Plain bisection; used where each evaluation is an expensive, possibly
/// slightly noisy shot and a guaranteed bracket contraction is preferred.
template <class F, class Stop>
std::pair<double, double> bisect(F&& f, double a, double b, double fa, Stop&& done,
                                 int max_iter = 200) {
  for (int i = 0; i < max_iter && !done(a, b); ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid};
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return {a, b};
}

}  // namespace radbif::roots

#endif  // RADBIF_ROOTS_HPP
