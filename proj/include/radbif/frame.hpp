#ifndef RADBIF_FRAME_HPP
#define RADBIF_FRAME_HPP

#include <cmath>
#include <string_view>

namespace radbif {

/// Coordinate frames of the radial problem.
///   R   : r in [0, 1], the unit ball
///   S   : s = sqrt(lambda) r, the stretched variable
///   T   : t = log(s) / m, the Emden variable
///   Rho : rho = gamma^{(p-1)/2} s, the blow-up variable at the origin
enum class Frame { R, S, T, Rho };

constexpr std::string_view to_string(Frame f) noexcept {
  switch (f) {
    case Frame::R: return "R";
    case Frame::S: return "S";
    case Frame::T: return "T";
    case Frame::Rho: return "Rho";
  }
  return "?";
}

namespace frame {

inline double r_to_s(double r, double lambda) { return std::sqrt(lambda) * r; }
inline double s_to_r(double s, double lambda) { return s / std::sqrt(lambda); }
inline double s_to_t(double s, double m) { return std::log(s) / m; }
inline double t_to_s(double t, double m) { return std::exp(m * t); }

/// gamma^{(p-1)/2}, the length scale factor between S and Rho.
inline double rho_factor(double gamma, double p) { return std::pow(gamma, 0.5 * (p - 1.0)); }
inline double s_to_rho(double s, double gamma, double p) { return rho_factor(gamma, p) * s; }
inline double rho_to_s(double rho, double gamma, double p) { return rho / rho_factor(gamma, p); }

}  // namespace frame
}  // namespace radbif

#endif  // RADBIF_FRAME_HPP
