#pragma once

#include <cmath>
#include <string>

#include "sigret/frame.hpp"
#include "sigret/grid.hpp"
#include "sigret/meyer.hpp"

namespace sigret {

// Radial window w: Meyer-style bump on [1/3, 8/3] with
// w(r)^2 + w(r/4)^2 = 1 across the x4 dilation overlap, so that
// sum_j w(2^{-2j} r)^2 telescopes to 1.
inline double curvelet_radial(double r) {
  if (r <= 1.0 / 3.0 || r >= 8.0 / 3.0) return 0.0;
  if (r < 2.0 / 3.0) return std::sin(0.5 * M_PI * meyer_beta(3.0 * r - 1.0));
  if (r <= 4.0 / 3.0) return 1.0;
  return std::cos(0.5 * M_PI * meyer_beta(0.75 * r - 1.0));
}

// low-pass radial profile: sqrt(1 - sum_{j>=1} w(2^{-2j} r)^2)
inline double curvelet_lowpass_radial(double r) {
  if (r <= 4.0 / 3.0) return 1.0;
  if (r >= 8.0 / 3.0) return 0.0;
  return std::cos(0.5 * M_PI * meyer_beta(0.75 * r - 1.0));
}

// Angular bump nu, even, supported on [-1/2, 1/2], with
// |nu(t)|^2 + |nu(t - 1/2)|^2 = 1 on [0, 1).
inline double curvelet_angular(double t) {
  const double a = std::abs(t);
  if (a >= 0.5) return 0.0;
  return std::cos(0.5 * M_PI * meyer_beta(2.0 * a));
}

// nu_{j,l}(theta) = nu(2^j theta - l/2), extended 1-periodically in the
// angular variable theta (measured in turns).
inline double curvelet_angular_window(int j, int l, double theta) {
  const double scale = std::ldexp(1.0, j);
  double u = scale * theta - 0.5 * static_cast<double>(l);
  // reduce modulo the period (scale) of the wrapped argument
  u -= scale * std::floor(u / scale + 0.5);
  return curvelet_angular(u);
}

// chi_{j,l}(xi) = w(2^{-2j}|xi|) (nu_{j,l}(theta) + nu_{j,l}(theta + 1/2));
// chi_0 is the isotropic low-pass.  theta is the angle of xi in turns.
inline double curvelet_window(int j, int l, const Eigen::Vector2d& xi) {
  const double r = xi.norm();
  if (j == 0) return curvelet_lowpass_radial(r);
  const double w = curvelet_radial(std::ldexp(r, -2 * j));
  if (w == 0.0) return 0.0;
  const double theta = std::atan2(xi[1], xi[0]) / (2.0 * M_PI);
  return w * (curvelet_angular_window(j, l, theta) + curvelet_angular_window(j, l, theta + 0.5));
}

inline double curvelet_rotation_angle(int j, int l) {  // radians
  return std::ldexp(M_PI, -j) * static_cast<double>(l);
}

// normalization carried by the discrete curvelet gamma_j relative to the
// window chi_{j,0}
inline double curvelet_gamma_scale(int j) { return std::pow(2.0, -1.5 * j - 2.5); }

// Tight directional frame: low-pass chi0 plus 2^j angular wedges per scale
// j = 1..jmax with parabolic scaling.  The energy profile is exactly 1 on
// |xi| <= 2^{2 jmax + 2}/3, the working band.
inline SemiDiscreteFrame curvelet_windows(int jmax, const Grid& g) {
  if (g.dim != 2) throw std::invalid_argument("curvelet_windows is two-dimensional");
  if (jmax < 1) throw std::invalid_argument("curvelet_windows needs jmax >= 1");
  const double top_support = std::ldexp(1.0, 2 * jmax + 3) / 3.0;
  if (std::min(g.nyquist(0), g.nyquist(1)) + 1e-12 < top_support)
    throw std::invalid_argument("insufficient grid resolution for the requested scale count");

  std::vector<std::pair<std::string, Eigen::VectorXcd>> filters;
  Eigen::VectorXcd low(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b)
    low[b] = curvelet_lowpass_radial(frequency_of(g, b).norm());
  filters.emplace_back("chi0", std::move(low));
  for (int j = 1; j <= jmax; ++j) {
    for (int l = 0; l < (1 << j); ++l) {
      Eigen::VectorXcd wedge(g.size());
      for (Eigen::Index b = 0; b < g.size(); ++b)
        wedge[b] = curvelet_window(j, l, frequency_of(g, b));
      filters.emplace_back("chi" + std::to_string(j) + "_" + std::to_string(l), std::move(wedge));
    }
  }

  const double working = std::ldexp(1.0, 2 * jmax + 2) / 3.0;
  return make_frame(g, std::move(filters), radial_mask(g, working));
}

}  // namespace sigret
