#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "sigret/frame.hpp"
#include "sigret/grid.hpp"

namespace sigret {

// Transition profile: the quartic polynomial x^4(35 - 84x + 70x^2 - 20x^3),
// clamped to [0, 1]; satisfies beta(x) + beta(1 - x) = 1 exactly.
inline double meyer_beta(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

// |psi^|(xi) of the mother wavelet; support [-4/3, -1/3] u [1/3, 4/3]
inline double meyer_psi_magnitude(double xi) {
  const double a = std::abs(xi);
  if (a >= 1.0 / 3.0 && a <= 2.0 / 3.0) return std::sin(0.5 * M_PI * meyer_beta(3.0 * a - 1.0));
  if (a > 2.0 / 3.0 && a <= 4.0 / 3.0) return std::cos(0.5 * M_PI * meyer_beta(1.5 * a - 1.0));
  return 0.0;
}

inline std::complex<double> meyer_psi_hat(double xi) {
  const double m = meyer_psi_magnitude(xi);
  if (m == 0.0) return {0.0, 0.0};
  return m * std::exp(std::complex<double>(0.0, M_PI * xi));
}

// scaling function; support [-2/3, 2/3], identically 1 on [-1/3, 1/3]
inline double meyer_phi_hat(double xi) {
  const double a = std::abs(xi);
  if (a > 2.0 / 3.0) return 0.0;
  return std::cos(0.5 * M_PI * meyer_beta(3.0 * a - 1.0));
}

// Semi-discrete Meyer frame {phi} u {psi_j}_{j=0..J-1} with
// psi_j = 2^j psi(2^j .), i.e. psi_j^(xi) = psi^(2^{-j} xi).  The energy
// profile |phi^|^2 + sum_j |psi_j^|^2 equals 1 for |xi| <= 2^J/3, which is
// the working band; above it the top scale decays without a successor.
inline SemiDiscreteFrame meyer_frame(int num_scales, const Grid& g) {
  if (g.dim != 1) throw std::invalid_argument("meyer_frame is one-dimensional");
  if (num_scales < 1) throw std::invalid_argument("meyer_frame needs at least one scale");
  const double top_support = std::ldexp(1.0, num_scales + 1) / 3.0;  // 2^{J+1}/3
  if (g.nyquist(0) + 1e-12 < top_support)
    throw std::invalid_argument("insufficient grid bandwidth for the requested scale count");

  std::vector<std::pair<std::string, Eigen::VectorXcd>> filters;
  Eigen::VectorXcd phi(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b) phi[b] = meyer_phi_hat(bin_frequency(g, 0, b));
  filters.emplace_back("phi", std::move(phi));
  for (int j = 0; j < num_scales; ++j) {
    Eigen::VectorXcd psi(g.size());
    const double scale = std::ldexp(1.0, -j);
    for (Eigen::Index b = 0; b < g.size(); ++b)
      psi[b] = meyer_psi_hat(scale * bin_frequency(g, 0, b));
    filters.emplace_back("psi" + std::to_string(j), std::move(psi));
  }

  const double working = std::ldexp(1.0, num_scales) / 3.0;  // 2^J/3
  BoolArray band(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b)
    band[b] = std::abs(bin_frequency(g, 0, b)) <= working + 1e-12;
  return make_frame(g, std::move(filters), std::move(band));
}

}  // namespace sigret
