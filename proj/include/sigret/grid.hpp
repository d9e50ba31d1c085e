#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sigret/util.hpp"

namespace sigret {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Periodic sampling grid on [0, L_0) x [0, L_1).  For d = 1 the second axis
// is a degenerate singleton (extent 1, period 1) so loops can stay
// dimension-agnostic.  Frequency bins on axis a run over
// k in {-N_a/2, ..., N_a/2 - 1} with physical frequency k / L_a.
struct Grid {
  int dim = 1;
  std::array<Eigen::Index, 2> extent{1, 1};
  std::array<double, 2> period{1.0, 1.0};

  Eigen::Index size() const { return extent[0] * extent[1]; }
  double spacing(int axis) const { return period[axis] / static_cast<double>(extent[axis]); }
  double cell_volume() const { return spacing(0) * spacing(1); }
  double total_volume() const { return period[0] * period[1]; }
  // highest representable |frequency| on an axis (Nyquist edge)
  double nyquist(int axis) const { return static_cast<double>(extent[axis]) / (2.0 * period[axis]); }

  bool operator==(const Grid& o) const {
    return dim == o.dim && extent == o.extent && period == o.period;
  }
};

inline Grid make_grid_1d(Eigen::Index n, double length) {
  if (!is_power_of_two(n) || n < 4)
    throw std::invalid_argument("grid extent must be a power of two >= 4");
  if (!(length > 0.0)) throw std::invalid_argument("grid period must be positive");
  Grid g;
  g.dim = 1;
  g.extent = {n, 1};
  g.period = {length, 1.0};
  return g;
}

inline Grid make_grid_2d(Eigen::Index n0, Eigen::Index n1, double l0, double l1) {
  if (!is_power_of_two(n0) || n0 < 4 || !is_power_of_two(n1) || n1 < 4)
    throw std::invalid_argument("grid extents must be powers of two >= 4");
  if (!(l0 > 0.0) || !(l1 > 0.0)) throw std::invalid_argument("grid periods must be positive");
  Grid g;
  g.dim = 2;
  g.extent = {n0, n1};
  g.period = {l0, l1};
  return g;
}

// flat storage is row-major over (i0, i1)
inline Eigen::Index flat_index(const Grid& g, Eigen::Index i0, Eigen::Index i1 = 0) {
  return i0 * g.extent[1] + i1;
}

inline std::array<Eigen::Index, 2> unflatten(const Grid& g, Eigen::Index flat) {
  return {flat / g.extent[1], flat % g.extent[1]};
}

// signed bin number for storage index b on one axis
inline Eigen::Index bin_number(const Grid& g, int axis, Eigen::Index b) {
  return b < (g.extent[axis] + 1) / 2 ? b : b - g.extent[axis];
}

inline double bin_frequency(const Grid& g, int axis, Eigen::Index b) {
  return static_cast<double>(bin_number(g, axis, b)) / g.period[axis];
}

// physical frequency vector of a flat bin index (second component 0 in 1D)
inline Eigen::Vector2d frequency_of(const Grid& g, Eigen::Index flat) {
  const auto idx = unflatten(g, flat);
  return {bin_frequency(g, 0, idx[0]), bin_frequency(g, 1, idx[1])};
}

// flat index of the bin with the opposite frequency (Hermitian partner);
// bins at -N/2 are their own partner.
inline Eigen::Index conjugate_bin(const Grid& g, Eigen::Index flat) {
  const auto idx = unflatten(g, flat);
  const Eigen::Index j0 = (g.extent[0] - idx[0]) % g.extent[0];
  const Eigen::Index j1 = (g.extent[1] - idx[1]) % g.extent[1];
  return flat_index(g, j0, j1);
}

// spatial coordinate of a flat grid index
inline Eigen::Vector2d point_of(const Grid& g, Eigen::Index flat) {
  const auto idx = unflatten(g, flat);
  return {static_cast<double>(idx[0]) * g.spacing(0), static_cast<double>(idx[1]) * g.spacing(1)};
}

// Compact spectral support: a bin mask plus the bounding parallelepiped M
// (frequencies of masked bins satisfy M^{-1} xi in [-1/2, 1/2]^d) and the
// per-axis oversampling dilation s_i >= 1.
struct FrequencySupport {
  BoolArray mask;
  Eigen::MatrixXd bounding;
  Eigen::VectorXd dilation;

  Eigen::Index bin_count() const { return mask.count(); }
};

// Lebesgue measure of the support, counted bin-by-bin (bin volume is
// 1/(L_0 L_1)).
inline double support_measure(const Grid& g, const FrequencySupport& f) {
  return static_cast<double>(f.mask.count()) / g.total_volume();
}

inline void check_support_containment(const Grid& g, const BoolArray& mask,
                                      const Eigen::MatrixXd& box) {
  const Eigen::MatrixXd inv = box.inverse();
  double worst = 0.0;
  Eigen::Index worst_bin = -1;
  for (Eigen::Index b = 0; b < mask.size(); ++b) {
    if (!mask[b]) continue;
    const Eigen::VectorXd t = inv * frequency_of(g, b).head(g.dim);
    const double m = t.cwiseAbs().maxCoeff();
    if (m > worst) {
      worst = m;
      worst_bin = b;
    }
  }
  if (worst > 0.5 + 1e-9) {
    std::ostringstream msg;
    msg << "F not contained in M[-1/2,1/2]^d: bin " << worst_bin << " at frequency ("
        << frequency_of(g, worst_bin).transpose() << ") maps to coordinate " << worst;
    throw std::invalid_argument(msg.str());
  }
}

inline FrequencySupport make_support(const Grid& g, BoolArray mask, Eigen::MatrixXd bounding,
                                     Eigen::VectorXd dilation) {
  if (mask.size() != g.size()) throw std::invalid_argument("support mask size does not match grid");
  if (bounding.rows() != g.dim || bounding.cols() != g.dim)
    throw std::invalid_argument("bounding matrix must be d x d");
  if (std::abs(bounding.determinant()) <= 1e-12)
    throw std::invalid_argument("bounding matrix is singular");
  if (dilation.size() != g.dim) throw std::invalid_argument("dilation must have d entries");
  check_support_containment(g, mask, bounding);
  return FrequencySupport{std::move(mask), std::move(bounding), std::move(dilation)};
}

// Support whose box is the axis-aligned fit of the mask (one-bin slack per
// axis); convenient for signals built directly from a mask.
inline FrequencySupport make_support_auto(const Grid& g, BoolArray mask) {
  Eigen::VectorXd ext = Eigen::VectorXd::Zero(g.dim);
  for (Eigen::Index b = 0; b < mask.size(); ++b) {
    if (!mask[b]) continue;
    const Eigen::Vector2d xi = frequency_of(g, b);
    for (int a = 0; a < g.dim; ++a) ext[a] = std::max(ext[a], std::abs(xi[a]));
  }
  Eigen::MatrixXd box = Eigen::MatrixXd::Identity(g.dim, g.dim);
  for (int a = 0; a < g.dim; ++a) box(a, a) = 2.0 * ext[a] + 1.0 / g.period[a];
  return make_support(g, std::move(mask), box, Eigen::VectorXd::Ones(g.dim));
}

// all-true mask helper
inline BoolArray full_mask(const Grid& g) { return BoolArray::Constant(g.size(), true); }

// mask of bins with |xi| <= radius (Euclidean in physical frequency)
inline BoolArray radial_mask(const Grid& g, double radius) {
  BoolArray m(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b) m[b] = frequency_of(g, b).norm() <= radius + 1e-12;
  return m;
}

}  // namespace sigret
