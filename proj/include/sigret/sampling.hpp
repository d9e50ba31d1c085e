#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sigret/frame.hpp"
#include "sigret/grid.hpp"
#include "sigret/lattice.hpp"

namespace sigret {

// Recipe for a sign-blind sampling lattice: a support F, a bounding box M
// with F contained in M[-1/2,1/2]^d, and per-axis dilations s_i >= 1.
// The lattice is (M^T)^{-1} D[2s]^{-1} Z^d; its density 2^d |det M| prod s
// is twice the critical (signed) rate per dimension.
struct SignBlindSpec {
  FrequencySupport support;
  Eigen::MatrixXd box;
  Eigen::VectorXd dilation;
};

inline SignBlindSpec make_sign_blind_spec(const Grid& g, const FrequencySupport& support,
                                          Eigen::MatrixXd box, Eigen::VectorXd dilation) {
  if (box.rows() != g.dim || box.cols() != g.dim)
    throw std::invalid_argument("bounding matrix must be d x d");
  if (dilation.size() != g.dim) throw std::invalid_argument("dilation must have d entries");
  for (int a = 0; a < g.dim; ++a)
    if (dilation[a] < 1.0 - 1e-12)
      throw std::invalid_argument("sub-critical dilation: s_" + std::to_string(a) + " = " +
                                  std::to_string(dilation[a]) + " < 1");
  check_support_containment(g, support.mask, box);
  return SignBlindSpec{support, std::move(box), std::move(dilation)};
}

inline Eigen::MatrixXd sign_blind_generator(const SignBlindSpec& spec) {
  Eigen::VectorXd inv2s = spec.dilation;
  for (Eigen::Index a = 0; a < inv2s.size(); ++a) inv2s[a] = 0.5 / inv2s[a];
  return spec.box.transpose().inverse() * inv2s.asDiagonal().toDenseMatrix();
}

inline double sign_blind_density(const SignBlindSpec& spec) {
  const int d = static_cast<int>(spec.box.rows());
  return std::ldexp(1.0, d) * std::abs(spec.box.determinant()) * spec.dilation.prod();
}

inline SamplingLattice make_sign_blind_lattice(const SignBlindSpec& spec, const Grid& g,
                                               Eigen::VectorXd shift = Eigen::VectorXd()) {
  SamplingLattice lat = make_lattice(g, sign_blind_generator(spec), std::move(shift));
  // cross-check the density identity 2^d |det M| prod s_j
  const double want = sign_blind_density(spec);
  if (std::abs(lattice_density(lat) - want) > 1e-9 * want)
    throw std::invalid_argument("lattice density does not match 2^d det(M) prod s");
  return lat;
}

// Minimal box of the form orientation * diag(c) containing the masked
// frequencies, padded by `slack_bins` bin widths per axis.  Shrinking any
// c_a by more than one bin width breaks containment.
inline Eigen::MatrixXd fit_bounding_box(const Grid& g, const BoolArray& mask,
                                        const Eigen::MatrixXd& orientation,
                                        int slack_bins = 1) {
  if (mask.size() != g.size()) throw std::invalid_argument("mask size mismatch");
  if (!mask.any()) throw std::invalid_argument("cannot fit a box to an empty support");
  Eigen::VectorXd ext = Eigen::VectorXd::Zero(g.dim);
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    if (!mask[b]) continue;
    const Eigen::VectorXd t = orientation.transpose() * frequency_of(g, b).head(g.dim);
    for (int a = 0; a < g.dim; ++a) ext[a] = std::max(ext[a], std::abs(t[a]));
  }
  Eigen::VectorXd c(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    double bin_width = 0.0;  // l1 diameter of one bin step along rotated axis a
    for (int ax = 0; ax < g.dim; ++ax)
      bin_width += std::abs(orientation(ax, a)) / g.period[ax];
    c[a] = 2.0 * ext[a] + static_cast<double>(slack_bins) * bin_width;
  }
  return orientation * c.asDiagonal().toDenseMatrix();
}

inline Eigen::MatrixXd fit_bounding_box(const Grid& g, const BoolArray& mask,
                                        int slack_bins = 1) {
  return fit_bounding_box(g, mask, Eigen::MatrixXd::Identity(g.dim, g.dim), slack_bins);
}

// Smallest commensurate box extent c >= c_min on the given axis: the
// lattice spacing 1/(2 c s) must be an integer (power-of-two) multiple of
// the grid spacing so lattice points land on grid points.
inline double commensurate_box_extent(const Grid& g, int axis, double c_min, double s = 1.0) {
  const double h = g.spacing(axis);
  const double spacing_req = 0.5 / (c_min * s);
  if (spacing_req < h * (1.0 - 1e-12))
    throw std::invalid_argument("grid too coarse for the requested sampling density");
  Eigen::Index m = 1;
  while (2 * m <= g.extent[axis] && 2.0 * static_cast<double>(m) * h <= spacing_req * (1 + 1e-12))
    m *= 2;
  return 0.5 / (s * static_cast<double>(m) * h);
}

// Axis-aligned sign-blind lattice for each frame band: bounding box fit to
// the band support, extents rounded to the nearest commensurate value.
inline std::vector<SamplingLattice> sign_blind_lattices_for_frame(const SemiDiscreteFrame& frame,
                                                                  double s = 1.0) {
  const Grid& g = frame.grid;
  std::vector<SamplingLattice> lattices;
  lattices.reserve(frame.bands.size());
  for (const auto& band : frame.bands) {
    const Eigen::MatrixXd fit = fit_bounding_box(g, band.support.mask);
    Eigen::MatrixXd box = Eigen::MatrixXd::Zero(g.dim, g.dim);
    for (int a = 0; a < g.dim; ++a) box(a, a) = commensurate_box_extent(g, a, fit(a, a), s);
    const SignBlindSpec spec = make_sign_blind_spec(
        g, band.support, box, Eigen::VectorXd::Constant(g.dim, s));
    lattices.push_back(make_sign_blind_lattice(spec, g));
  }
  return lattices;
}

// ---------------------------------------------------------------------------
// Meyer oversampling
// ---------------------------------------------------------------------------

// Gate for the oversampled Meyer system: translates at step alpha do sign
// retrieval iff alpha <= 3/16.
inline bool meyer_alpha_check(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return alpha <= 3.0 / 16.0 + 1e-12;
}

// translation step <-> per-scale box extent: alpha = 2^{j-1} / c_j
inline double meyer_alpha_of_box(int j, double c_j) { return std::ldexp(1.0, j - 1) / c_j; }
inline double meyer_box_of_alpha(int j, double alpha) { return std::ldexp(1.0, j - 1) / alpha; }

// Per-band lattices of the oversampled Meyer system: spacing alpha 2^{-j}
// for scale j and alpha for the scaling function, in meyer_frame band
// order.  Throws if alpha is not commensurate with the grid.
inline std::vector<SamplingLattice> meyer_lattices(const SemiDiscreteFrame& frame, double alpha) {
  const Grid& g = frame.grid;
  if (g.dim != 1) throw std::invalid_argument("meyer_lattices is one-dimensional");
  std::vector<SamplingLattice> lattices;
  lattices.reserve(frame.bands.size());
  for (const auto& band : frame.bands) {
    const double spacing = band.label == "phi"
                               ? alpha
                               : alpha * std::ldexp(1.0, -std::stoi(band.label.substr(3)));
    Eigen::MatrixXd box(1, 1);
    box(0, 0) = 0.5 / spacing;
    const SignBlindSpec spec =
        make_sign_blind_spec(g, band.support, box, Eigen::VectorXd::Ones(1));
    lattices.push_back(make_sign_blind_lattice(spec, g));
  }
  return lattices;
}

}  // namespace sigret
