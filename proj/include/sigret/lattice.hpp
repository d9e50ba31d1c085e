#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sigret/fft.hpp"
#include "sigret/grid.hpp"
#include "sigret/signal.hpp"

namespace sigret {

// Sampling lattice commensurate with the grid: every lattice point within
// one period is a grid point.  `steps` is the generator expressed in grid
// units (an integer matrix), `sites` the flat grid indices of the lattice
// points, ordered lexicographically by lattice index.
struct SamplingLattice {
  Grid grid;
  Eigen::MatrixXd generator;  // d x d, columns are the lattice basis (physical units)
  Eigen::VectorXd shift;
  Eigen::MatrixXi steps;
  std::vector<Eigen::Index> sites;
};

// points per unit volume
inline double lattice_density(const SamplingLattice& lat) {
  return 1.0 / std::abs(lat.generator.determinant());
}

inline SamplingLattice make_lattice(const Grid& g, const Eigen::MatrixXd& generator,
                                    Eigen::VectorXd shift = Eigen::VectorXd()) {
  const int d = g.dim;
  if (generator.rows() != d || generator.cols() != d)
    throw std::invalid_argument("lattice generator must be d x d");
  if (std::abs(generator.determinant()) < 1e-300)
    throw std::invalid_argument("lattice generator is singular");
  if (shift.size() == 0) shift = Eigen::VectorXd::Zero(d);
  if (shift.size() != d) throw std::invalid_argument("lattice shift must have d entries");

  // generator and shift in grid units must be integral
  Eigen::MatrixXi steps(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) {
      const double u = generator(r, c) / g.spacing(r);
      const double n = std::round(u);
      if (std::abs(u - n) > 1e-9 * (std::abs(n) + 1.0))
        throw std::invalid_argument("lattice is not commensurate with the grid");
      steps(r, c) = static_cast<int>(n);
    }
  Eigen::VectorXi shift_steps(d);
  for (int r = 0; r < d; ++r) {
    const double u = shift[r] / g.spacing(r);
    const double n = std::round(u);
    if (std::abs(u - n) > 1e-9 * (std::abs(n) + 1.0))
      throw std::invalid_argument("lattice shift is not commensurate with the grid");
    shift_steps[r] = static_cast<int>(n);
  }
  const Eigen::MatrixXd stepsd = steps.cast<double>();
  if (std::abs(stepsd.determinant()) < 0.5)
    throw std::invalid_argument("lattice generator collapses on the grid");

  // the lattice must tile the period: steps^{-1} diag(N) integral
  const Eigen::MatrixXd inv_steps = stepsd.inverse();
  Eigen::MatrixXd period_steps = inv_steps;
  for (int c = 0; c < d; ++c) period_steps.col(c) *= static_cast<double>(g.extent[c]);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (std::abs(period_steps(r, c) - std::round(period_steps(r, c))) > 1e-7)
        throw std::invalid_argument("lattice does not tile the grid period");

  // enumerate grid points lying on the lattice
  struct Entry {
    long long n0, n1;
    Eigen::Index flat;
  };
  std::vector<Entry> entries;
  const Eigen::Index n0 = g.extent[0], n1 = g.extent[1];
  Eigen::Vector2d x;
  for (Eigen::Index i0 = 0; i0 < n0; ++i0) {
    for (Eigen::Index i1 = 0; i1 < n1; ++i1) {
      x[0] = static_cast<double>(i0 - shift_steps[0]);
      if (d == 2) x[1] = static_cast<double>(i1 - shift_steps[1]);
      const Eigen::VectorXd nidx = inv_steps * x.head(d);
      bool integral = true;
      for (int a = 0; a < d; ++a)
        if (std::abs(nidx[a] - std::round(nidx[a])) > 1e-6) integral = false;
      if (!integral) continue;
      Entry e;
      e.n0 = static_cast<long long>(std::llround(nidx[0]));
      e.n1 = d == 2 ? static_cast<long long>(std::llround(nidx[1])) : 0;
      e.flat = flat_index(g, i0, i1);
      entries.push_back(e);
    }
  }
  const double expected = static_cast<double>(g.size()) / std::abs(stepsd.determinant());
  if (std::abs(expected - static_cast<double>(entries.size())) > 0.5)
    throw std::invalid_argument("lattice enumeration failed to tile the period");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.n0 != b.n0 ? a.n0 < b.n0 : a.n1 < b.n1;
  });

  SamplingLattice lat;
  lat.grid = g;
  lat.generator = generator;
  lat.shift = shift;
  lat.steps = steps;
  lat.sites.reserve(entries.size());
  for (const auto& e : entries) lat.sites.push_back(e.flat);
  return lat;
}

// convenience: axis-aligned lattice with the given integer strides
inline SamplingLattice make_stride_lattice(const Grid& g, Eigen::Index stride0,
                                           Eigen::Index stride1 = 1) {
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(g.dim, g.dim);
  gen(0, 0) = static_cast<double>(stride0) * g.spacing(0);
  if (g.dim == 2) gen(1, 1) = static_cast<double>(stride1) * g.spacing(1);
  return make_lattice(g, gen);
}

inline Eigen::ArrayXd sample_on_lattice(const BandLimitedSignal& sig, const SamplingLattice& lat) {
  if (!(sig.grid == lat.grid)) throw std::invalid_argument("sample_on_lattice: grid mismatch");
  Eigen::ArrayXd out(static_cast<Eigen::Index>(lat.sites.size()));
  for (std::size_t i = 0; i < lat.sites.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = sig.values[lat.sites[i]];
  return out;
}

// ---------------------------------------------------------------------------
// Least-squares reconstruction from lattice samples.
//
// Restricted to the masked bins, the Gram matrix of the sampled Fourier
// basis is block diagonal over alias cosets: bins k, k' interact only when
// exp(2 pi i (k - k') . p / N) = 1 for every lattice point p.  Both the
// Gram entries and the right-hand side A^H y are slices of full-grid DFTs
// of site-supported arrays, so a fit costs two grid FFTs plus tiny
// per-coset solves.
// ---------------------------------------------------------------------------

struct LatticeSystem {
  Grid grid;
  std::vector<Eigen::Index> sites;
  std::vector<Eigen::Index> mask_bins;
  std::vector<std::vector<int>> cosets;    // indices into mask_bins
  Eigen::VectorXcd indicator_spectrum;     // DFT of the site indicator
  int max_occupancy = 0;
};

inline LatticeSystem build_lattice_system(const Grid& g, const SamplingLattice& lat,
                                          const BoolArray& mask) {
  if (!(g == lat.grid)) throw std::invalid_argument("lattice system: grid mismatch");
  if (mask.size() != g.size()) throw std::invalid_argument("lattice system: mask size mismatch");
  LatticeSystem sys;
  sys.grid = g;
  sys.sites = lat.sites;

  Eigen::VectorXcd indicator = Eigen::VectorXcd::Zero(g.size());
  for (const auto s : lat.sites) indicator[s] = 1.0;
  sys.indicator_spectrum = dft(g, indicator);

  // Bins k, k' alias on the lattice iff sum_a T_ac (k - k')_a / N_a is an
  // integer for every basis column c.  With N_max = max extent this reads
  // sum_a T_ac k_a (N_max / N_a) = const (mod N_max), which is the coset key.
  const Eigen::Matrix2i stepsT = [&] {
    Eigen::Matrix2i t = Eigen::Matrix2i::Identity();
    t.topLeftCorner(g.dim, g.dim) = lat.steps.transpose();
    return t;
  }();
  const long long nmax = std::max(g.extent[0], g.extent[1]);
  const long long w0 = nmax / g.extent[0];
  const long long w1 = nmax / g.extent[1];
  std::vector<std::pair<long long, int>> keyed;
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    if (!mask[b]) continue;
    const auto idx = unflatten(g, b);
    const long long k0 = bin_number(g, 0, idx[0]);
    const long long k1 = bin_number(g, 1, idx[1]);
    long long key = 0;
    for (int c = 0; c < 2; ++c) {
      const long long t = stepsT(c, 0) * k0 * w0 + stepsT(c, 1) * k1 * w1;
      key = key * nmax + (((t % nmax) + nmax) % nmax);
    }
    keyed.emplace_back(key, static_cast<int>(sys.mask_bins.size()));
    sys.mask_bins.push_back(b);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    std::vector<int> group;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) group.push_back(keyed[j++].second);
    sys.max_occupancy = std::max<int>(sys.max_occupancy, static_cast<int>(group.size()));
    sys.cosets.push_back(std::move(group));
    i = j;
  }
  return sys;
}

// Ridge least-squares fit of a masked spectrum to the sample values.
// Returns the full-size spectrum (zero off the mask).
inline Eigen::VectorXcd lattice_ls_fit(const LatticeSystem& sys, const Eigen::ArrayXd& samples,
                                       double ridge = 1e-12) {
  const Grid& g = sys.grid;
  if (static_cast<std::size_t>(samples.size()) != sys.sites.size())
    throw std::invalid_argument("sample count does not match lattice");

  Eigen::VectorXcd spread = Eigen::VectorXcd::Zero(g.size());
  for (std::size_t i = 0; i < sys.sites.size(); ++i)
    spread[sys.sites[i]] = samples[static_cast<Eigen::Index>(i)];
  const Eigen::VectorXcd rhs_full = dft(g, spread);  // (Pi L) * A^H y

  // Gram entry between mask bins b, b' is indicator_spectrum at bin
  // difference (b - b'), scaled by 1/(Pi L)^2.  The common positive scale
  // drops out of the solve, so work with the unscaled quantities.
  const auto bin_diff = [&](Eigen::Index b, Eigen::Index c) {
    const auto ib = unflatten(g, b);
    const auto ic = unflatten(g, c);
    const Eigen::Index d0 = ((ib[0] - ic[0]) % g.extent[0] + g.extent[0]) % g.extent[0];
    const Eigen::Index d1 = ((ib[1] - ic[1]) % g.extent[1] + g.extent[1]) % g.extent[1];
    return flat_index(g, d0, d1);
  };

  const double scale = static_cast<double>(sys.sites.size());  // diagonal Gram magnitude
  Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(g.size());
  for (const auto& coset : sys.cosets) {
    const int q = static_cast<int>(coset.size());
    if (q == 1) {
      const Eigen::Index b = sys.mask_bins[coset[0]];
      coeff[b] = g.total_volume() * rhs_full[b] / (scale + ridge);
      continue;
    }
    Eigen::MatrixXcd gram(q, q);
    Eigen::VectorXcd rhs(q);
    for (int i = 0; i < q; ++i) {
      const Eigen::Index bi = sys.mask_bins[coset[i]];
      rhs[i] = rhs_full[bi];
      for (int j = 0; j < q; ++j)
        gram(i, j) = sys.indicator_spectrum[bin_diff(bi, sys.mask_bins[coset[j]])];
      gram(i, i) += ridge;
    }
    const Eigen::VectorXcd c = gram.ldlt().solve(rhs);
    for (int i = 0; i < q; ++i) coeff[sys.mask_bins[coset[i]]] = g.total_volume() * c[i];
  }

  // exact-ify Hermitian symmetry (the solve preserves it up to rounding)
  Eigen::VectorXcd sym = coeff;
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    const Eigen::Index c = conjugate_bin(g, b);
    sym[b] = 0.5 * (coeff[b] + std::conj(coeff[c]));
  }
  return sym;
}

// grid-space values of a spectrum, gathered at the lattice sites
inline Eigen::ArrayXd evaluate_spectrum_at_sites(const Grid& g, const Eigen::VectorXcd& spectrum,
                                                 const std::vector<Eigen::Index>& sites) {
  const Eigen::VectorXcd x = idft(g, spectrum) / g.cell_volume();
  Eigen::ArrayXd out(static_cast<Eigen::Index>(sites.size()));
  for (std::size_t i = 0; i < sites.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = x[sites[i]].real();
  return out;
}

// Unique band-limited interpolant of the samples.  Rejects lattices that
// are not stable sampling sets for the support (two masked bins aliasing
// to the same coset, i.e. indistinguishable on the lattice).
inline BandLimitedSignal interpolate_from_lattice(const Eigen::ArrayXd& samples,
                                                  const SamplingLattice& lat,
                                                  const FrequencySupport& support, const Grid& g,
                                                  double ridge = 1e-12) {
  LatticeSystem sys = build_lattice_system(g, lat, support.mask);
  if (sys.max_occupancy > 1)
    throw std::invalid_argument(
        "not a stable sampling set: lattice aliases distinct support bins");
  const Eigen::VectorXcd spec = lattice_ls_fit(sys, samples, ridge);
  return signal_from_spectrum(g, spec, support);
}

}  // namespace sigret
