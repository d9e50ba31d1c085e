#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>

#include "sigret/fft.hpp"
#include "sigret/grid.hpp"

namespace sigret {

// Real signal on a periodic grid whose spectrum lives on support.mask.
// The transform pair is the Riemann-sum surrogate of
//   f^(xi) = int f(x) exp(-2 pi i x.xi) dx,
// i.e. forward = cell_volume * DFT and inverse = IDFT / cell_volume, so
// that (f * g)^ = f^ g^ holds exactly for circular convolution scaled by
// the cell volume.
struct BandLimitedSignal {
  Grid grid;
  Eigen::ArrayXd values;
  FrequencySupport support;
};

inline Eigen::VectorXcd forward_spectrum(const Grid& g, const Eigen::ArrayXd& values) {
  if (!values.isFinite().all()) throw std::invalid_argument("signal has non-finite values");
  return g.cell_volume() * dft(g, values.matrix().cast<std::complex<double>>());
}

inline Eigen::VectorXcd forward_spectrum(const BandLimitedSignal& sig) {
  return forward_spectrum(sig.grid, sig.values);
}

// Inverse transform; rejects spectra whose inverse is not real to 1e-10
// relative (i.e. not Hermitian-symmetric).
inline Eigen::ArrayXd inverse_to_real(const Grid& g, const Eigen::VectorXcd& spectrum) {
  const Eigen::VectorXcd x = idft(g, spectrum) / g.cell_volume();
  // scale includes the input magnitude so that all-zero outputs (pure
  // roundoff) are not measured against themselves
  const double scale = std::max({x.cwiseAbs().maxCoeff(),
                                 spectrum.cwiseAbs().maxCoeff() / g.total_volume(), 1e-300});
  const double imag_residue = x.imag().cwiseAbs().maxCoeff() / scale;
  if (imag_residue > 1e-10)
    throw std::invalid_argument("spectrum is not Hermitian-symmetric: imaginary residue " +
                                std::to_string(imag_residue));
  return x.real().array();
}

inline double l2_norm(const Grid& g, const Eigen::ArrayXd& values) {
  return std::sqrt(g.cell_volume() * values.square().sum());
}

inline double l2_norm(const BandLimitedSignal& sig) { return l2_norm(sig.grid, sig.values); }

inline double spectrum_l2_norm(const Grid& g, const Eigen::VectorXcd& spec) {
  return std::sqrt(spec.squaredNorm() / g.total_volume());
}

// Fraction of spectral energy lying outside the mask.
inline double out_of_band_energy(const Grid& g, const Eigen::VectorXcd& spec,
                                 const BoolArray& mask) {
  double inside = 0.0, total = 0.0;
  for (Eigen::Index b = 0; b < spec.size(); ++b) {
    const double e = std::norm(spec[b]);
    total += e;
    if (mask[b]) inside += e;
  }
  return total > 0.0 ? (total - inside) / total : 0.0;
}

inline BandLimitedSignal make_band_limited(const Grid& g, Eigen::ArrayXd values,
                                           FrequencySupport support) {
  if (values.size() != g.size()) throw std::invalid_argument("value array size mismatch");
  if (!values.isFinite().all()) throw std::invalid_argument("signal has non-finite values");
  const Eigen::VectorXcd spec = forward_spectrum(g, values);
  const double leak = out_of_band_energy(g, spec, support.mask);
  if (leak > 1e-10)
    throw std::invalid_argument("spectral energy outside declared support: " +
                                std::to_string(leak));
  return BandLimitedSignal{g, std::move(values), std::move(support)};
}

inline BandLimitedSignal signal_from_spectrum(const Grid& g, Eigen::VectorXcd spec,
                                              FrequencySupport support) {
  for (Eigen::Index b = 0; b < spec.size(); ++b)
    if (!support.mask[b]) spec[b] = 0.0;
  return BandLimitedSignal{g, inverse_to_real(g, spec), std::move(support)};
}

// Pointwise spectral product with a filter spectrum.  The result is
// band-limited to the intersection of the signal mask with the bins where
// the filter is above the support threshold.
inline BandLimitedSignal convolve(const BandLimitedSignal& f, const Eigen::VectorXcd& filter,
                                  double support_threshold = 1e-12) {
  if (filter.size() != f.grid.size())
    throw std::invalid_argument("filter spectrum does not match signal grid");
  Eigen::VectorXcd spec = forward_spectrum(f);
  BoolArray mask(f.grid.size());
  for (Eigen::Index b = 0; b < spec.size(); ++b) {
    mask[b] = f.support.mask[b] && std::abs(filter[b]) > support_threshold;
    spec[b] = mask[b] ? spec[b] * filter[b] : 0.0;
  }
  FrequencySupport support{mask, f.support.bounding, f.support.dilation};
  return BandLimitedSignal{f.grid, inverse_to_real(f.grid, spec), std::move(support)};
}

inline BandLimitedSignal convolve(const BandLimitedSignal& f, const BandLimitedSignal& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("convolve: grid mismatch");
  return convolve(f, forward_spectrum(g));
}

// Random real signal with spectrum on `mask`: independent Gaussian bin
// coefficients, Hermitian-symmetrized, self-conjugate bins kept real.
inline BandLimitedSignal random_band_limited(const Grid& g, const BoolArray& mask,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    if (!mask[b]) continue;
    const Eigen::Index c = conjugate_bin(g, b);
    if (!mask[c]) continue;  // keep the mask effect symmetric
    if (c == b) {
      spec[b] = std::complex<double>(gauss(rng), 0.0);
    } else if (b < c) {
      const std::complex<double> z(gauss(rng), gauss(rng));
      spec[b] = z;
      spec[c] = std::conj(z);
    }
  }
  return signal_from_spectrum(g, std::move(spec), make_support_auto(g, mask));
}

// Same, then shaped in space by a centered Gaussian envelope (width
// `width_fraction` of the period) and re-projected onto the mask; keeps
// the signal mass away from the periodization boundary.
inline BandLimitedSignal random_band_limited_enveloped(const Grid& g, const BoolArray& mask,
                                                       std::mt19937_64& rng,
                                                       double width_fraction = 0.125) {
  BandLimitedSignal raw = random_band_limited(g, mask, rng);
  Eigen::ArrayXd enveloped(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Eigen::Vector2d x = point_of(g, i);
    double q = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double c = 0.5 * g.period[a];
      const double w = width_fraction * g.period[a];
      q += ((x[a] - c) / w) * ((x[a] - c) / w);
    }
    enveloped[i] = raw.values[i] * std::exp(-q);
  }
  Eigen::VectorXcd spec = forward_spectrum(g, enveloped);
  BandLimitedSignal out = signal_from_spectrum(g, std::move(spec), raw.support);
  const double n = l2_norm(out);
  if (n > 0) out.values /= n;
  return out;
}

}  // namespace sigret
