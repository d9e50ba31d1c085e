#pragma once

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "sigret/grid.hpp"

namespace sigret {

// Unnormalized DFT over the grid, X[k] = sum_i x[i] exp(-2 pi i k.i/N),
// stored in the same row-major flat layout as the input.
inline Eigen::VectorXcd dft(const Grid& g, const Eigen::VectorXcd& x) {
  Eigen::FFT<double> fft;
  if (g.dim == 1) {
    Eigen::VectorXcd out;
    fft.fwd(out, x);
    return out;
  }
  const Eigen::Index n0 = g.extent[0], n1 = g.extent[1];
  Eigen::MatrixXcd m = Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                                      Eigen::Dynamic, Eigen::RowMajor>>(
                           x.data(), n0, n1)
                           .eval();
  Eigen::VectorXcd tmp, ftmp;
  for (Eigen::Index r = 0; r < n0; ++r) {
    tmp = m.row(r).transpose();
    fft.fwd(ftmp, tmp);
    m.row(r) = ftmp.transpose();
  }
  for (Eigen::Index c = 0; c < n1; ++c) {
    tmp = m.col(c);
    fft.fwd(ftmp, tmp);
    m.col(c) = ftmp;
  }
  Eigen::VectorXcd out(g.size());
  Eigen::Map<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), n0, n1) = m;
  return out;
}

// Inverse of dft(), including the 1/(N_0 N_1) factor.
inline Eigen::VectorXcd idft(const Grid& g, const Eigen::VectorXcd& X) {
  Eigen::FFT<double> fft;
  if (g.dim == 1) {
    Eigen::VectorXcd out;
    fft.inv(out, X);
    return out;
  }
  const Eigen::Index n0 = g.extent[0], n1 = g.extent[1];
  Eigen::MatrixXcd m = Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                                      Eigen::Dynamic, Eigen::RowMajor>>(
                           X.data(), n0, n1)
                           .eval();
  Eigen::VectorXcd tmp, ftmp;
  for (Eigen::Index r = 0; r < n0; ++r) {
    tmp = m.row(r).transpose();
    fft.inv(ftmp, tmp);
    m.row(r) = ftmp.transpose();
  }
  for (Eigen::Index c = 0; c < n1; ++c) {
    tmp = m.col(c);
    fft.inv(ftmp, tmp);
    m.col(c) = ftmp;
  }
  Eigen::VectorXcd out(g.size());
  Eigen::Map<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), n0, n1) = m;
  return out;
}

}  // namespace sigret
