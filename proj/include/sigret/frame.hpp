#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sigret/grid.hpp"
#include "sigret/signal.hpp"

namespace sigret {

struct FrameBand {
  std::string label;
  Eigen::VectorXcd spectrum;  // psi^_lambda over bins
  FrequencySupport support;   // bins with |psi^| > support threshold
};

// Filter bank whose translates form a semi-discrete frame on the working
// band: A <= sum_lambda |psi^_lambda(xi)|^2 <= B for working-band bins xi.
struct SemiDiscreteFrame {
  Grid grid;
  std::vector<FrameBand> bands;
  BoolArray working_band;
  std::vector<std::string> warnings;

  int band_index(const std::string& label) const {
    for (std::size_t i = 0; i < bands.size(); ++i)
      if (bands[i].label == label) return static_cast<int>(i);
    return -1;
  }
};

inline Eigen::ArrayXd frame_energy_profile(const SemiDiscreteFrame& frame) {
  Eigen::ArrayXd s = Eigen::ArrayXd::Zero(frame.grid.size());
  for (const auto& band : frame.bands) s += band.spectrum.array().abs2();
  return s;
}

inline SemiDiscreteFrame make_frame(const Grid& g,
                                    std::vector<std::pair<std::string, Eigen::VectorXcd>> filters,
                                    BoolArray working_band, double support_threshold = 1e-12) {
  if (filters.empty()) throw std::invalid_argument("frame needs at least one band");
  if (working_band.size() != g.size())
    throw std::invalid_argument("working band mask size mismatch");
  SemiDiscreteFrame frame;
  frame.grid = g;
  frame.working_band = std::move(working_band);
  for (auto& [label, spec] : filters) {
    if (spec.size() != g.size()) throw std::invalid_argument("filter spectrum size mismatch");
    const double top = spec.cwiseAbs().maxCoeff();
    for (Eigen::Index b = 0; b < g.size(); ++b) {
      const std::complex<double> mirror = std::conj(spec[conjugate_bin(g, b)]);
      if (std::abs(spec[b] - mirror) > 1e-10 * std::max(top, 1e-300))
        throw std::invalid_argument("band '" + label +
                                    "' is not real-valued in space (spectrum not Hermitian)");
    }
    BoolArray mask(g.size());
    for (Eigen::Index b = 0; b < g.size(); ++b) mask[b] = std::abs(spec[b]) > support_threshold;
    FrameBand band{std::move(label), std::move(spec), make_support_auto(g, std::move(mask))};
    frame.bands.push_back(std::move(band));
  }
  return frame;
}

// Tightest constants of the energy inequality over the working band.
inline std::pair<double, double> frame_bounds(const SemiDiscreteFrame& frame) {
  if (frame.bands.empty()) throw std::invalid_argument("frame is empty");
  const Eigen::ArrayXd s = frame_energy_profile(frame);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index b = 0; b < frame.grid.size(); ++b) {
    if (!frame.working_band[b]) continue;
    lo = std::min(lo, s[b]);
    hi = std::max(hi, s[b]);
  }
  if (!(lo > 0.0))
    throw std::invalid_argument("not a frame on working band: lower bound vanishes");
  return {lo, hi};
}

// Dual filters psi~^ = psi^ / sum |psi^|^2, computed where the energy
// profile stays above A/2; bins below that (necessarily outside the
// working band) are zeroed and counted in the frame warnings.
inline SemiDiscreteFrame dual_frame(const SemiDiscreteFrame& frame) {
  const auto [lo, hi] = frame_bounds(frame);
  (void)hi;
  const Eigen::ArrayXd s = frame_energy_profile(frame);
  SemiDiscreteFrame dual = frame;
  Eigen::Index zeroed = 0;
  for (auto& band : dual.bands) {
    for (Eigen::Index b = 0; b < frame.grid.size(); ++b) {
      if (s[b] >= 0.5 * lo) {
        band.spectrum[b] /= s[b];
      } else {
        if (std::abs(band.spectrum[b]) > 0) ++zeroed;
        band.spectrum[b] = 0.0;
      }
    }
    BoolArray mask(frame.grid.size());
    for (Eigen::Index b = 0; b < frame.grid.size(); ++b)
      mask[b] = std::abs(band.spectrum[b]) > 1e-12;
    band.support = make_support_auto(frame.grid, std::move(mask));
  }
  if (zeroed > 0) {
    std::ostringstream msg;
    msg << "dual frame: zeroed " << zeroed << " bins where the energy profile fell below A/2";
    dual.warnings.push_back(msg.str());
  }
  return dual;
}

inline std::vector<BandLimitedSignal> analyze(const BandLimitedSignal& f,
                                              const SemiDiscreteFrame& frame) {
  if (!(f.grid == frame.grid)) throw std::invalid_argument("analyze: grid mismatch");
  std::vector<BandLimitedSignal> parts;
  parts.reserve(frame.bands.size());
  for (const auto& band : frame.bands) parts.push_back(convolve(f, band.spectrum));
  return parts;
}

// f = sum_lambda parts_lambda * psi~_lambda^* with the conjugation taken in
// frequency (spatial reflection for real filters); inverts analyze().
inline BandLimitedSignal synthesize(const std::vector<BandLimitedSignal>& parts,
                                    const SemiDiscreteFrame& frame) {
  if (parts.size() != frame.bands.size())
    throw std::invalid_argument("synthesize: expected one part per band");
  const SemiDiscreteFrame dual = dual_frame(frame);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(frame.grid.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!(parts[i].grid == frame.grid)) throw std::invalid_argument("synthesize: grid mismatch");
    acc += forward_spectrum(parts[i]).cwiseProduct(dual.bands[i].spectrum.conjugate());
  }
  const double top = acc.cwiseAbs().maxCoeff();
  BoolArray mask(frame.grid.size());
  for (Eigen::Index b = 0; b < frame.grid.size(); ++b)
    mask[b] = std::abs(acc[b]) > 1e-14 * std::max(top, 1e-300);
  return signal_from_spectrum(frame.grid, std::move(acc),
                              make_support_auto(frame.grid, std::move(mask)));
}

// ---------------------------------------------------------------------------
// Fourier-support overlap graph
// ---------------------------------------------------------------------------

struct OverlapEdge {
  int a = 0, b = 0;
  std::vector<Eigen::Index> bins;  // U_a intersect U_b
  double floor_a = 0.0, floor_b = 0.0;
};

struct OverlapGraph {
  std::vector<std::string> labels;
  std::vector<OverlapEdge> edges;
  bool connected = false;
};

// U_lambda = bins where |psi^_lambda| exceeds the cover threshold; edges
// where two covers intersect.  With require_cover the union of the
// U_lambda must contain the working band.
inline OverlapGraph overlap_graph(const SemiDiscreteFrame& frame, bool require_cover = true,
                                  double cover_threshold = 1e-6) {
  const Eigen::Index nbins = frame.grid.size();
  const int nb = static_cast<int>(frame.bands.size());
  std::vector<BoolArray> covers(nb);
  for (int i = 0; i < nb; ++i) {
    covers[i] = BoolArray(nbins);
    for (Eigen::Index b = 0; b < nbins; ++b)
      covers[i][b] = std::abs(frame.bands[i].spectrum[b]) > cover_threshold;
  }

  if (require_cover) {
    std::vector<Eigen::Index> uncovered;
    for (Eigen::Index b = 0; b < nbins; ++b) {
      if (!frame.working_band[b]) continue;
      bool hit = false;
      for (int i = 0; i < nb && !hit; ++i) hit = covers[i][b];
      if (!hit) uncovered.push_back(b);
    }
    if (!uncovered.empty()) {
      std::ostringstream msg;
      msg << "no good F-support overlap on working band: " << uncovered.size()
          << " uncovered bins, first at frequencies";
      for (std::size_t i = 0; i < std::min<std::size_t>(uncovered.size(), 6); ++i)
        msg << " (" << frequency_of(frame.grid, uncovered[i]).transpose() << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  OverlapGraph graph;
  for (const auto& band : frame.bands) graph.labels.push_back(band.label);
  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      OverlapEdge e;
      e.a = i;
      e.b = j;
      double fa = std::numeric_limits<double>::infinity(), fb = fa;
      for (Eigen::Index b = 0; b < nbins; ++b) {
        if (covers[i][b] && covers[j][b]) {
          e.bins.push_back(b);
          fa = std::min(fa, std::abs(frame.bands[i].spectrum[b]));
          fb = std::min(fb, std::abs(frame.bands[j].spectrum[b]));
        }
      }
      if (!e.bins.empty()) {
        e.floor_a = fa;
        e.floor_b = fb;
        graph.edges.push_back(std::move(e));
      }
    }
  }

  // connectivity via union-find
  std::vector<int> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : graph.edges) parent[find(e.a)] = find(e.b);
  graph.connected = true;
  for (int i = 1; i < nb; ++i)
    if (find(i) != find(0)) graph.connected = false;
  return graph;
}

}  // namespace sigret
