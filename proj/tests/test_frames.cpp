#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sigret/curvelet.hpp"
#include "sigret/frame.hpp"
#include "sigret/meyer.hpp"
#include "test_helpers.hpp"

using namespace sigret;
using namespace sigret::testing;

namespace {

// random real-even spectrum with values in [lo, hi]
Eigen::VectorXcd random_even_spectrum(const Grid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> uni(lo, hi);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    const Eigen::Index c = conjugate_bin(g, b);
    if (b <= c) {
      const double v = uni(rng);
      s[b] = v;
      s[c] = v;
    }
  }
  return s;
}

Grid meyer_grid() { return make_grid_1d(1024, 24.0); }

}  // namespace

TEST_CASE("single all-pass band is a Parseval frame") {
  const Grid g = make_grid_1d(16, 2.0);
  auto frame = make_frame(g, {{"id", Eigen::VectorXcd::Ones(g.size())}}, full_mask(g));
  const auto [lo, hi] = frame_bounds(frame);
  CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("duplicating a band doubles the energy profile") {
  const Grid g = make_grid_1d(32, 4.0);
  std::mt19937_64 rng(41);
  const Eigen::VectorXcd spec = random_even_spectrum(g, rng, 0.5, 1.5);
  auto frame = make_frame(g, {{"a", spec}, {"b", spec}}, full_mask(g));
  const auto [lo, hi] = frame_bounds(frame);
  const Eigen::ArrayXd mag2 = spec.array().abs2();
  CHECK(rel_error(lo, 2.0 * mag2.minCoeff()) < 1e-12);
  CHECK(rel_error(hi, 2.0 * mag2.maxCoeff()) < 1e-12);
}

TEST_CASE("Meyer frame is Parseval on the working band") {
  const SemiDiscreteFrame frame = meyer_frame(4, meyer_grid());
  const auto [lo, hi] = frame_bounds(frame);
  CHECK(std::abs(lo - 1.0) < 1e-8);
  CHECK(std::abs(hi - 1.0) < 1e-8);
}

TEST_CASE("dual of a Parseval frame is the frame itself on the working band") {
  const SemiDiscreteFrame frame = meyer_frame(3, make_grid_1d(256, 12.0));
  const SemiDiscreteFrame dual = dual_frame(frame);
  for (std::size_t i = 0; i < frame.bands.size(); ++i) {
    for (Eigen::Index b = 0; b < frame.grid.size(); ++b) {
      if (!frame.working_band[b]) continue;
      CHECK(std::abs(dual.bands[i].spectrum[b] - frame.bands[i].spectrum[b]) < 1e-10);
    }
  }
}

TEST_CASE("scaling the frame by 2 scales the dual by 1/2 where one band covers") {
  const Grid g = make_grid_1d(256, 12.0);
  const SemiDiscreteFrame frame = meyer_frame(3, g);
  SemiDiscreteFrame scaled = frame;
  for (auto& band : scaled.bands) band.spectrum *= 2.0;
  const SemiDiscreteFrame dual = dual_frame(scaled);
  const SemiDiscreteFrame ref = dual_frame(frame);
  // |xi| < 1/3: only phi covers, and phi^ = 1 there
  const int phi = frame.band_index("phi");
  REQUIRE(phi >= 0);
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    if (std::abs(bin_frequency(g, 0, b)) < 1.0 / 3.0 - 1e-9) {
      CHECK(std::abs(dual.bands[phi].spectrum[b] - 0.5 * ref.bands[phi].spectrum[b]) < 1e-12);
    }
  }
}

TEST_CASE("random two-band frame: synthesize inverts analyze") {
  const Grid g = make_grid_1d(64, 8.0);
  std::mt19937_64 rng(43);
  auto frame = make_frame(
      g, {{"a", random_even_spectrum(g, rng, 0.3, 1.2)}, {"b", random_even_spectrum(g, rng, 0.3, 1.2)}},
      full_mask(g));
  const BandLimitedSignal f = random_band_limited(g, full_mask(g), rng);
  const BandLimitedSignal back = synthesize(analyze(f, frame), frame);
  CHECK(rel_l2_error(back.values, f.values) < 1e-8);
}

TEST_CASE("analysis energy respects the frame bounds") {
  const Grid g = meyer_grid();
  const SemiDiscreteFrame frame = meyer_frame(4, g);
  const auto [lo, hi] = frame_bounds(frame);
  std::mt19937_64 rng(47);
  const BandLimitedSignal f = random_band_limited(g, frame.working_band, rng);
  double energy = 0.0;
  for (const auto& part : analyze(f, frame)) energy += l2_norm(part) * l2_norm(part);
  const double ratio = energy / (l2_norm(f) * l2_norm(f));
  CHECK(ratio >= lo - 1e-9);
  CHECK(ratio <= hi + 1e-9);
}

TEST_CASE("synthesis of zero parts is zero") {
  const Grid g = make_grid_1d(128, 6.0);
  const SemiDiscreteFrame frame = meyer_frame(2, g);
  std::vector<BandLimitedSignal> parts;
  for (const auto& band : frame.bands)
    parts.push_back(BandLimitedSignal{g, Eigen::ArrayXd::Zero(g.size()), band.support});
  const BandLimitedSignal out = synthesize(parts, frame);
  CHECK(out.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("Meyer round trip over random signals") {
  const Grid g = make_grid_1d(512, 12.0);
  const SemiDiscreteFrame frame = meyer_frame(3, g);
  std::mt19937_64 rng(53);
  for (int t = 0; t < 20; ++t) {
    const BandLimitedSignal f = random_band_limited(g, frame.working_band, rng);
    const BandLimitedSignal back = synthesize(analyze(f, frame), frame);
    CHECK(rel_l2_error(back.values, f.values) < 1e-8);
  }
}

TEST_CASE("synthesis count mismatch is rejected") {
  const Grid g = make_grid_1d(128, 6.0);
  const SemiDiscreteFrame frame = meyer_frame(2, g);
  std::vector<BandLimitedSignal> parts;  // all bands missing
  CHECK_THROWS_AS(synthesize(parts, frame), std::invalid_argument);
}

TEST_CASE("flipping one analysis band breaks the reconstruction to a non-sign-equivalent signal") {
  const Grid g = make_grid_1d(512, 12.0);
  const SemiDiscreteFrame frame = meyer_frame(3, g);
  std::mt19937_64 rng(59);
  const BandLimitedSignal f = random_band_limited(g, frame.working_band, rng);
  auto parts = analyze(f, frame);
  parts[1].values = -parts[1].values;
  const BandLimitedSignal out = synthesize(parts, frame);
  CHECK(sign_invariant_error(out.values, f.values) > 1e-2);
}

TEST_CASE("Meyer overlap graph is the scale chain") {
  const SemiDiscreteFrame frame = meyer_frame(4, meyer_grid());
  const OverlapGraph graph = overlap_graph(frame);
  CHECK(graph.connected);
  REQUIRE(graph.labels.size() == 5);
  // exactly the consecutive pairs phi-psi0-psi1-psi2-psi3
  REQUIRE(graph.edges.size() == 4);
  for (const auto& e : graph.edges) {
    CHECK(e.b == e.a + 1);
    CHECK(e.floor_a > 0.0);
    CHECK(e.floor_b > 0.0);
    CHECK(!e.bins.empty());
  }
}

TEST_CASE("disjoint bands: cover check fails, graph disconnects") {
  const Grid g = make_grid_1d(64, 8.0);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(g.size());
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(g.size());
  for (Eigen::Index bin = 0; bin < g.size(); ++bin) {
    const double f = std::abs(bin_frequency(g, 0, bin));
    if (f <= 1.0) a[bin] = 1.0;
    if (f >= 2.0 && f <= 3.0) b[bin] = 1.0;
  }
  auto frame = make_frame(g, {{"low", a}, {"high", b}}, full_mask(g));
  CHECK_THROWS_WITH_AS(overlap_graph(frame), doctest::Contains("no good F-support overlap"),
                       std::invalid_argument);
  const OverlapGraph graph = overlap_graph(frame, /*require_cover=*/false);
  CHECK(!graph.connected);
  CHECK(graph.edges.empty());
}

TEST_CASE("single all-pass band covers trivially") {
  const Grid g = make_grid_1d(16, 2.0);
  auto frame = make_frame(g, {{"id", Eigen::VectorXcd::Ones(g.size())}}, full_mask(g));
  const OverlapGraph graph = overlap_graph(frame);
  CHECK(graph.connected);
  CHECK(graph.labels.size() == 1);
  CHECK(graph.edges.empty());
}

TEST_CASE("Meyer window values at the transition points") {
  CHECK(meyer_psi_magnitude(1.0 / 3.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(meyer_psi_magnitude(2.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(meyer_phi_hat(0.0) == 1.0);
  CHECK(meyer_phi_hat(2.0 / 3.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("phi/psi magnitudes form a partition on the handover interval") {
  for (int i = 0; i <= 200; ++i) {
    const double xi = 1.0 / 3.0 + (i / 200.0) * (1.0 / 3.0);
    const double p = meyer_phi_hat(xi);
    const double m = meyer_psi_magnitude(xi);
    CHECK(std::abs(p * p + m * m - 1.0) < 1e-12);
  }
}

TEST_CASE("scale partition: unity up to 2^J/3, decaying above") {
  const int num_scales = 4;
  const double working = std::ldexp(1.0, num_scales) / 3.0;
  for (int i = 0; i <= 400; ++i) {
    const double xi = (i / 400.0) * working;
    double sum = meyer_phi_hat(xi) * meyer_phi_hat(xi);
    for (int j = 0; j < num_scales; ++j) {
      const double m = meyer_psi_magnitude(std::ldexp(xi, -j));
      sum += m * m;
    }
    CHECK(std::abs(sum - 1.0) < 1e-8);
  }
  // above the working band the top scale loses its successor
  double sum = 0.0;
  const double outside = 1.5 * working;
  for (int j = 0; j < num_scales; ++j) {
    const double m = meyer_psi_magnitude(std::ldexp(outside, -j));
    sum += m * m;
  }
  CHECK(sum < 1.0 - 1e-3);
}

TEST_CASE("beta transition identity") {
  for (int i = 0; i < 1000; ++i) {
    const double x = static_cast<double>(i) / 999.0;
    CHECK(std::abs(meyer_beta(x) + meyer_beta(1.0 - x) - 1.0) < 1e-12);
  }
}

TEST_CASE("constructed Meyer filters are real in space") {
  const SemiDiscreteFrame frame = meyer_frame(4, meyer_grid());
  for (const auto& band : frame.bands) {
    CHECK_NOTHROW((void)inverse_to_real(frame.grid, band.spectrum));  // checks 1e-10 residue
  }
}

TEST_CASE("Meyer overlap graph stays connected across scale counts") {
  for (int j = 1; j <= 5; ++j) {
    const Grid g = make_grid_1d(256, 6.0);  // Nyquist 64/3 resolves J = 5
    const OverlapGraph graph = overlap_graph(meyer_frame(j, g));
    CHECK(graph.connected);
  }
}

TEST_CASE("Meyer frame rejects an unresolvable scale count") {
  CHECK_THROWS_WITH_AS(meyer_frame(8, make_grid_1d(64, 8.0)),
                       doctest::Contains("insufficient grid bandwidth"), std::invalid_argument);
}

TEST_CASE("curvelet windows tile the working annulus") {
  const Grid g = make_grid_2d(64, 64, 3.0, 3.0);
  const SemiDiscreteFrame frame = curvelet_windows(1, g);
  const auto [lo, hi] = frame_bounds(frame);
  CHECK(std::abs(lo - 1.0) < 1e-3);
  CHECK(std::abs(hi - 1.0) < 1e-3);
}

TEST_CASE("curvelet wedges are rotates of the l = 0 wedge") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> uni(-20.0, 20.0);
  for (int j = 1; j <= 2; ++j) {
    for (int l = 0; l < (1 << j); ++l) {
      const double th = curvelet_rotation_angle(j, l);
      const Eigen::Matrix2d rot_back = Eigen::Rotation2Dd(-th).toRotationMatrix();
      for (int t = 0; t < 50; ++t) {
        const Eigen::Vector2d xi(uni(rng), uni(rng));
        CHECK(std::abs(curvelet_window(j, l, xi) - curvelet_window(j, 0, rot_back * xi)) < 1e-12);
      }
    }
  }
}

TEST_CASE("first-scale wedge support obeys the 2^{2j+4}/3 extent along its axis") {
  const Grid g = make_grid_2d(128, 128, 3.0, 3.0);
  const SemiDiscreteFrame frame = curvelet_windows(1, g);
  const int idx = frame.band_index("chi1_0");
  REQUIRE(idx >= 0);
  double max_x = 0.0;
  const auto& band = frame.bands[static_cast<std::size_t>(idx)];
  for (Eigen::Index b = 0; b < g.size(); ++b)
    if (band.support.mask[b]) max_x = std::max(max_x, std::abs(frequency_of(g, b)[0]));
  CHECK(max_x < 32.0 / 3.0 + 1e-9);  // half of c_{1,1} = 64/3
}

TEST_CASE("curvelet gamma normalization") {
  CHECK(curvelet_gamma_scale(1) == doctest::Approx(std::pow(2.0, -4.0)));
  CHECK(curvelet_gamma_scale(2) == doctest::Approx(std::pow(2.0, -5.5)));
}

TEST_CASE("curvelet filters are real in space") {
  const Grid g = make_grid_2d(64, 64, 3.0, 3.0);
  const SemiDiscreteFrame frame = curvelet_windows(1, g);
  for (const auto& band : frame.bands) CHECK_NOTHROW((void)inverse_to_real(g, band.spectrum));
}

TEST_CASE("curvelet construction rejects an unresolvable scale count") {
  CHECK_THROWS_WITH_AS(curvelet_windows(3, make_grid_2d(64, 64, 3.0, 3.0)),
                       doctest::Contains("insufficient grid resolution"), std::invalid_argument);
}

TEST_CASE("curvelet overlap graph is connected") {
  const Grid g = make_grid_2d(64, 64, 3.0, 3.0);
  const OverlapGraph graph = overlap_graph(curvelet_windows(1, g));
  CHECK(graph.connected);
}
