#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sigret/meyer.hpp"
#include "sigret/sampling.hpp"
#include "test_helpers.hpp"

using namespace sigret;
using namespace sigret::testing;

TEST_CASE("unit box at critical dilation gives the half-integer lattice") {
  const Grid g = make_grid_1d(16, 4.0);
  const BoolArray mask = interval_mask(g, 0.0, 0.5);
  const FrequencySupport support = make_support_auto(g, mask);
  Eigen::MatrixXd box(1, 1);
  box(0, 0) = 1.0;
  const SignBlindSpec spec = make_sign_blind_spec(g, support, box, Eigen::VectorXd::Ones(1));
  const SamplingLattice lat = make_sign_blind_lattice(spec, g);
  CHECK(lat.generator(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rel_error(lattice_density(lat), 2.0) < 1e-12);
  CHECK(lat.sites.size() == 8);  // period 4 at spacing 1/2
}

TEST_CASE("Meyer band lattices match X_j = (1/(2 c_j)) Z with c_j = 2^{j+3}/3") {
  const Grid g = make_grid_1d(1024, 24.0);
  const SemiDiscreteFrame frame = meyer_frame(4, g);
  for (int j = 0; j < 4; ++j) {
    const auto& band = frame.bands[static_cast<std::size_t>(frame.band_index("psi" + std::to_string(j)))];
    const double c = std::ldexp(1.0, j + 3) / 3.0;
    Eigen::MatrixXd box(1, 1);
    box(0, 0) = c;
    const SignBlindSpec spec = make_sign_blind_spec(g, band.support, box, Eigen::VectorXd::Ones(1));
    const SamplingLattice lat = make_sign_blind_lattice(spec, g);
    CHECK(rel_error(lat.generator(0, 0), 3.0 * std::ldexp(1.0, -j - 4)) < 1e-12);
    CHECK(rel_error(lattice_density(lat), 2.0 * c) < 1e-9);
  }
}

TEST_CASE("curvelet scale-1 lattice formula D[(3*2^-7, 9/(40 pi))]") {
  // generator arithmetic only; the second spacing is irrational, so this
  // lattice never snaps to a rational grid
  const Grid g = make_grid_2d(64, 64, 3.0, 3.0);
  BoolArray mask = BoolArray::Constant(g.size(), false);
  mask[flat_index(g, 1, 1)] = true;  // tiny synthetic support inside the box
  mask[conjugate_bin(g, flat_index(g, 1, 1))] = true;
  const FrequencySupport support = make_support_auto(g, mask);
  Eigen::MatrixXd box = Eigen::Vector2d(64.0 / 3.0, 20.0 * M_PI / 9.0).asDiagonal();
  const SignBlindSpec spec = make_sign_blind_spec(g, support, box, Eigen::VectorXd::Ones(2));
  const Eigen::MatrixXd gen = sign_blind_generator(spec);
  CHECK(rel_error(gen(0, 0), 3.0 * std::ldexp(1.0, -7)) < 1e-12);
  CHECK(rel_error(gen(1, 1), 9.0 / (40.0 * M_PI)) < 1e-12);
  CHECK(std::abs(gen(0, 1)) + std::abs(gen(1, 0)) == 0.0);
  CHECK(rel_error(sign_blind_density(spec), 4.0 * box.determinant()) < 1e-12);
}

TEST_CASE("density formula in one and two dimensions") {
  const Grid g1 = make_grid_1d(16, 4.0);
  const FrequencySupport s1 = make_support_auto(g1, interval_mask(g1, 0.0, 0.5));
  Eigen::MatrixXd c(1, 1);
  c(0, 0) = 1.5;
  CHECK(rel_error(sign_blind_density(make_sign_blind_spec(g1, s1, c, Eigen::VectorXd::Ones(1))),
                  3.0) < 1e-12);

  const Grid g2 = make_grid_2d(16, 16, 4.0, 4.0);
  BoolArray m2 = radial_mask(g2, 0.4);
  const FrequencySupport s2 = make_support_auto(g2, m2);
  const Eigen::MatrixXd diag = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  CHECK(rel_error(
            sign_blind_density(make_sign_blind_spec(g2, s2, diag, Eigen::VectorXd::Ones(2))),
            4.0 * 2.0) < 1e-12);

  // rotation does not change the density
  const Eigen::Matrix2d rot = Eigen::Rotation2Dd(0.7).toRotationMatrix();
  CHECK(rel_error(sign_blind_density(
                      make_sign_blind_spec(g2, s2, rot * diag, Eigen::VectorXd::Ones(2))),
                  8.0) < 1e-12);
}

TEST_CASE("bounding box fit leaves one bin of slack") {
  const Grid g = make_grid_1d(64, 24.0);
  const BoolArray mask = interval_mask(g, 0.0, 2.0 / 3.0);
  const Eigen::MatrixXd box = fit_bounding_box(g, mask);
  CHECK(box(0, 0) == doctest::Approx(4.0 / 3.0 + 1.0 / 24.0).epsilon(1e-12));
  CHECK_NOTHROW(check_support_containment(g, mask, box));

  // tightness: two bin widths smaller must fail containment
  Eigen::MatrixXd shrunk = box;
  shrunk(0, 0) -= 2.5 / 24.0;
  CHECK_THROWS_AS(check_support_containment(g, mask, shrunk), std::invalid_argument);
}

TEST_CASE("axis-aligned rectangle fits to its side lengths") {
  const Grid g = make_grid_2d(32, 32, 8.0, 8.0);
  BoolArray mask(g.size());
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    const Eigen::Vector2d xi = frequency_of(g, b);
    mask[b] = std::abs(xi[0]) <= 1.0 + 1e-12 && std::abs(xi[1]) <= 0.5 + 1e-12;
  }
  const Eigen::MatrixXd box = fit_bounding_box(g, mask);
  CHECK(box(0, 0) == doctest::Approx(2.0 + 1.0 / 8.0).epsilon(1e-12));
  CHECK(box(1, 1) == doctest::Approx(1.0 + 1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("a diagonal strip fits tighter in a rotated box") {
  const Grid g = make_grid_2d(32, 32, 8.0, 8.0);
  BoolArray mask(g.size());
  const Eigen::Vector2d along(std::sqrt(0.5), std::sqrt(0.5));
  const Eigen::Vector2d across(-std::sqrt(0.5), std::sqrt(0.5));
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    const Eigen::Vector2d xi = frequency_of(g, b);
    mask[b] = std::abs(xi.dot(along)) <= 1.0 && std::abs(xi.dot(across)) <= 0.15;
  }
  const Eigen::MatrixXd axis_fit = fit_bounding_box(g, mask);
  const Eigen::Matrix2d rot = Eigen::Rotation2Dd(M_PI / 4.0).toRotationMatrix();
  const Eigen::MatrixXd rotated_fit = fit_bounding_box(g, mask, rot);
  CHECK(std::abs(rotated_fit.determinant()) < 0.5 * std::abs(axis_fit.determinant()));
  CHECK_NOTHROW(check_support_containment(g, mask, rotated_fit));
}

TEST_CASE("spec construction rejects bad inputs") {
  const Grid g = make_grid_1d(32, 8.0);
  const BoolArray mask = interval_mask(g, 0.0, 1.0);
  const FrequencySupport support = make_support_auto(g, mask);
  Eigen::MatrixXd small(1, 1);
  small(0, 0) = 1.0;  // cannot hold frequencies up to 1
  CHECK_THROWS_WITH_AS(make_sign_blind_spec(g, support, small, Eigen::VectorXd::Ones(1)),
                       doctest::Contains("not contained"), std::invalid_argument);

  Eigen::MatrixXd ok(1, 1);
  ok(0, 0) = 2.5;
  Eigen::VectorXd sub(1);
  sub[0] = 0.9;
  CHECK_THROWS_WITH_AS(make_sign_blind_spec(g, support, ok, sub),
                       doctest::Contains("sub-critical"), std::invalid_argument);
}

TEST_CASE("meyer alpha gate") {
  CHECK(meyer_alpha_check(3.0 / 16.0));
  CHECK(!meyer_alpha_check(0.2));
  CHECK(meyer_alpha_check(3.0 / 32.0));
  CHECK_THROWS_AS(meyer_alpha_check(0.0), std::invalid_argument);
  // alpha <-> box identity
  CHECK(meyer_alpha_of_box(3, std::ldexp(1.0, 6) / 3.0) == doctest::Approx(3.0 / 16.0));
  CHECK(meyer_box_of_alpha(3, 3.0 / 16.0) == doctest::Approx(std::ldexp(1.0, 6) / 3.0));
}

TEST_CASE("commensurate extent rounds up to a grid-compatible box") {
  const Grid g = make_grid_1d(64, 8.0);  // spacing 1/8
  // requesting c = 1.9 -> spacing_req = 0.263 -> stride 2 -> c = 2
  CHECK(commensurate_box_extent(g, 0, 1.9) == doctest::Approx(2.0));
  // exactly representable request is preserved
  CHECK(commensurate_box_extent(g, 0, 2.0) == doctest::Approx(2.0));
  // spacing below one grid cell cannot be represented
  CHECK_THROWS_WITH_AS(commensurate_box_extent(g, 0, 64.0), doctest::Contains("too coarse"),
                       std::invalid_argument);
}

TEST_CASE("per-band Meyer lattices at alpha = 3/16 are stable sampling sets") {
  const Grid g = make_grid_1d(1024, 24.0);
  const SemiDiscreteFrame frame = meyer_frame(4, g);
  const auto lattices = meyer_lattices(frame, 3.0 / 16.0);
  REQUIRE(lattices.size() == frame.bands.size());
  std::mt19937_64 rng(71);
  for (std::size_t i = 0; i < frame.bands.size(); ++i) {
    const BandLimitedSignal gsig = random_band_limited(g, frame.bands[i].support.mask, rng);
    const BandLimitedSignal rec = interpolate_from_lattice(
        sample_on_lattice(gsig, lattices[i]), lattices[i], frame.bands[i].support, g);
    CHECK(rel_l2_error(rec.values, gsig.values) < 1e-8);
  }
}

TEST_CASE("generic per-band lattice helper is sign-blind and grid-compatible") {
  const Grid g = make_grid_1d(1024, 24.0);
  const SemiDiscreteFrame frame = meyer_frame(4, g);
  const auto lattices = sign_blind_lattices_for_frame(frame);
  REQUIRE(lattices.size() == frame.bands.size());
  std::mt19937_64 rng(73);
  for (std::size_t i = 0; i < frame.bands.size(); ++i) {
    const BandLimitedSignal gsig = random_band_limited(g, frame.bands[i].support.mask, rng);
    const BandLimitedSignal rec = interpolate_from_lattice(
        sample_on_lattice(gsig, lattices[i]), lattices[i], frame.bands[i].support, g);
    CHECK(rel_l2_error(rec.values, gsig.values) < 1e-8);
  }
}

TEST_CASE("incommensurate alpha is rejected") {
  const Grid g = make_grid_1d(1024, 24.0);
  const SemiDiscreteFrame frame = meyer_frame(4, g);
  CHECK_THROWS_AS(meyer_lattices(frame, 0.17), std::invalid_argument);
}
