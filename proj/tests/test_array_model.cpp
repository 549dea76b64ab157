#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "synth/array_model.hpp"

using namespace synth;
using Catch::Matchers::WithinAbs;

namespace {

ExcitationMatrix random_excitation(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> amp(0.0, 1.0);
  std::vector<double> a(rows * cols);
  for (double& v : a) v = amp(rng);
  if (*std::max_element(a.begin(), a.end()) == 0.0) a[0] = 0.5;
  return ExcitationMatrix(rows, cols, std::move(a));
}

ExcitationMatrix mirrored_excitation(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> amp(0.0, 1.0);
  std::vector<double> a(rows * cols);
  for (std::size_t m = 0; m <= (rows - 1) / 2; ++m) {
    for (std::size_t n = 0; n <= (cols - 1) / 2; ++n) {
      const double v = amp(rng);
      a[m * cols + n] = v;
      a[(rows - 1 - m) * cols + n] = v;
      a[m * cols + (cols - 1 - n)] = v;
      a[(rows - 1 - m) * cols + (cols - 1 - n)] = v;
    }
  }
  return ExcitationMatrix(rows, cols, std::move(a));
}

}  // namespace

TEST_CASE("a single element radiates its amplitude with zero phase") {
  const ArrayGeometry g{1, 1, 0.5, 0.5};
  const ExcitationMatrix e(1, 1, {0.37});
  for (double theta : {0.0, 33.3, 90.0, 141.0, 180.0}) {
    const auto af = evaluate_array_factor(g, e, Direction::of(theta, 12.0));
    REQUIRE(af.real() == 0.37);
    REQUIRE(af.imag() == 0.0);
  }
}

TEST_CASE("uniform in-phase arrays peak at broadside with value M*N") {
  const ArrayGeometry g{7, 5, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const auto af = evaluate_array_factor(g, e, Direction::of(90.0, 0.0));
  REQUIRE(af.real() == 35.0);
  REQUIRE(af.imag() == 0.0);

  const auto af0 =
      evaluate_array_factor(g, e, Direction::of(0.0, 0.0), AngleConvention::BroadsideAt0);
  REQUIRE(af0.real() == 35.0);
  REQUIRE(af0.imag() == 0.0);
}

TEST_CASE("16x1 uniform magnitude matches the closed form on a dense grid") {
  const ArrayGeometry g{16, 1, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  for (int i = 0; i < 2000; ++i) {
    const double theta = 180.0 * i / 1999.0;
    const double u = detail::directional_factor(theta, AngleConvention::BroadsideAt90);
    const double expected = oracles::uniform_linear_af(16, 0.5, u);
    const double got = std::abs(evaluate_array_factor(g, e, Direction::of(theta, 0.0)));
    REQUIRE_THAT(got, WithinAbs(expected, 1e-9 * 16.0));
  }
}

TEST_CASE("closed-form equivalence holds for uniform arrays up to 32 elements") {
  for (int m : {2, 3, 5, 9, 16, 25, 32}) {
    const ArrayGeometry g{m, 1, 0.5, 0.5};
    const auto e = ExcitationMatrix::uniform(g);
    const auto grid = ThetaGrid{501, 0.0, 180.0}.points();
    for (double theta : grid) {
      const double u = detail::directional_factor(theta, AngleConvention::BroadsideAt90);
      const double expected = oracles::uniform_linear_af(m, 0.5, u);
      const double got = std::abs(evaluate_array_factor(g, e, Direction::of(theta, 0.0)));
      REQUIRE_THAT(got, WithinAbs(expected, 1e-9 * m));
    }
  }
}

TEST_CASE("mismatched or all-zero excitations are rejected") {
  const ArrayGeometry g{3, 3, 0.5, 0.5};
  const ExcitationMatrix wrong(2, 3, std::vector<double>(6, 1.0));
  REQUIRE_THROWS_AS(evaluate_array_factor(g, wrong, Direction::of(90, 0)), contract_violation);
  const ExcitationMatrix zero(3, 3, std::vector<double>(9, 0.0));
  REQUIRE_THROWS_AS(evaluate_array_factor(g, zero, Direction::of(90, 0)), degenerate_excitation);
  REQUIRE_THROWS_AS(ExcitationMatrix(2, 2, {1.0, -0.5, 0.2, 0.3}), contract_violation);
  REQUIRE_THROWS_AS(Direction::of(181.0, 0.0), contract_violation);
  REQUIRE(Direction::of(90.0, -90.0).phi_deg == 270.0);
}

TEST_CASE("a 1x1 cut is flat at 0 dB") {
  const ArrayGeometry g{1, 1, 0.5, 0.5};
  const ExcitationMatrix e(1, 1, {2.5});
  const auto grid = ThetaGrid{11, 0.0, 180.0}.points();
  const auto cut = evaluate_cut(g, e, 45.0, grid);
  for (double db : cut.magnitude_db) REQUIRE(db == 0.0);
}

TEST_CASE("uniform 11x11 cut peaks at 90 deg and is symmetric about it") {
  const ArrayGeometry g{11, 11, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const auto grid = ThetaGrid{1801, 0.0, 180.0}.points();
  const auto cut = evaluate_cut(g, e, 0.0, grid);
  const std::size_t n = cut.magnitude_db.size();
  REQUIRE(cut.magnitude_db[n / 2] == 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE_THAT(cut.magnitude_db[i], WithinAbs(cut.magnitude_db[n - 1 - i], 1e-9));
  }
}

TEST_CASE("uniform 16x16 first sidelobe matches the kernel oracle") {
  const double oracle_sll = oracles::uniform_array_sll_db(16, 0.5, 1801);
  REQUIRE(oracle_sll > -13.4);
  REQUIRE(oracle_sll < -13.0);

  const ArrayGeometry g{16, 16, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const auto grid = ThetaGrid{1801, 0.0, 180.0}.points();
  const auto cut = evaluate_cut(g, e, 0.0, grid);
  const double sll = compute_sll(cut, locate_main_lobe(cut));
  REQUIRE_THAT(sll, WithinAbs(oracle_sll, 1e-9));
}

TEST_CASE("evaluate_cut validates its grid") {
  const ArrayGeometry g{2, 2, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const std::vector<double> short_grid{0.0, 90.0};
  REQUIRE_THROWS_AS(evaluate_cut(g, e, 0.0, short_grid), contract_violation);
  const std::vector<double> non_monotone{0.0, 90.0, 45.0};
  REQUIRE_THROWS_AS(evaluate_cut(g, e, 0.0, non_monotone), contract_violation);
  const std::vector<double> outside{0.0, 90.0, 181.0};
  REQUIRE_THROWS_AS(evaluate_cut(g, e, 0.0, outside), contract_violation);
}

TEST_CASE("main lobe of a 16x1 uniform array is bracketed by the first nulls") {
  const ArrayGeometry g{16, 1, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const auto grid = ThetaGrid{1801, 0.0, 180.0}.points();
  const auto cut = evaluate_cut(g, e, 0.0, grid);
  const auto lobe = locate_main_lobe(cut);
  const double u_null = oracles::uniform_first_null_u(16, 0.5);
  const double lo_expected = std::acos(u_null) * 180.0 / std::numbers::pi;
  REQUIRE_THAT(lobe.theta_low_deg, WithinAbs(lo_expected, 0.11));
  REQUIRE_THAT(lobe.theta_high_deg, WithinAbs(180.0 - lo_expected, 0.11));
}

TEST_CASE("a monotone single-lobe pattern spans the whole grid") {
  const ArrayGeometry g{2, 2, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const auto grid = ThetaGrid{21, 0.0, 180.0}.points();
  const auto cut = evaluate_cut(g, e, 0.0, grid);
  const auto lobe = locate_main_lobe(cut);
  REQUIRE(lobe.theta_low_deg == grid.front());
  REQUIRE(lobe.theta_high_deg == grid.back());
  REQUIRE_THROWS_AS(compute_sll(cut, lobe), no_sidelobe_region);
}

TEST_CASE("compute_sll returns the floor when everything outside is clamped") {
  PatternCut cut;
  cut.phi_deg = 0.0;
  cut.theta_deg = {0.0, 45.0, 90.0, 135.0, 180.0};
  cut.magnitude_db = {kDbFloorDb, kDbFloorDb, 0.0, kDbFloorDb, kDbFloorDb};
  const double sll = compute_sll(cut, LobeInterval{45.0, 135.0});
  REQUIRE(sll == kDbFloorDb);
}

TEST_CASE("compute_sll validates the lobe interval") {
  PatternCut cut;
  cut.theta_deg = {0.0, 90.0, 180.0};
  cut.magnitude_db = {-20.0, 0.0, -20.0};
  REQUIRE_THROWS_AS(compute_sll(cut, LobeInterval{-10.0, 90.0}), contract_violation);
  REQUIRE_THROWS_AS(compute_sll(cut, LobeInterval{90.0, 90.0}), contract_violation);
}

TEST_CASE("locate_main_lobe needs at least three samples") {
  PatternCut cut;
  cut.theta_deg = {0.0, 180.0};
  cut.magnitude_db = {0.0, -3.0};
  REQUIRE_THROWS_AS(locate_main_lobe(cut), contract_violation);
}

TEST_CASE("default theta grids are exact mirror pairs about 90 deg") {
  for (int count : {1801, 3601, 1800, 11}) {
    const auto grid = ThetaGrid{count, 0.0, 180.0}.points();
    REQUIRE(grid.front() == 0.0);
    REQUIRE(grid.back() == 180.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      REQUIRE(grid[i] + grid[grid.size() - 1 - i] == 180.0);
    }
  }
  REQUIRE_THROWS_AS((ThetaGrid{2, 0.0, 180.0}).points(), contract_violation);
  REQUIRE_THROWS_AS((ThetaGrid{11, 90.0, 90.0}).points(), contract_violation);
  REQUIRE_THROWS_AS((ThetaGrid{11, -1.0, 180.0}).points(), contract_violation);
}

TEST_CASE("cut normalization puts the peak sample at exactly 0 dB") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  const auto grid = ThetaGrid{301, 0.0, 180.0}.points();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    const ArrayGeometry g{static_cast<int>(rows), static_cast<int>(cols), 0.5, 0.5};
    const auto e = random_excitation(rng, rows, cols);
    const auto cut = evaluate_cut(g, e, 37.0, grid);
    const double peak = *std::max_element(cut.magnitude_db.begin(), cut.magnitude_db.end());
    REQUIRE(peak == 0.0);
    cut.validate();
  }
}

TEST_CASE("cuts are invariant under amplitude scaling") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> dim(1, 10);
  std::uniform_int_distribution<int> pow2(-20, 20);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  const auto grid = ThetaGrid{201, 0.0, 180.0}.points();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    const ArrayGeometry g{static_cast<int>(rows), static_cast<int>(cols), 0.5, 0.5};
    const auto e = random_excitation(rng, rows, cols);
    const auto base = evaluate_cut(g, e, 10.0, grid);

    // powers of two scale the whole evaluation exactly
    const double c2 = std::ldexp(1.0, pow2(rng));
    std::vector<double> scaled2(e.data().begin(), e.data().end());
    for (double& v : scaled2) v *= c2;
    const auto cut2 = evaluate_cut(g, ExcitationMatrix(rows, cols, scaled2), 10.0, grid);
    for (std::size_t i = 0; i < base.magnitude_db.size(); ++i) {
      REQUIRE(cut2.magnitude_db[i] == base.magnitude_db[i]);
    }

    // arbitrary positive factors agree to rounding noise
    const double c = scale(rng);
    std::vector<double> scaled(e.data().begin(), e.data().end());
    for (double& v : scaled) v *= c;
    const auto cutc = evaluate_cut(g, ExcitationMatrix(rows, cols, scaled), 10.0, grid);
    for (std::size_t i = 0; i < base.magnitude_db.size(); ++i) {
      REQUIRE_THAT(cutc.magnitude_db[i], WithinAbs(base.magnitude_db[i], 1e-9));
    }
  }
}

TEST_CASE("mirror-symmetric excitations give cuts symmetric about 90 deg") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 14);
  const auto grid = ThetaGrid{1801, 0.0, 180.0}.points();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    const ArrayGeometry g{static_cast<int>(rows), static_cast<int>(cols), 0.5, 0.5};
    const auto e = mirrored_excitation(rng, rows, cols);
    const auto cut = evaluate_cut(g, e, 0.0, grid);
    const std::size_t n = cut.magnitude_db.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      REQUIRE_THAT(cut.magnitude_db[i], WithinAbs(cut.magnitude_db[n - 1 - i], 1e-9));
    }
  }
}

TEST_CASE("measured SLL is stable under grid refinement") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::size_t> dim(4, 16);
  const auto coarse = ThetaGrid{1801, 0.0, 180.0}.points();
  const auto fine = ThetaGrid{3601, 0.0, 180.0}.points();
  int measured = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    const ArrayGeometry g{static_cast<int>(rows), static_cast<int>(cols), 0.5, 0.5};
    const auto e = random_excitation(rng, rows, cols);
    const auto cut_a = evaluate_cut(g, e, 0.0, coarse);
    const auto cut_b = evaluate_cut(g, e, 0.0, fine);
    try {
      const double sll_a = compute_sll(cut_a, locate_main_lobe(cut_a));
      const double sll_b = compute_sll(cut_b, locate_main_lobe(cut_b));
      REQUIRE(std::fabs(sll_a - sll_b) < 0.05);
      ++measured;
    } catch (const no_sidelobe_region&) {
      // single-lobed draw: nothing to measure on either grid
    }
  }
  REQUIRE(measured >= 20);
}

TEST_CASE("conventions differ by where broadside lands") {
  const ArrayGeometry g{8, 1, 0.5, 0.5};
  const auto e = ExcitationMatrix::uniform(g);
  const auto grid = ThetaGrid{181, 0.0, 180.0}.points();
  const auto cut90 = evaluate_cut(g, e, 0.0, grid, AngleConvention::BroadsideAt90);
  const auto cut0 = evaluate_cut(g, e, 0.0, grid, AngleConvention::BroadsideAt0);
  const auto peak_at = [&](const PatternCut& cut) {
    return cut.theta_deg[static_cast<std::size_t>(
        std::max_element(cut.magnitude_db.begin(), cut.magnitude_db.end()) -
        cut.magnitude_db.begin())];
  };
  REQUIRE(peak_at(cut90) == 90.0);
  REQUIRE(peak_at(cut0) == 0.0);
}
