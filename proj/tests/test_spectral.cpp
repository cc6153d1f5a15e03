#include <cmath>
#include <complex>

#include <doctest.h>

#include "oracles.hpp"
#include "qcbench/spectral.hpp"

using namespace qcbench;
using spectral::cplx;

namespace {
const cplx kI{0.0, 1.0};
}

TEST_CASE("square well eigenvalues and table entries") {
  auto sys = spectral::make_square_well();
  CHECK(sys->eigenvalue(1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(sys->eigenvalue(4) == doctest::Approx(-8.0).epsilon(1e-15));
  CHECK(sys->coupling(1, 2).real() == doctest::Approx(-4.0 / 9.0).epsilon(1e-15));
  CHECK(sys->coupling(2, 3).real() == doctest::Approx(-12.0 / 25.0).epsilon(1e-15));
  CHECK(sys->coupling(1, 3) == cplx{0.0, 0.0});  // even difference
  CHECK(sys->coupling(2, 2) == cplx{0.0, 0.0});
  // The table is real symmetric; the operator-level matrix carries the i.
  CHECK(sys->coupling(2, 1) == sys->coupling(1, 2));
  CHECK(sys->operator_element(1, 2) == kI * sys->coupling(1, 2));
}

TEST_CASE("square well table matches centered position quadrature up to one scale") {
  auto sys = spectral::make_square_well();
  double scale =
      sys->coupling(1, 2).real() / oracle::square_well_position_element(1, 2);
  CHECK(scale > 0.0);
  CHECK(scale == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
  for (int j = 1; j <= 8; ++j) {
    for (int k = 1; k <= 8; ++k) {
      CHECK(sys->coupling(j, k).real() ==
            doctest::Approx(scale * oracle::square_well_position_element(j, k))
                .epsilon(1e-10));
      CHECK(sys->coupling(j, k).imag() == 0.0);
    }
  }
}

TEST_CASE("harmonic ladder eigenvalues and couplings") {
  auto sys = spectral::make_harmonic();
  for (int n = 1; n <= 6; ++n) {
    CHECK(sys->eigenvalue(n) == doctest::Approx(-(n - 0.5)).epsilon(1e-15));
  }
  CHECK(std::abs(sys->coupling(1, 2) - cplx{0.0, -1.0}) < 1e-15);
  CHECK(std::abs(sys->coupling(3, 2) + kI * std::sqrt(1.5)) < 1e-15);
  CHECK(sys->coupling(1, 3) == cplx{0.0, 0.0});
  for (int j = 1; j <= 8; ++j) {
    for (int k = 1; k <= 8; ++k) {
      cplx want = -kI * oracle::hermite_position_element(j, k);
      CHECK(std::abs(sys->coupling(j, k) - want) < 1e-10);
    }
  }
  CHECK(sys->known_coupling_bound(1) == doctest::Approx(2.0));
  CHECK(sys->known_coupling_bound(2) == doctest::Approx(8.0));
  CHECK_FALSE(sys->b_opnorm.has_value());
}

TEST_CASE("planar rotor couplings are the nearest-neighbor cosine elements") {
  auto sys = spectral::make_planar_rotor();
  CHECK(sys->eigenvalue(3) == doctest::Approx(-9.0));
  for (int j = 1; j <= 8; ++j) {
    for (int k = 1; k <= 8; ++k) {
      cplx want = -kI * oracle::rotor_cos_element(j, k);
      CHECK(std::abs(sys->coupling(j, k) - want) < 1e-10);
    }
  }
  CHECK(sys->b_opnorm.has_value());
  CHECK(*sys->b_opnorm == doctest::Approx(1.0));
  CHECK(sys->known_coupling_bound(1) == doctest::Approx(1.5));
  CHECK(sys->known_coupling_bound(2) == doctest::Approx(7.5));
}

TEST_CASE("anharmonic quartic band matches the ladder algebra and quadrature") {
  auto sys = spectral::make_anharmonic(3.0);
  double mu1 = std::sqrt(2.0) * 0.5;
  CHECK(sys->eigenvalue(1) ==
        doctest::Approx(-(std::pow(mu1, 3.0) + 1.0 / mu1)).epsilon(1e-14));
  CHECK(spectral::anharmonic_x4_element(1, 1) == doctest::Approx(3.0 / 8.0));
  CHECK(spectral::anharmonic_x4_element(1, 4) == 0.0);  // beyond the band
  for (int j = 1; j <= 8; ++j) {
    for (int k = 1; k <= 8; ++k) {
      CHECK(std::abs(spectral::anharmonic_x4_element(j, k) -
                     oracle::anharmonic_x4_quadrature(j, k)) < 1e-10);
      CHECK(spectral::anharmonic_x4_element(j, k) ==
            spectral::anharmonic_x4_element(k, j));
    }
  }
  // Superdiagonal magnitude grows like ~2 j^2, so inverses are summable.
  double expo = std::log(std::abs(sys->coupling(18, 19)) /
                         std::abs(sys->coupling(9, 10))) /
                std::log(18.0 / 9.0);
  CHECK(expo > 1.9);
  CHECK(expo < 2.1);
}

TEST_CASE("anharmonic spectra are strictly decreasing for any alpha >= 1") {
  for (double alpha : {1.0, 1.5, 3.0, 5.0}) {
    auto sys = spectral::make_anharmonic(alpha);
    for (int n = 1; n < 40; ++n) {
      CHECK(sys->eigenvalue(n) > sys->eigenvalue(n + 1));
    }
  }
  CHECK_THROWS_AS(spectral::make_anharmonic(0.5), std::invalid_argument);
}

TEST_CASE("system invariants hold for all built-ins") {
  for (const auto& sys :
       {spectral::make_square_well(), spectral::make_harmonic(),
        spectral::make_planar_rotor(), spectral::make_anharmonic(2.0)}) {
    CHECK_NOTHROW(spectral::validate_system(*sys, 40, 1e-9));
    // operator-level skew-adjointness, spot checked
    for (int j = 1; j <= 10; ++j) {
      for (int k = 1; k <= 10; ++k) {
        cplx b = sys->operator_element(j, k);
        cplx bt = sys->operator_element(k, j);
        CHECK(std::abs(b + std::conj(bt)) < 1e-12);
      }
    }
  }
}

TEST_CASE("validate_system rejects broken spectral data") {
  spectral::SpectralSystem bad;
  bad.name = "broken";
  bad.eigenvalue = [](int k) { return double(k); };  // increasing
  bad.coupling = [](int, int) { return cplx{0.0, -1.0}; };
  CHECK_THROWS_AS(spectral::validate_system(bad, 5), std::runtime_error);

  spectral::SpectralSystem askew;
  askew.name = "askew";
  askew.eigenvalue = [](int k) { return -double(k); };
  askew.coupling = [](int j, int k) {
    return j < k ? cplx{1.0, 0.0} : cplx{2.0, 0.0};  // not skew-adjoint
  };
  CHECK_THROWS_AS(spectral::validate_system(askew, 5), std::runtime_error);
}

TEST_CASE("system name parsing") {
  CHECK(spectral::make_system_by_name("square-well")->name == "square-well");
  CHECK(spectral::make_system_by_name("harmonic")->name == "harmonic");
  CHECK(spectral::make_system_by_name("planar-rotor")->name == "planar-rotor");
  auto anh = spectral::make_system_by_name("anharmonic(alpha=2.5)");
  CHECK(anh->eigenvalue(1) < 0.0);
  CHECK_THROWS_AS(spectral::make_system_by_name("hydrogen"), std::invalid_argument);
  CHECK_THROWS_AS(spectral::make_system_by_name("anharmonic(alpha=)"),
                  std::invalid_argument);
  CHECK_THROWS_AS(spectral::make_system_by_name("anharmonic(alpha=2x)"),
                  std::invalid_argument);
}

TEST_CASE("control sets") {
  auto all = spectral::ControlSet::all_reals();
  CHECK(all.contains(-1e9));
  auto box = spectral::ControlSet::interval(-0.5, 2.0);
  CHECK(box.contains(0.0));
  CHECK(box.contains(2.0));
  CHECK_FALSE(box.contains(2.0001));
  CHECK(box.contains(2.0001, 1e-3));
  auto finite = spectral::ControlSet::finite({0.0, 1.0, -1.0});
  CHECK(finite.contains(1.0));
  CHECK_FALSE(finite.contains(0.5));
  CHECK_THROWS_AS(spectral::ControlSet::finite({0.0, 0.5}),
                  std::invalid_argument);  // must contain 1
  CHECK_THROWS_AS(spectral::ControlSet::interval(0.5, 2.0),
                  std::invalid_argument);  // must contain 0
}

TEST_CASE("column norms and index guards") {
  auto sys = spectral::make_planar_rotor();
  // column 3 of the order-5 block has entries at rows 2 and 4
  CHECK(sys->coupling_norm_column(3, 5) ==
        doctest::Approx(std::sqrt(0.25 + 0.25)));
  CHECK(sys->coupling_norm_column(1, 1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(sys->require_level(0), std::invalid_argument);
  CHECK_THROWS_AS((void)sys->eigenvalue(-3), std::invalid_argument);
}
