// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pcfband/errors.hpp"
#include "pcfband/medium.hpp"

using namespace pcfband;

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

PermittivityMap homogeneous(double n2) {
  PermittivityMap map;
  map.lattice = Lattice2D{Vec2(1, 0), Vec2(0, 1)};
  map.partition.background_n2 = n2;
  return map;
}

PermittivityMap square_rod_map(double side, double rod_n2, double bg_n2) {
  PermittivityMap map = homogeneous(bg_n2);
  Region r;
  const double h = side / 2;
  r.polygon = {Vec2(-h, -h), Vec2(h, -h), Vec2(h, h), Vec2(-h, h)};
  r.n2 = rod_n2;
  map.partition.regions = {r};
  return map;
}

PermittivityMap disc_map(int nsides, double radius, double rod_n2, double bg_n2) {
  PermittivityMap map = homogeneous(bg_n2);
  Region r;
  for (int i = 0; i < nsides; ++i) {
    const double a = 2 * kPi * i / nsides;
    r.polygon.push_back(radius * Vec2(std::cos(a), std::sin(a)));
  }
  r.n2 = rod_n2;
  map.partition.regions = {r};
  return map;
}

double max_coeff_difference(const FourierTable& a, const FourierTable& b) {
  const int rng = std::min(a.range(), b.range());
  double worst = 0.0;
  for (int m1 = -rng; m1 <= rng; ++m1) {
    for (int m2 = -rng; m2 <= rng; ++m2) {
      worst = std::max(worst, std::abs(a.coeff(m1, m2) - b.coeff(m1, m2)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("homogeneous cell has only the average coefficient") {
  const PermittivityMap map = homogeneous(2.1);
  const FourierTable tab = eta_fourier_polygon(map, 4);
  CHECK(tab.coeff(0, 0).real() == doctest::Approx(1.0 / 2.1).epsilon(1e-14));
  CHECK(tab.coeff(0, 0).imag() == 0.0);
  for (int m1 = -tab.range(); m1 <= tab.range(); ++m1) {
    for (int m2 = -tab.range(); m2 <= tab.range(); ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      CHECK(std::abs(tab.coeff(m1, m2)) < 1e-15);
    }
  }
}

TEST_CASE("centered axis-aligned square matches the separable closed form") {
  const double s = 0.4, rod = 13.0, bg = 1.0;
  const PermittivityMap map = square_rod_map(s, rod, bg);
  const FourierTable tab = eta_fourier_polygon(map, 4);
  const double delta_eta = 1.0 / rod - 1.0 / bg;
  for (int m1 = -tab.range(); m1 <= tab.range(); ++m1) {
    for (int m2 = -tab.range(); m2 <= tab.range(); ++m2) {
      const Vec2 g = tab.gvec(m1, m2);
      Complex expected =
          delta_eta * s * s * sinc(g.x() * s / 2) * sinc(g.y() * s / 2);
      if (m1 == 0 && m2 == 0) expected += 1.0 / bg;
      CHECK(std::abs(tab.coeff(m1, m2) - expected) < 1e-13);
    }
  }
}

TEST_CASE("64-gon disc matches the grid-sampled oracle to 1e-4") {
  const PermittivityMap map = disc_map(64, 0.3, 2.1, 1.0);
  const FourierTable exact = eta_fourier_polygon(map, 8);
  const FourierTable grid = eta_fourier_grid(map, 1024, 8);
  CHECK(max_coeff_difference(exact, grid) < 1e-4);
}

TEST_CASE("grid oracle") {
  SUBCASE("homogeneous cell has zero off-center coefficients to 1e-14") {
    const FourierTable tab = eta_fourier_grid(homogeneous(3.0), 512, 4);
    for (int m1 = -tab.range(); m1 <= tab.range(); ++m1) {
      for (int m2 = -tab.range(); m2 <= tab.range(); ++m2) {
        if (m1 == 0 && m2 == 0) continue;
        CHECK(std::abs(tab.coeff(m1, m2)) < 1e-14);
      }
    }
    CHECK(std::abs(tab.coeff(0, 0) - 1.0 / 3.0) < 1e-14);
  }

  SUBCASE("square rod at M=1024 matches the polygon transform to 1e-3") {
    const PermittivityMap map = square_rod_map(0.4, 13.0, 1.0);
    const FourierTable exact = eta_fourier_polygon(map, 8);
    const FourierTable grid = eta_fourier_grid(map, 1024, 8);
    CHECK(max_coeff_difference(exact, grid) < 1e-3);
  }

  SUBCASE("centro-symmetric geometry gives real coefficients") {
    const PermittivityMap map = square_rod_map(0.4, 13.0, 1.0);
    const FourierTable grid = eta_fourier_grid(map, 256, 2);
    for (int m1 = -grid.range(); m1 <= grid.range(); ++m1) {
      for (int m2 = -grid.range(); m2 <= grid.range(); ++m2) {
        CHECK(std::abs(grid.coeff(m1, m2).imag()) < 1e-12);
      }
    }
  }

  SUBCASE("undersampled grid is rejected") {
    CHECK_THROWS_AS(eta_fourier_grid(homogeneous(1.0), 64, 8), Undersampled);
  }
}

TEST_CASE("table properties") {
  const PermittivityMap map = square_rod_map(0.4, 13.0, 1.0);

  SUBCASE("conjugate symmetry is exact") {
    const FourierTable tab = eta_fourier_polygon(map, 6);
    for (int m1 = -tab.range(); m1 <= tab.range(); ++m1) {
      for (int m2 = -tab.range(); m2 <= tab.range(); ++m2) {
        CHECK(tab.coeff(m1, m2) == std::conj(tab.coeff(-m1, -m2)));
      }
    }
  }

  SUBCASE("average lies between min and max of eta") {
    const FourierTable tab = eta_fourier_polygon(map, 2);
    const double avg = tab.coeff(0, 0).real();
    CHECK(avg >= 1.0 / 13.0 - 1e-14);
    CHECK(avg <= 1.0 - 1e-14);
    CHECK(std::abs(tab.coeff(0, 0).imag()) < 1e-15);
  }

  SUBCASE("coefficient power is bounded by the mean of eta^2 and grows with N") {
    // Independent oracle for the mean of eta^2 over the cell: area-weighted
    // piecewise values.
    const double rod_area = 0.4 * 0.4;
    const double mean_eta2 =
        (1.0 / (13.0 * 13.0)) * rod_area + 1.0 * (1.0 - rod_area);
    double previous = 0.0;
    for (int n : {1, 2, 4, 8}) {
      const FourierTable tab = eta_fourier_polygon(map, n);
      double power = 0.0;
      for (int m1 = -tab.range(); m1 <= tab.range(); ++m1) {
        for (int m2 = -tab.range(); m2 <= tab.range(); ++m2) {
          power += std::norm(tab.coeff(m1, m2));
        }
      }
      CHECK(power <= mean_eta2 + 1e-12);
      CHECK(power >= previous - 1e-15);
      previous = power;
    }
  }

  SUBCASE("translating the polygons multiplies coefficients by a phase") {
    const Vec2 t(0.17, -0.23);
    PermittivityMap moved = map;
    for (Region& r : moved.partition.regions) {
      for (Vec2& v : r.polygon) v += t;
    }
    const FourierTable a = eta_fourier_polygon(map, 4);
    const FourierTable b = eta_fourier_polygon(moved, 4);
    for (int m1 = -a.range(); m1 <= a.range(); ++m1) {
      for (int m2 = -a.range(); m2 <= a.range(); ++m2) {
        const Vec2 g = a.gvec(m1, m2);
        const Complex phase = std::exp(Complex(0.0, -g.dot(t)));
        CHECK(std::abs(b.coeff(m1, m2) - phase * a.coeff(m1, m2)) < 1e-10);
      }
    }
  }

  SUBCASE("out-of-range coefficients throw") {
    const FourierTable tab = eta_fourier_polygon(map, 2);
    CHECK_THROWS_AS(tab.coeff(5, 0), TableTooSmall);
  }
}

TEST_CASE("edge-parallel wavevectors use the analytic limit") {
  // A thin rotated rectangle: picks g.edge ~ 0 terms on the long edges for
  // wavevectors perpendicular to them. Compare against the grid oracle.
  PermittivityMap map = homogeneous(1.0);
  Region r;
  r.polygon = {Vec2(-0.35, -0.02), Vec2(0.35, -0.02), Vec2(0.35, 0.02),
               Vec2(-0.35, 0.02)};
  r.n2 = 4.0;
  map.partition.regions = {r};
  const FourierTable exact = eta_fourier_polygon(map, 4);
  const FourierTable grid = eta_fourier_grid(map, 1024, 4);
  CHECK(max_coeff_difference(exact, grid) < 2e-3);
  // g along x on the long edge: the (m1, 0) coefficients hit the removable
  // singularity of the vertical edges and must still be finite and exact.
  const double s1 = 0.7, s2 = 0.04;
  const double delta_eta = 1.0 / 4.0 - 1.0;
  for (int m1 = 1; m1 <= exact.range(); ++m1) {
    const Vec2 g = exact.gvec(m1, 0);
    const Complex expected = delta_eta * s1 * s2 * sinc(g.x() * s1 / 2);
    CHECK(std::abs(exact.coeff(m1, 0) - expected) < 1e-13);
  }
}
