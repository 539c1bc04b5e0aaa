// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcfband/errors.hpp"

namespace pcfband {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (1 - exp(-i s)) / (i s), the unit-interval Fourier factor of one edge.
// The singularity at s = 0 is removable; below 1e-8 the series is exact to
// machine precision.
Complex edge_phi(double s) {
  if (std::abs(s) < 1e-8) {
    return Complex(1.0 - s * s / 6.0, -s / 2.0 + s * s * s / 24.0);
  }
  return (1.0 - std::exp(Complex(0.0, -s))) / Complex(0.0, s);
}

}  // namespace

double n2_min(const PermittivityMap& map) {
  double v = map.partition.background_n2;
  for (const Region& r : map.partition.regions) v = std::min(v, r.n2);
  return v;
}

double n2_max(const PermittivityMap& map) {
  double v = map.partition.background_n2;
  for (const Region& r : map.partition.regions) v = std::max(v, r.n2);
  return v;
}

FourierTable::FourierTable(int cutoff, const ReciprocalLattice2D& recip)
    : cutoff_(cutoff), recip_(recip) {
  if (cutoff < 0) throw Error("FourierTable cutoff must be nonnegative");
  const int n = 2 * range() + 1;
  coeffs_.assign(static_cast<size_t>(n) * n, Complex(0.0, 0.0));
}

Complex FourierTable::coeff(int m1, int m2) const {
  if (!has(m1, m2)) {
    throw TableTooSmall("coefficient (" + std::to_string(m1) + "," +
                        std::to_string(m2) + ") outside table range " +
                        std::to_string(range()));
  }
  return coeffs_[index(m1, m2)];
}

void FourierTable::set_coeff(int m1, int m2, Complex value) {
  if (!has(m1, m2)) {
    throw TableTooSmall("coefficient outside table range");
  }
  coeffs_[index(m1, m2)] = value;
}

void FourierTable::set_pair(int m1, int m2, Complex value) {
  set_coeff(m1, m2, value);
  set_coeff(-m1, -m2, std::conj(value));
}

Complex polygon_fourier_integral(const std::vector<Vec2>& poly, const Vec2& g) {
  const double g2 = g.squaredNorm();
  if (g2 < 1e-28) {
    return Complex(std::abs(polygon_signed_area(poly)), 0.0);
  }
  Complex sum(0.0, 0.0);
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2 e = poly[(i + 1) % n] - a;
    const double cr = g.x() * e.y() - g.y() * e.x();
    if (cr == 0.0) continue;
    const double phase = g.dot(a);
    sum += cr * std::exp(Complex(0.0, -phase)) * edge_phi(g.dot(e));
  }
  return Complex(0.0, 1.0) / g2 * sum;
}

FourierTable eta_fourier_polygon(const PermittivityMap& map, int cutoff) {
  const ReciprocalLattice2D recip = reciprocal_lattice(map.lattice);
  FourierTable table(cutoff, recip);
  const double cell = map.lattice.cell_area();
  const double eta_bg = 1.0 / map.partition.background_n2;

  // CCW copies so the edge sum carries the right orientation.
  std::vector<std::vector<Vec2>> ccw;
  std::vector<double> delta_eta;
  for (const Region& r : map.partition.regions) {
    std::vector<Vec2> p = r.polygon;
    if (polygon_signed_area(p) < 0) std::reverse(p.begin(), p.end());
    ccw.push_back(std::move(p));
    delta_eta.push_back(1.0 / r.n2 - eta_bg);
  }

  const int rng = table.range();
  for (int m1 = 0; m1 <= rng; ++m1) {
    const int m2_lo = (m1 == 0) ? 0 : -rng;
    for (int m2 = m2_lo; m2 <= rng; ++m2) {
      const Vec2 g = table.gvec(m1, m2);
      Complex value = (m1 == 0 && m2 == 0) ? Complex(eta_bg, 0.0)
                                           : Complex(0.0, 0.0);
      for (size_t r = 0; r < ccw.size(); ++r) {
        value += delta_eta[r] * polygon_fourier_integral(ccw[r], g) / cell;
      }
      table.set_pair(m1, m2, value);
    }
  }
  return table;
}

FourierTable eta_fourier_grid(const PermittivityMap& map, int grid_m,
                              int cutoff) {
  const int min_m = 8 * (2 * cutoff + 1);
  if (grid_m < min_m) {
    throw Undersampled("grid " + std::to_string(grid_m) +
                       " undersampled for cutoff " + std::to_string(cutoff) +
                       " (need at least " + std::to_string(min_m) + ")");
  }
  const ReciprocalLattice2D recip = reciprocal_lattice(map.lattice);
  FourierTable table(cutoff, recip);
  const RegionLocator locator(map.partition, map.lattice);
  const int m = grid_m;
  const int rng = table.range();

  std::vector<double> eta(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    const double s = (i + 0.5) / m - 0.5;
    for (int j = 0; j < m; ++j) {
      const double t = (j + 0.5) / m - 0.5;
      eta[static_cast<size_t>(i) * m + j] =
          1.0 / locator.n2_at(s * map.lattice.a1 + t * map.lattice.a2);
    }
  }

  // G.x = 2 pi (m1 s + m2 t) for x = s a1 + t a2, so the transform is a
  // separable DFT in fractional coordinates.
  const int nm = 2 * rng + 1;
  std::vector<Complex> e1(static_cast<size_t>(nm) * m);
  std::vector<Complex> e2(static_cast<size_t>(nm) * m);
  for (int k = -rng; k <= rng; ++k) {
    for (int i = 0; i < m; ++i) {
      const double frac = (i + 0.5) / m - 0.5;
      const double arg = -kTwoPi * k * frac;
      const Complex w(std::cos(arg), std::sin(arg));
      e1[static_cast<size_t>(k + rng) * m + i] = w;
      e2[static_cast<size_t>(k + rng) * m + i] = w;
    }
  }

  std::vector<Complex> row(static_cast<size_t>(m) * nm);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < nm; ++k) {
      Complex acc(0.0, 0.0);
      const Complex* w = &e2[static_cast<size_t>(k) * m];
      const double* er = &eta[static_cast<size_t>(i) * m];
      for (int j = 0; j < m; ++j) acc += er[j] * w[j];
      row[static_cast<size_t>(i) * nm + k] = acc;
    }
  }
  const double scale = 1.0 / (static_cast<double>(m) * m);
  for (int m1 = 0; m1 <= rng; ++m1) {
    const int m2_lo = (m1 == 0) ? 0 : -rng;
    for (int m2 = m2_lo; m2 <= rng; ++m2) {
      Complex acc(0.0, 0.0);
      const Complex* w = &e1[static_cast<size_t>(m1 + rng) * m];
      for (int i = 0; i < m; ++i) {
        acc += w[i] * row[static_cast<size_t>(i) * nm + (m2 + rng)];
      }
      table.set_pair(m1, m2, acc * scale);
    }
  }
  return table;
}

}  // namespace pcfband
