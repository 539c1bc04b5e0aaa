// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_MEDIUM_HPP
#define PCFBAND_MEDIUM_HPP

#include <complex>
#include <vector>

#include "pcfband/geometry.hpp"

namespace pcfband {

using Complex = std::complex<double>;

// Piecewise-constant permittivity profile epsilon = n^2 (eps0 = mu0 = 1)
// over the periodicity cell of `lattice`.
struct PermittivityMap {
  PolygonalPartition partition;
  Lattice2D lattice;
};

double n2_min(const PermittivityMap& map);
double n2_max(const PermittivityMap& map);

// Fourier coefficients of eta = 1/n^2 on the reciprocal lattice.
// A table built with cutoff N stores eta_hat(m1 b1 + m2 b2) for
// |m1|, |m2| <= 2N, which covers every difference G - G' of basis vectors
// with |m_i| <= N. Conjugate symmetry eta_hat(-G) = conj(eta_hat(G)) is
// enforced exactly at construction.
class FourierTable {
 public:
  FourierTable(int cutoff, const ReciprocalLattice2D& recip);

  int cutoff() const { return cutoff_; }
  int range() const { return 2 * cutoff_; }

  bool has(int m1, int m2) const {
    return std::abs(m1) <= range() && std::abs(m2) <= range();
  }
  Complex coeff(int m1, int m2) const;
  void set_coeff(int m1, int m2, Complex value);
  // Sets coeff(m1, m2) = value and coeff(-m1, -m2) = conj(value).
  void set_pair(int m1, int m2, Complex value);

  Vec2 gvec(int m1, int m2) const {
    return static_cast<double>(m1) * recip_.b1 +
           static_cast<double>(m2) * recip_.b2;
  }
  const ReciprocalLattice2D& recip() const { return recip_; }

 private:
  int index(int m1, int m2) const {
    const int n = 2 * range() + 1;
    return (m1 + range()) * n + (m2 + range());
  }
  int cutoff_;
  ReciprocalLattice2D recip_;
  std::vector<Complex> coeffs_;
};

// Fourier integral of the indicator of a CCW-oriented polygon,
// I(g) = integral over the polygon of exp(-i g.x) dA, evaluated in closed
// form as a sum over edges; g = 0 gives the area.
Complex polygon_fourier_integral(const std::vector<Vec2>& poly, const Vec2& g);

// Exact (closed-form) Fourier coefficients of eta = 1/n^2.
FourierTable eta_fourier_polygon(const PermittivityMap& map, int cutoff);

// Independent oracle: midpoint sampling of eta on a grid_m x grid_m cell
// grid followed by a discrete Fourier sum. Requires grid_m >= 8(2N+1).
FourierTable eta_fourier_grid(const PermittivityMap& map, int grid_m,
                              int cutoff);

}  // namespace pcfband

#endif  // PCFBAND_MEDIUM_HPP
