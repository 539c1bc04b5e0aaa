// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_DIAGNOSTICS_HPP
#define PCFBAND_DIAGNOSTICS_HPP

#include <cstdint>
#include <vector>

#include "pcfband/operator.hpp"

namespace pcfband {

// Truncated trigonometric vector field: complex 3-vector coefficients v_G
// for |m1|,|m2| <= N over the periodic part, with Bloch parameters
// (xi, beta). Norms are Parseval sums; the shifted gradient acts
// coefficientwise through k_G = (xi + G, beta).
class TrigField {
 public:
  TrigField(const BlochParams& bloch, const Lattice2D& lat, int cutoff);

  int cutoff() const { return cutoff_; }
  const BlochParams& bloch() const { return bloch_; }
  const Lattice2D& lattice() const { return lat_; }

  CVec3& coeff(int m1, int m2) { return coeffs_[index(m1, m2)]; }
  const CVec3& coeff(int m1, int m2) const { return coeffs_[index(m1, m2)]; }

  Vec3 kvec(int m1, int m2) const;   // (xi + G, beta)
  Vec2 gvec2(int m1, int m2) const;  // G in the plane

  double l2_norm_sq() const;
  double grad_norm_sq() const;     // plain gradient, no xi shift
  double grad_xi_norm_sq() const;  // shifted gradient

 private:
  int index(int m1, int m2) const {
    const int n = 2 * cutoff_ + 1;
    return (m1 + cutoff_) * n + (m2 + cutoff_);
  }
  BlochParams bloch_;
  Lattice2D lat_;
  ReciprocalLattice2D recip_;
  int cutoff_;
  std::vector<CVec3> coeffs_;
};

// Scalar counterpart, used for divergences and potentials.
class ScalarTrigField {
 public:
  ScalarTrigField(const BlochParams& bloch, const Lattice2D& lat, int cutoff);

  int cutoff() const { return cutoff_; }
  const BlochParams& bloch() const { return bloch_; }
  const Lattice2D& lattice() const { return lat_; }

  Complex& coeff(int m1, int m2) { return coeffs_[index(m1, m2)]; }
  const Complex& coeff(int m1, int m2) const { return coeffs_[index(m1, m2)]; }

  double l2_norm_sq() const;

 private:
  int index(int m1, int m2) const {
    const int n = 2 * cutoff_ + 1;
    return (m1 + cutoff_) * n + (m2 + cutoff_);
  }
  BlochParams bloch_;
  Lattice2D lat_;
  int cutoff_;
  std::vector<Complex> coeffs_;
};

// Shifted calculus, coefficientwise: (curl v)_G = i k_G x v_G,
// (div v)_G = i k_G . v_G, (grad s)_G = i k_G s_G.
TrigField curl_xi(const TrigField& v);
ScalarTrigField div_xi(const TrigField& v);
TrigField grad_xi(const ScalarTrigField& s);

// L2 inner product of two fields; throws ParamMismatch when the Bloch
// parameters or cutoffs differ.
Complex inner(const TrigField& u, const TrigField& v);

// Both sides of the curl-div identity
// ||curl_xi v||^2 + ||div_xi v||^2 = ||grad_xi v||^2.
struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};
IdentityCheck check_identity(const TrigField& v);

// Garding inequality witness. The input is projected onto its
// divergence-free part first. lhs/rhs/slack realize
//   n_inf^2 a(v,v) + (3 |(xi,beta)|^2 + 1) ||v||^2 >= 1/2 ||v||_H1^2,
// and slack2 the two-dimensional variant carrying the beta^2 term on the
// right with only |xi|^2 on the left. The H1 norm uses the plain gradient.
struct GardingCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double slack2 = 0.0;
  double form_value = 0.0;  // a(v,v) through the eta_hat convolution
};
GardingCheck check_garding(const TrigField& v, const FourierTable& table,
                           double n_inf);

// Complex-Gaussian coefficients from a recorded seed.
TrigField random_field(const BlochParams& bloch, const Lattice2D& lat,
                       int cutoff, std::uint64_t seed);

// Removes the component of each v_G along k_G; modes with |k_G| = 0 are
// kept (their divergence vanishes regardless).
TrigField project_divergence_free(const TrigField& v);

}  // namespace pcfband

#endif  // PCFBAND_DIAGNOSTICS_HPP
