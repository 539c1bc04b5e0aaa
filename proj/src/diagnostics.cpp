// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/diagnostics.hpp"

#include <cmath>
#include <random>

#include "pcfband/errors.hpp"

namespace pcfband {

TrigField::TrigField(const BlochParams& bloch, const Lattice2D& lat, int cutoff)
    : bloch_(bloch), lat_(lat), recip_(reciprocal_lattice(lat)), cutoff_(cutoff) {
  if (cutoff < 0) throw Error("cutoff must be nonnegative");
  const int n = 2 * cutoff + 1;
  coeffs_.assign(static_cast<size_t>(n) * n, CVec3::Zero());
}

Vec3 TrigField::kvec(int m1, int m2) const {
  const Vec2 g = gvec2(m1, m2);
  return Vec3(bloch_.xi.x() + g.x(), bloch_.xi.y() + g.y(), bloch_.beta);
}

Vec2 TrigField::gvec2(int m1, int m2) const {
  return static_cast<double>(m1) * recip_.b1 + static_cast<double>(m2) * recip_.b2;
}

double TrigField::l2_norm_sq() const {
  double s = 0.0;
  for (const CVec3& c : coeffs_) s += c.squaredNorm();
  return s;
}

double TrigField::grad_norm_sq() const {
  double s = 0.0;
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1) {
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2) {
      s += gvec2(m1, m2).squaredNorm() * coeff(m1, m2).squaredNorm();
    }
  }
  return s;
}

double TrigField::grad_xi_norm_sq() const {
  double s = 0.0;
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1) {
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2) {
      s += kvec(m1, m2).squaredNorm() * coeff(m1, m2).squaredNorm();
    }
  }
  return s;
}

ScalarTrigField::ScalarTrigField(const BlochParams& bloch, const Lattice2D& lat,
                                 int cutoff)
    : bloch_(bloch), lat_(lat), cutoff_(cutoff) {
  if (cutoff < 0) throw Error("cutoff must be nonnegative");
  const int n = 2 * cutoff + 1;
  coeffs_.assign(static_cast<size_t>(n) * n, Complex(0.0, 0.0));
}

double ScalarTrigField::l2_norm_sq() const {
  double s = 0.0;
  for (const Complex& c : coeffs_) s += std::norm(c);
  return s;
}

TrigField curl_xi(const TrigField& v) {
  TrigField out(v.bloch(), v.lattice(), v.cutoff());
  for (int m1 = -v.cutoff(); m1 <= v.cutoff(); ++m1) {
    for (int m2 = -v.cutoff(); m2 <= v.cutoff(); ++m2) {
      out.coeff(m1, m2) = Complex(0.0, 1.0) *
                          pcfband::cross(v.kvec(m1, m2), v.coeff(m1, m2));
    }
  }
  return out;
}

ScalarTrigField div_xi(const TrigField& v) {
  ScalarTrigField out(v.bloch(), v.lattice(), v.cutoff());
  for (int m1 = -v.cutoff(); m1 <= v.cutoff(); ++m1) {
    for (int m2 = -v.cutoff(); m2 <= v.cutoff(); ++m2) {
      out.coeff(m1, m2) =
          Complex(0.0, 1.0) * v.kvec(m1, m2).cast<Complex>().dot(v.coeff(m1, m2));
    }
  }
  return out;
}

TrigField grad_xi(const ScalarTrigField& s) {
  TrigField out(s.bloch(), s.lattice(), s.cutoff());
  for (int m1 = -s.cutoff(); m1 <= s.cutoff(); ++m1) {
    for (int m2 = -s.cutoff(); m2 <= s.cutoff(); ++m2) {
      out.coeff(m1, m2) =
          Complex(0.0, 1.0) * out.kvec(m1, m2).cast<Complex>() * s.coeff(m1, m2);
    }
  }
  return out;
}

Complex inner(const TrigField& u, const TrigField& v) {
  if (u.cutoff() != v.cutoff() ||
      (u.bloch().xi - v.bloch().xi).norm() > 1e-14 ||
      std::abs(u.bloch().beta - v.bloch().beta) > 1e-14) {
    throw ParamMismatch("fields have different Bloch parameters or cutoffs");
  }
  Complex s(0.0, 0.0);
  for (int m1 = -u.cutoff(); m1 <= u.cutoff(); ++m1) {
    for (int m2 = -u.cutoff(); m2 <= u.cutoff(); ++m2) {
      s += v.coeff(m1, m2).dot(u.coeff(m1, m2));
    }
  }
  return s;
}

IdentityCheck check_identity(const TrigField& v) {
  IdentityCheck c;
  c.lhs = curl_xi(v).l2_norm_sq() + div_xi(v).l2_norm_sq();
  c.rhs = v.grad_xi_norm_sq();
  c.gap = std::abs(c.lhs - c.rhs);
  return c;
}

namespace {

// a(v,v) = sum_{G,G'} conj(w_G) . eta_hat(G - G') w_G' with w = curl_xi v.
// Exact for trigonometric polynomials when the table covers |m| <= 2N.
double curl_form(const TrigField& v, const FourierTable& table) {
  const TrigField w = curl_xi(v);
  const int n = v.cutoff();
  Complex acc(0.0, 0.0);
  for (int a1 = -n; a1 <= n; ++a1) {
    for (int a2 = -n; a2 <= n; ++a2) {
      const CVec3& wa = w.coeff(a1, a2);
      if (wa.isZero(0.0)) continue;
      for (int b1 = -n; b1 <= n; ++b1) {
        for (int b2 = -n; b2 <= n; ++b2) {
          // Eigen's dot conjugates its first argument.
          acc += table.coeff(a1 - b1, a2 - b2) * wa.dot(w.coeff(b1, b2));
        }
      }
    }
  }
  return acc.real();
}

}  // namespace

GardingCheck check_garding(const TrigField& v_in, const FourierTable& table,
                           double n_inf) {
  if (table.cutoff() < v_in.cutoff()) {
    throw TableTooSmall("Fourier table smaller than field cutoff");
  }
  const TrigField v = project_divergence_free(v_in);
  const double l2 = v.l2_norm_sq();
  const double h1 = l2 + v.grad_norm_sq();
  const double xi2 = v.bloch().xi.squaredNorm();
  const double beta = v.bloch().beta;
  const double xi3d2 = xi2 + beta * beta;

  GardingCheck c;
  c.form_value = curl_form(v, table);
  c.lhs = n_inf * n_inf * c.form_value + (3.0 * xi3d2 + 1.0) * l2;
  c.rhs = 0.5 * h1;
  c.slack = c.lhs - c.rhs;
  c.slack2 = n_inf * n_inf * c.form_value + (3.0 * xi2 + 1.0) * l2 - 0.5 * h1 -
             beta * beta * l2;
  return c;
}

TrigField random_field(const BlochParams& bloch, const Lattice2D& lat,
                       int cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TrigField v(bloch, lat, cutoff);
  for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
    for (int m2 = -cutoff; m2 <= cutoff; ++m2) {
      CVec3& c = v.coeff(m1, m2);
      for (int d = 0; d < 3; ++d) c(d) = Complex(gauss(rng), gauss(rng));
    }
  }
  return v;
}

TrigField project_divergence_free(const TrigField& v) {
  TrigField out = v;
  for (int m1 = -v.cutoff(); m1 <= v.cutoff(); ++m1) {
    for (int m2 = -v.cutoff(); m2 <= v.cutoff(); ++m2) {
      const Vec3 k = v.kvec(m1, m2);
      const double kn2 = k.squaredNorm();
      if (kn2 < 1e-28) continue;
      const CVec3 kc = k.cast<Complex>();
      out.coeff(m1, m2) -= kc * (kc.dot(out.coeff(m1, m2)) / kn2);
    }
  }
  return out;
}

}  // namespace pcfband
