// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcfband/errors.hpp"

namespace pcfband {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 cross_ke(const BasisMode& m, int p) {
  return m.k.cross(p == 0 ? m.e1 : m.e2);
}

}  // namespace

PlanewaveBasis::PlanewaveBasis(const BlochParams& bloch, const Lattice2D& lat,
                               int cutoff)
    : bloch_(bloch), lat_(lat), cutoff_(cutoff) {
  if (cutoff < 0) throw Error("basis cutoff must be nonnegative");
  const ReciprocalLattice2D recip = reciprocal_lattice(lat);
  modes_.reserve(static_cast<size_t>(2 * cutoff + 1) * (2 * cutoff + 1));
  for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
    for (int m2 = -cutoff; m2 <= cutoff; ++m2) {
      const Vec2 g = static_cast<double>(m1) * recip.b1 +
                     static_cast<double>(m2) * recip.b2;
      BasisMode mode;
      mode.m1 = m1;
      mode.m2 = m2;
      mode.k = Vec3(bloch.xi.x() + g.x(), bloch.xi.y() + g.y(), bloch.beta);
      const double kn = mode.k.norm();
      if (kn < 1e-14) {
        mode.e1 = Vec3::UnitX();
        mode.e2 = Vec3::UnitY();
        mode.zero_mode = true;
        ++zero_modes_;
      } else {
        const Vec3 khat = mode.k / kn;
        if (std::hypot(khat.x(), khat.y()) < 1e-12) {
          mode.e1 = Vec3::UnitX();
          mode.e2 = Vec3::UnitY();
        } else {
          mode.e1 = Vec3::UnitZ().cross(khat).normalized();
          mode.e2 = khat.cross(mode.e1);
        }
      }
      modes_.push_back(mode);
    }
  }
}

PlanewaveBasis build_basis(const BlochParams& bloch, const Lattice2D& lat,
                           int cutoff) {
  return PlanewaveBasis(bloch, lat, cutoff);
}

OperatorMatrix assemble(const PlanewaveBasis& basis, const FourierTable& table) {
  if (table.cutoff() < basis.cutoff()) {
    throw TableTooSmall("Fourier table cutoff " +
                        std::to_string(table.cutoff()) +
                        " smaller than basis cutoff " +
                        std::to_string(basis.cutoff()));
  }
  const int ng = basis.num_gvecs();
  std::vector<Vec3> d(static_cast<size_t>(2) * ng);
  for (int g = 0; g < ng; ++g) {
    d[2 * g + 0] = cross_ke(basis.mode(g), 0);
    d[2 * g + 1] = cross_ke(basis.mode(g), 1);
  }
  OperatorMatrix a(2 * ng, 2 * ng);
  for (int gr = 0; gr < ng; ++gr) {
    const BasisMode& mr = basis.mode(gr);
    for (int gc = 0; gc < ng; ++gc) {
      const BasisMode& mc = basis.mode(gc);
      const Complex eta = table.coeff(mr.m1 - mc.m1, mr.m2 - mc.m2);
      for (int pr = 0; pr < 2; ++pr) {
        for (int pc = 0; pc < 2; ++pc) {
          a(2 * gr + pr, 2 * gc + pc) =
              eta * d[2 * gc + pc].dot(d[2 * gr + pr]);
        }
      }
    }
  }
  return a;
}

double hermiticity_defect(const OperatorMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<CVec3> EigenSolution::coefficients(int band) const {
  if (band < 0 || band >= num_bands() || vectors.cols() <= band) {
    throw Error("band index out of range");
  }
  const int ng = basis.num_gvecs();
  std::vector<CVec3> u(ng);
  for (int g = 0; g < ng; ++g) {
    const BasisMode& m = basis.mode(g);
    u[g] = vectors(2 * g + 0, band) * m.e1.cast<Complex>() +
           vectors(2 * g + 1, band) * m.e2.cast<Complex>();
  }
  return u;
}

EigenSolution eigensolve(const OperatorMatrix& a, const PlanewaveBasis& basis,
                         int nev, double tol) {
  if (a.rows() != a.cols() || a.rows() != basis.dim()) {
    throw Error("operator dimension does not match basis");
  }
  if (nev < 1 || nev > a.rows()) throw Error("nev out of range");
  if (!(tol > 0.0 && tol <= 1e-4)) throw Error("tol must lie in (0, 1e-4]");

  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(a);
  if (es.info() != Eigen::Success) {
    throw SolverDiverged("dense Hermitian eigensolve failed to converge",
                         std::numeric_limits<double>::quiet_NaN());
  }

  EigenSolution sol(basis);
  sol.kappa2 = es.eigenvalues().head(nev);
  sol.vectors = es.eigenvectors().leftCols(nev);

  const double anorm = std::max(
      {std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(a.rows() - 1)),
       1e-300});
  double max_res = 0.0;
  for (int j = 0; j < nev; ++j) {
    const double r =
        (a * sol.vectors.col(j) - sol.kappa2(j) * sol.vectors.col(j)).norm();
    max_res = std::max(max_res, r);
    // Phase convention: largest-magnitude coefficient real positive.
    int imax = 0;
    sol.vectors.col(j).cwiseAbs().maxCoeff(&imax);
    const Complex z = sol.vectors(imax, j);
    if (std::abs(z) > 0) sol.vectors.col(j) *= std::conj(z) / std::abs(z);
  }
  sol.max_residual = max_res / anorm;
  if (sol.max_residual > tol) {
    throw SolverDiverged("eigenpair residual " +
                             std::to_string(sol.max_residual) +
                             " exceeds tolerance",
                         sol.max_residual);
  }
  return sol;
}

Eigen::VectorXd eigenvalues_only(const OperatorMatrix& a, int nev) {
  if (nev < 1 || nev > a.rows()) throw Error("nev out of range");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw SolverDiverged("dense Hermitian eigensolve failed to converge",
                         std::numeric_limits<double>::quiet_NaN());
  }
  return es.eigenvalues().head(nev);
}

std::vector<std::pair<int, int>> degenerate_clusters(
    const Eigen::VectorXd& kappa2, double gap_tol) {
  std::vector<std::pair<int, int>> clusters;
  int first = 0;
  for (int i = 1; i <= kappa2.size(); ++i) {
    if (i == kappa2.size() || kappa2(i) - kappa2(i - 1) > gap_tol) {
      if (i - 1 > first) clusters.emplace_back(first, i - 1);
      first = i;
    }
  }
  return clusters;
}

namespace {

// Two-stage evaluation of sum_G c_G exp(i G.x) on the fractional grid,
// using G.x = 2 pi (m1 s + m2 t).
struct GridEvaluator {
  int m;
  int cutoff;
  std::vector<Complex> e1, e2;  // [(k+N)*m + i]

  GridEvaluator(int grid_m, int n) : m(grid_m), cutoff(n) {
    const int nm = 2 * n + 1;
    e1.resize(static_cast<size_t>(nm) * m);
    e2.resize(static_cast<size_t>(nm) * m);
    for (int k = -n; k <= n; ++k) {
      for (int i = 0; i < m; ++i) {
        const double frac = static_cast<double>(i) / m - 0.5;
        const double arg = kTwoPi * k * frac;
        e1[static_cast<size_t>(k + n) * m + i] = Complex(std::cos(arg), std::sin(arg));
      }
    }
    e2 = e1;
  }

  // coeffs indexed like the basis (lexicographic in (m1, m2)).
  std::vector<CVec3> evaluate(const std::vector<CVec3>& coeffs) const {
    const int nm = 2 * cutoff + 1;
    std::vector<CVec3> partial(static_cast<size_t>(nm) * m, CVec3::Zero());
    for (int i1 = 0; i1 < nm; ++i1) {
      for (int j = 0; j < m; ++j) {
        CVec3 acc = CVec3::Zero();
        for (int i2 = 0; i2 < nm; ++i2) {
          acc += coeffs[static_cast<size_t>(i1) * nm + i2] *
                 e2[static_cast<size_t>(i2) * m + j];
        }
        partial[static_cast<size_t>(i1) * m + j] = acc;
      }
    }
    std::vector<CVec3> out(static_cast<size_t>(m) * m, CVec3::Zero());
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        CVec3 acc = CVec3::Zero();
        for (int i1 = 0; i1 < nm; ++i1) {
          acc += e1[static_cast<size_t>(i1) * m + i] *
                 partial[static_cast<size_t>(i1) * m + j];
        }
        out[static_cast<size_t>(i) * m + j] = acc;
      }
    }
    return out;
  }
};

FieldGrid evaluate_field(const EigenSolution& sol,
                         const std::vector<CVec3>& coeffs, int grid_m) {
  const Lattice2D& lat = sol.basis.lattice();
  FieldGrid grid;
  grid.m = grid_m;
  grid.points.resize(static_cast<size_t>(grid_m) * grid_m);
  const GridEvaluator ev(grid_m, sol.basis.cutoff());
  grid.values = ev.evaluate(coeffs);
  for (int i = 0; i < grid_m; ++i) {
    const double s = static_cast<double>(i) / grid_m - 0.5;
    for (int j = 0; j < grid_m; ++j) {
      const double t = static_cast<double>(j) / grid_m - 0.5;
      const Vec2 x = s * lat.a1 + t * lat.a2;
      const size_t idx = static_cast<size_t>(i) * grid_m + j;
      grid.points[idx] = x;
      const double phase = sol.bloch.xi.dot(x);
      grid.values[idx] *= Complex(std::cos(phase), std::sin(phase));
    }
  }
  return grid;
}

std::vector<CVec3> curl_coefficients(const EigenSolution& sol, int band) {
  std::vector<CVec3> u = sol.coefficients(band);
  const int ng = sol.basis.num_gvecs();
  std::vector<CVec3> w(ng);
  for (int g = 0; g < ng; ++g) {
    const Vec3& k = sol.basis.mode(g).k;
    w[g] = Complex(0.0, 1.0) * pcfband::cross(k, u[g]);
  }
  return w;
}

}  // namespace

FieldGrid reconstruct_h(const EigenSolution& sol, int band, int grid_m) {
  if (grid_m < 1) throw Error("grid size must be positive");
  return evaluate_field(sol, sol.coefficients(band), grid_m);
}

FieldGrid recover_e(const PermittivityMap& map, const EigenSolution& sol,
                    int band, int grid_m) {
  if (band < 0 || band >= sol.num_bands()) throw Error("band index out of range");
  const double k2 = sol.kappa2(band);
  if (k2 <= 1e-12) {
    throw ZeroFrequency("band has kappa^2 <= 1e-12; E-field recovery needs omega != 0");
  }
  const double omega = std::sqrt(k2);
  FieldGrid grid = evaluate_field(sol, curl_coefficients(sol, band), grid_m);
  const RegionLocator locator(map.partition, map.lattice);
  for (size_t idx = 0; idx < grid.values.size(); ++idx) {
    const double n2 = locator.n2_at(grid.points[idx]);
    grid.values[idx] *= Complex(0.0, 1.0) / (omega * n2);
  }
  return grid;
}

double divergence_residual(const EigenSolution& sol, int band) {
  const std::vector<CVec3> u = sol.coefficients(band);
  double div2 = 0.0, norm2 = 0.0;
  for (int g = 0; g < sol.basis.num_gvecs(); ++g) {
    const Vec3& k = sol.basis.mode(g).k;
    div2 += std::norm(k.cast<Complex>().dot(u[g]));
    norm2 += u[g].squaredNorm();
  }
  return std::sqrt(div2) / std::max(std::sqrt(norm2), 1e-300);
}

double faraday_residual(const EigenSolution& sol, int band,
                        const FourierTable& table) {
  const double k2 = sol.kappa2(band);
  if (k2 <= 1e-12) {
    throw ZeroFrequency("Faraday residual needs omega != 0");
  }
  const double omega = std::sqrt(k2);
  const std::vector<CVec3> u = sol.coefficients(band);
  const std::vector<CVec3> w = curl_coefficients(sol, band);
  const int ng = sol.basis.num_gvecs();

  double res2 = 0.0, norm2 = 0.0;
  for (int g = 0; g < ng; ++g) {
    const BasisMode& mg = sol.basis.mode(g);
    CVec3 conv = CVec3::Zero();
    for (int gp = 0; gp < ng; ++gp) {
      const BasisMode& mp = sol.basis.mode(gp);
      conv += table.coeff(mg.m1 - mp.m1, mg.m2 - mp.m2) * w[gp];
    }
    const CVec3 e_g = Complex(0.0, 1.0) / omega * conv;
    const CVec3 lhs = Complex(0.0, 1.0) * pcfband::cross(mg.k, e_g);
    const CVec3 rhs = Complex(0.0, omega) * u[g];
    res2 += (lhs - rhs).squaredNorm();
    norm2 += u[g].squaredNorm();
  }
  return std::sqrt(res2) / std::max(std::sqrt(norm2), 1e-300);
}

Reg4Residuals reg4_residuals(const FourierTable& table,
                             const EigenSolution& sol, int band,
                             int test_cutoff) {
  const int n = sol.basis.cutoff();
  if (test_cutoff < n) throw Error("test cutoff must be at least the basis cutoff");
  if (table.range() < test_cutoff + n) {
    throw TableTooSmall("table range " + std::to_string(table.range()) +
                        " cannot form differences up to " +
                        std::to_string(test_cutoff + n));
  }
  const double k2 = sol.kappa2(band);
  const std::vector<CVec3> u = sol.coefficients(band);
  const std::vector<CVec3> w = curl_coefficients(sol, band);
  const int ng = sol.basis.num_gvecs();
  const ReciprocalLattice2D recip = reciprocal_lattice(sol.basis.lattice());
  const BlochParams& bl = sol.bloch;

  Reg4Residuals r;
  double ra2 = 0.0, rb2 = 0.0, rc2 = 0.0;
  for (int m1 = -test_cutoff; m1 <= test_cutoff; ++m1) {
    for (int m2 = -test_cutoff; m2 <= test_cutoff; ++m2) {
      CVec3 conv = CVec3::Zero();
      for (int g = 0; g < ng; ++g) {
        const BasisMode& mg = sol.basis.mode(g);
        conv += table.coeff(m1 - mg.m1, m2 - mg.m2) * w[g];
      }
      const Vec2 gv = static_cast<double>(m1) * recip.b1 +
                      static_cast<double>(m2) * recip.b2;
      const Vec3 k(bl.xi.x() + gv.x(), bl.xi.y() + gv.y(), bl.beta);
      CVec3 res = Complex(0.0, 1.0) * pcfband::cross(k, conv);
      if (std::abs(m1) <= n && std::abs(m2) <= n) {
        const int g = (m1 + n) * (2 * n + 1) + (m2 + n);
        res -= k2 * u[g];
      }
      ra2 += std::norm(res.x());
      rb2 += std::norm(res.y());
      rc2 += std::norm(res.z());
    }
  }
  r.ra = std::sqrt(ra2);
  r.rb = std::sqrt(rb2);
  r.rc = std::sqrt(rc2);
  r.rd = divergence_residual(sol, band);
  return r;
}

Reg4Residuals reg4_residuals(const PermittivityMap& map,
                             const EigenSolution& sol, int band,
                             int test_cutoff) {
  const int n = sol.basis.cutoff();
  const int needed = test_cutoff + n;
  const int table_cutoff = (needed + 1) / 2;
  return reg4_residuals(eta_fourier_polygon(map, table_cutoff), sol, band,
                        test_cutoff);
}

}  // namespace pcfband
