// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_OPERATOR_HPP
#define PCFBAND_OPERATOR_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pcfband/medium.hpp"

namespace pcfband {

using CVec3 = Eigen::Vector3cd;

// Plain cross product of a real and a complex 3-vector. Eigen's cross()
// conjugates its complex result, which is not the geometric product wanted
// here.
inline CVec3 cross(const Vec3& a, const CVec3& b) {
  return CVec3(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
               a.x() * b.y() - a.y() * b.x());
}

// Bloch parameters of one Floquet problem: quasi-momentum xi in the first
// Brillouin zone and propagation constant beta along the fibre axis.
struct BlochParams {
  Vec2 xi = Vec2::Zero();
  double beta = 0.0;
};

// One planewave mode: reciprocal-lattice indices, the 3D wavevector
// k = (xi + G, beta) and an orthonormal polarization pair e1, e2 with
// e_p . k = 0. With this frame the divergence-free constraint holds
// exactly per mode.
struct BasisMode {
  int m1 = 0, m2 = 0;
  Vec3 k = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  bool zero_mode = false;  // |k| = 0, possible only when xi + G = 0 and beta = 0
};

// Truncated divergence-free transverse planewave basis, |m1|,|m2| <= N,
// ordered lexicographically in (m1, m2). Bases are nested across N.
class PlanewaveBasis {
 public:
  PlanewaveBasis(const BlochParams& bloch, const Lattice2D& lat, int cutoff);

  int cutoff() const { return cutoff_; }
  int num_gvecs() const { return static_cast<int>(modes_.size()); }
  int dim() const { return 2 * num_gvecs(); }
  int zero_mode_count() const { return zero_modes_; }  // flagged G-vectors

  const BasisMode& mode(int g) const { return modes_[g]; }
  const std::vector<BasisMode>& modes() const { return modes_; }
  const BlochParams& bloch() const { return bloch_; }
  const Lattice2D& lattice() const { return lat_; }

 private:
  BlochParams bloch_;
  Lattice2D lat_;
  int cutoff_;
  int zero_modes_ = 0;
  std::vector<BasisMode> modes_;
};

PlanewaveBasis build_basis(const BlochParams& bloch, const Lattice2D& lat,
                           int cutoff);

// Galerkin matrix of the curl (1/n^2) curl form in the polarization basis,
// A[(G,p),(G',p')] = eta_hat(G - G') (k_G x e_p).(k_G' x e_p'). The mass
// matrix is the identity, so the problem is a standard Hermitian one.
using OperatorMatrix = Eigen::MatrixXcd;

OperatorMatrix assemble(const PlanewaveBasis& basis, const FourierTable& table);

double hermiticity_defect(const OperatorMatrix& a);

// Eigenpairs of one Floquet problem, ascending. Eigenvector columns have
// unit 2-norm and the phase fixed so the largest-magnitude coefficient is
// real positive; degenerate clusters are deterministic only as subspaces.
struct EigenSolution {
  explicit EigenSolution(PlanewaveBasis b)
      : bloch(b.bloch()), basis(std::move(b)) {}

  BlochParams bloch;
  PlanewaveBasis basis;
  Eigen::VectorXd kappa2;
  Eigen::MatrixXcd vectors;  // dim x nev; empty when only values were asked
  double max_residual = 0.0;

  int num_bands() const { return static_cast<int>(kappa2.size()); }
  // Per-G 3-vector coefficients u_G of band `band`.
  std::vector<CVec3> coefficients(int band) const;
};

EigenSolution eigensolve(const OperatorMatrix& a, const PlanewaveBasis& basis,
                         int nev, double tol);

// Eigenvalues only (no vectors); the fast path for resolution sweeps.
Eigen::VectorXd eigenvalues_only(const OperatorMatrix& a, int nev);

// Index ranges [first, last] of eigenvalues closer than gap_tol to their
// neighbour. Within a cluster only the spanned subspace is deterministic,
// not the individual vectors.
std::vector<std::pair<int, int>> degenerate_clusters(
    const Eigen::VectorXd& kappa2, double gap_tol = 1e-10);

// Grid samples of a field over the periodicity cell. Node sampling of the
// centered cell: x(i,j) = (i/m - 1/2) a1 + (j/m - 1/2) a2, row-major in i.
struct FieldGrid {
  int m = 0;
  std::vector<Vec2> points;
  std::vector<CVec3> values;
};

// h(x') = sum_G u_G exp(i (xi + G).x'), Bloch phase included. The
// longitudinal dependence is the reported scalar beta.
FieldGrid reconstruct_h(const EigenSolution& sol, int band, int grid_m);

// e = (i / (omega eps(x'))) curl_{(xi,beta)} h per grid point, omega =
// +sqrt(kappa2), eps = n^2. The curl is evaluated exactly in coefficient
// space; requires kappa2 > 1e-12.
FieldGrid recover_e(const PermittivityMap& map, const EigenSolution& sol,
                    int band, int grid_m);

// l2 norm of the coefficient-space divergence (xi + G, beta).u_G, relative
// to the coefficient norm. Zero up to rounding by basis construction.
double divergence_residual(const EigenSolution& sol, int band);

// Relative residual of curl_{(xi,beta)} e - i omega h with e computed in
// the truncated planewave space through the eta_hat convolution. The
// identity is exact there; this measures implementation error only.
double faraday_residual(const EigenSolution& sol, int band,
                        const FourierTable& table);

// Componentwise weak-form residuals of the expanded curl-curl system,
// tested against the truncated planewave space |m_i| <= test_cutoff with
// the exact eta_hat convolution. r_d is the divergence residual, exactly
// zero up to rounding.
struct Reg4Residuals {
  double ra = 0.0, rb = 0.0, rc = 0.0, rd = 0.0;
};

Reg4Residuals reg4_residuals(const FourierTable& table,
                             const EigenSolution& sol, int band,
                             int test_cutoff);
Reg4Residuals reg4_residuals(const PermittivityMap& map,
                             const EigenSolution& sol, int band,
                             int test_cutoff);

}  // namespace pcfband

#endif  // PCFBAND_OPERATOR_HPP
