// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_CONVERGENCE_HPP
#define PCFBAND_CONVERGENCE_HPP

#include <functional>
#include <vector>

#include "pcfband/operator.hpp"

namespace pcfband {

// A medium is anything that can produce eta_hat tables at a requested
// cutoff: a polygonal permittivity map, or coefficients injected directly
// (e.g. a trigonometric-polynomial eta for smooth-medium experiments).
using TableSource = std::function<FourierTable(int cutoff)>;

TableSource polygon_table_source(PermittivityMap map);

// Resolution-sweep plan over one medium: the k-points to solve, the
// strictly increasing cutoff ladder (>= 3 rungs for order fits), and the
// number of bands tracked by sorted index.
struct SweepPlan {
  TableSource table;
  Lattice2D lattice;
  std::vector<BlochParams> kpoints;
  std::vector<int> ladder;
  int bands = 1;
  int threads = 0;  // 0 = hardware concurrency
};

// Least-squares decay order of log(error) against log(dof); p_hat > 0
// means decay. Points at or below the extrapolation noise floor are
// excluded and reported.
struct OrderFit {
  double p_hat = 0.0;
  double fit_residual = 0.0;
  std::vector<int> excluded;
};

OrderFit estimate_order(const std::vector<double>& errors,
                        const std::vector<double>& dofs);

// Reference value for a monotone eigenvalue sequence: Richardson
// extrapolation from the two finest rungs, with the decay order estimated
// from the three finest. Falls back to the finest value when the
// differences are at the noise floor.
double richardson_reference(const std::vector<double>& values,
                            const std::vector<double>& dofs);

// Convergence data of one tracked (k-point, band) pair across the ladder.
struct BandTrace {
  std::vector<double> kappa2;        // per rung
  double reference = 0.0;
  std::vector<double> errors;        // kappa2 - reference
  OrderFit fit;                      // global log-log fit
  std::vector<double> window_orders; // 3-rung windows, indexed by last rung
};

struct ConvergenceRecord {
  std::vector<int> ladder;
  std::vector<double> dofs;  // 2 (2N+1)^2 per rung
  std::vector<BlochParams> kpoints;
  std::vector<std::vector<BandTrace>> traces;  // [k][band]
};

ConvergenceRecord resolution_sweep(const SweepPlan& plan);

// kappa^2 over a sampled k-path, rows = k samples, columns = bands.
// Flagged zero modes (xi = 0, beta = 0) are excluded from the reported
// bands.
struct BandTable {
  std::vector<KSample> samples;
  double beta = 0.0;
  int cutoff = 0;
  Eigen::MatrixXd kappa2;
};

BandTable band_sweep(const TableSource& table, const Lattice2D& lat,
                     const KPath& path, double beta, int cutoff, int nbands,
                     int threads = 0);

// Photonic band gap: the interval between the maximum of band `below` over
// the path and the minimum of band `below`+1, when positive.
struct Gap {
  int below = 0;  // gap opens above this band index
  double bottom = 0.0;
  double top = 0.0;

  double width() const { return top - bottom; }
};

std::vector<Gap> detect_gaps(const Eigen::MatrixXd& kappa2);

}  // namespace pcfband

#endif  // PCFBAND_CONVERGENCE_HPP
