// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "pcfband/errors.hpp"

namespace pcfband {

namespace {

constexpr double kNoiseFloor = 1e-13;

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next(0);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Lowest nbands eigenvalues with flagged zero modes dropped.
Eigen::VectorXd sweep_eigenvalues(const TableSource& table, const Lattice2D& lat,
                                  const BlochParams& bloch, int cutoff,
                                  int nbands) {
  const PlanewaveBasis basis(bloch, lat, cutoff);
  const int skip = 2 * basis.zero_mode_count();
  const int want = std::min(nbands + skip, basis.dim());
  const OperatorMatrix a = assemble(basis, table(cutoff));
  const Eigen::VectorXd vals = eigenvalues_only(a, want);
  return vals.segment(skip, want - skip);
}

}  // namespace

TableSource polygon_table_source(PermittivityMap map) {
  return [map = std::move(map)](int cutoff) {
    return eta_fourier_polygon(map, cutoff);
  };
}

OrderFit estimate_order(const std::vector<double>& errors,
                        const std::vector<double>& dofs) {
  if (errors.size() != dofs.size()) throw Error("errors/dofs length mismatch");
  OrderFit fit;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] <= kNoiseFloor) {
      fit.excluded.push_back(static_cast<int>(i));
      continue;
    }
    lx.push_back(std::log(dofs[i]));
    ly.push_back(std::log(errors[i]));
  }
  const size_t n = lx.size();
  if (n < 2) return fit;  // p_hat = 0, everything at the floor

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return fit;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  fit.p_hat = -slope;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (slope * lx[i] + intercept);
    ss += r * r;
  }
  fit.fit_residual = std::sqrt(ss / n);
  return fit;
}

double richardson_reference(const std::vector<double>& values,
                            const std::vector<double>& dofs) {
  const size_t m = values.size();
  if (m < 2) throw Error("reference needs at least two rungs");
  const double v3 = values[m - 1];
  const double d2 = values[m - 2] - v3;
  const double floor = std::max(kNoiseFloor, 8e-16 * std::abs(v3));
  if (m < 3) return v3;  // no order estimate possible, use the finest rung
  const double d1 = values[m - 3] - values[m - 2];
  if (d2 <= floor || d1 <= d2) return v3;  // converged or not contracting

  // Decay order from the three finest rungs: solve
  // (D1^-p - D2^-p) / (D2^-p - D3^-p) = d1/d2 for p, then extrapolate the
  // two finest.
  const double target = d1 / d2;
  const double da = dofs[m - 3], db = dofs[m - 2], dc = dofs[m - 1];
  auto g = [&](double p) {
    const double fa = std::pow(da, -p), fb = std::pow(db, -p),
                 fc = std::pow(dc, -p);
    return (fa - fb) / (fb - fc) - target;
  };
  double lo = 1e-3, hi = 40.0;
  if (g(lo) * g(hi) < 0.0) {
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(lo) * g(mid) <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double p = 0.5 * (lo + hi);
    return v3 - d2 / (std::pow(dc / db, p) - 1.0);
  }
  // Geometric (Aitken) fallback when no power law brackets the ratio.
  return v3 - d2 * d2 / (d1 - d2);
}

ConvergenceRecord resolution_sweep(const SweepPlan& plan) {
  if (plan.kpoints.empty()) throw Error("sweep needs at least one k-point");
  if (plan.bands < 1) throw Error("sweep needs at least one band");
  if (plan.ladder.size() < 3) throw Error("ladder needs at least 3 rungs");
  for (size_t i = 1; i < plan.ladder.size(); ++i) {
    if (plan.ladder[i] <= plan.ladder[i - 1]) {
      throw Error("ladder must be strictly increasing");
    }
  }

  const int nk = static_cast<int>(plan.kpoints.size());
  const int nr = static_cast<int>(plan.ladder.size());

  ConvergenceRecord rec;
  rec.ladder = plan.ladder;
  rec.kpoints = plan.kpoints;
  for (int n : plan.ladder) {
    rec.dofs.push_back(2.0 * (2 * n + 1) * (2 * n + 1));
  }

  // Tables are shared across k-points; build them once.
  std::vector<FourierTable> tables;
  tables.reserve(nr);
  for (int n : plan.ladder) tables.push_back(plan.table(n));

  std::vector<std::vector<Eigen::VectorXd>> values(
      nk, std::vector<Eigen::VectorXd>(nr));
  std::vector<std::pair<int, int>> jobs;
  for (int k = 0; k < nk; ++k) {
    for (int r = nr - 1; r >= 0; --r) jobs.emplace_back(k, r);
  }
  parallel_for(static_cast<int>(jobs.size()), plan.threads, [&](int j) {
    const auto [k, r] = jobs[j];
    try {
      const PlanewaveBasis basis(plan.kpoints[k], plan.lattice, plan.ladder[r]);
      const int skip = 2 * basis.zero_mode_count();
      const int want = std::min(plan.bands + skip, basis.dim());
      const OperatorMatrix a = assemble(basis, tables[r]);
      const Eigen::VectorXd vals = eigenvalues_only(a, want);
      values[k][r] = vals.segment(skip, want - skip);
    } catch (const Error& e) {
      throw Error("k-point " + std::to_string(k) + ", cutoff " +
                  std::to_string(plan.ladder[r]) + ": " + e.what());
    }
  });

  rec.traces.assign(nk, {});
  for (int k = 0; k < nk; ++k) {
    rec.traces[k].assign(plan.bands, BandTrace{});
    for (int b = 0; b < plan.bands; ++b) {
      BandTrace& tr = rec.traces[k][b];
      tr.kappa2.resize(nr);
      for (int r = 0; r < nr; ++r) {
        if (b >= values[k][r].size()) {
          throw Error("band index exceeds computed spectrum");
        }
        tr.kappa2[r] = values[k][r](b);
      }
      tr.reference = richardson_reference(tr.kappa2, rec.dofs);
      tr.errors.resize(nr);
      for (int r = 0; r < nr; ++r) tr.errors[r] = tr.kappa2[r] - tr.reference;
      tr.fit = estimate_order(tr.errors, rec.dofs);
      tr.window_orders.assign(nr, std::numeric_limits<double>::quiet_NaN());
      for (int r = 2; r < nr; ++r) {
        const std::vector<double> we(tr.errors.begin() + r - 2,
                                     tr.errors.begin() + r + 1);
        const std::vector<double> wd(rec.dofs.begin() + r - 2,
                                     rec.dofs.begin() + r + 1);
        const OrderFit wf = estimate_order(we, wd);
        if (wf.excluded.empty()) tr.window_orders[r] = wf.p_hat;
      }
    }
  }
  return rec;
}

BandTable band_sweep(const TableSource& table, const Lattice2D& lat,
                     const KPath& path, double beta, int cutoff, int nbands,
                     int threads) {
  if (nbands < 1) throw Error("nbands must be at least 1");
  BandTable bt;
  bt.samples = sample_kpath(path, lat);
  bt.beta = beta;
  bt.cutoff = cutoff;
  const int nk = static_cast<int>(bt.samples.size());
  bt.kappa2.resize(nk, nbands);
  const FourierTable tab = table(cutoff);
  const TableSource fixed = [&tab](int) { return tab; };
  parallel_for(nk, threads, [&](int k) {
    const BlochParams bloch{bt.samples[k].xi_folded, beta};
    const Eigen::VectorXd vals =
        sweep_eigenvalues(fixed, lat, bloch, cutoff, nbands);
    if (vals.size() < nbands) {
      throw Error("basis too small for requested band count");
    }
    bt.kappa2.row(k) = vals.head(nbands).transpose();
  });
  return bt;
}

std::vector<Gap> detect_gaps(const Eigen::MatrixXd& kappa2) {
  std::vector<Gap> gaps;
  for (int b = 0; b + 1 < kappa2.cols(); ++b) {
    const double top_of_lower = kappa2.col(b).maxCoeff();
    const double bottom_of_upper = kappa2.col(b + 1).minCoeff();
    if (bottom_of_upper > top_of_lower) {
      gaps.push_back(Gap{b, top_of_lower, bottom_of_upper});
    }
  }
  return gaps;
}

}  // namespace pcfband
