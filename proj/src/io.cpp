// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "pcfband/convergence.hpp"
#include "pcfband/corners.hpp"
#include "pcfband/diagnostics.hpp"
#include "pcfband/errors.hpp"

namespace pcfband {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

// Collects the files written by one run so they can be removed when the
// run fails partway.
class OutputTracker {
 public:
  explicit OutputTracker(const std::string& out_dir) : dir_(out_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + out_dir);
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open output file " + p.string());
    written_.push_back(p);
    return out;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void discard_all() {
    for (const fs::path& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

void write_header(std::ofstream& out, const std::string& subcommand,
                  const Config& cfg) {
  out << "# pcfband " << subcommand << "\n";
  out << "# seed: " << cfg.seed << "\n";
  out << "# units: lengths in lattice pitch, wavevectors and kappa in 1/pitch\n";
}

PermittivityMap map_of(const Config& cfg) {
  return PermittivityMap{cfg.partition, cfg.lattice};
}

}  // namespace

Config apply_overrides(Config cfg, const RunOptions& opts) {
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.tol > 0.0) cfg.tol = opts.tol;
  if (opts.seed_set) cfg.seed = opts.seed;
  return cfg;
}

int run_bands(const Config& cfg_in, const RunOptions& opts, std::ostream& log) {
  const Config cfg = apply_overrides(cfg_in, opts);
  OutputTracker out(cfg.out_dir);
  try {
    const TableSource source = polygon_table_source(map_of(cfg));
    const BandTable bt = band_sweep(source, cfg.lattice, cfg.kpath, cfg.beta,
                                    cfg.cutoff, cfg.bands, opts.threads);
    const std::vector<Gap> gaps = detect_gaps(bt.kappa2);

    std::ofstream bands = out.open("bands.csv");
    write_header(bands, "bands", cfg);
    bands << "k_index,arclength,xi_x,xi_y,band,kappa2\n";
    for (int k = 0; k < static_cast<int>(bt.samples.size()); ++k) {
      for (int b = 0; b < bt.kappa2.cols(); ++b) {
        bands << k << ',' << fmt(bt.samples[k].arclength) << ','
              << fmt(bt.samples[k].xi_folded.x()) << ','
              << fmt(bt.samples[k].xi_folded.y()) << ',' << b << ','
              << fmt(bt.kappa2(k, b)) << "\n";
      }
    }
    bands.close();

    std::ofstream gapcsv = out.open("gaps.csv");
    write_header(gapcsv, "bands (gap summary)", cfg);
    gapcsv << "gap_index,below_band,bottom,top,width\n";
    for (size_t i = 0; i < gaps.size(); ++i) {
      gapcsv << i << ',' << gaps[i].below << ',' << fmt(gaps[i].bottom) << ','
             << fmt(gaps[i].top) << ',' << fmt(gaps[i].width()) << "\n";
    }
    gapcsv.close();

    std::ofstream plot = out.open("bands.gp");
    plot << "# gnuplot script for bands.csv / gaps.csv\n"
         << "set datafile separator \",\"\n"
         << "set key off\n"
         << "set xlabel \"arclength along k-path (1/pitch)\"\n"
         << "set ylabel \"kappa^2\"\n"
         << "plot \"bands.csv\" using 2:6 with points pt 7 ps 0.4\n";
    plot.close();

    log << "bands: " << bt.samples.size() << " k-points, " << cfg.bands
        << " bands, cutoff " << cfg.cutoff << ", " << gaps.size()
        << " gap(s)\n";
    for (const Gap& g : gaps) {
      log << "  gap above band " << g.below << ": [" << fmt(g.bottom) << ", "
          << fmt(g.top) << "]\n";
    }
    return kExitOk;
  } catch (...) {
    out.discard_all();
    throw;
  }
}

int run_exponents(const Config& cfg_in, const RunOptions& opts,
                  std::ostream& log) {
  const Config cfg = apply_overrides(cfg_in, opts);
  OutputTracker out(cfg.out_dir);
  try {
    const std::vector<CornerSpec> corners =
        extract_corners(cfg.partition, cfg.lattice);

    struct Row {
      int corner;
      const CornerSpec* spec;
      SingularExponent e;
    };
    std::vector<Row> rows;
    double sigma = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < corners.size(); ++c) {
      std::vector<SingularExponent> det_roots = find_exponents(corners[c]);
      for (SingularExponent& e : det_roots) {
        e.corner_index = static_cast<int>(c);
        sigma = std::min(sigma, e.lambda);
        rows.push_back(Row{static_cast<int>(c), &corners[c], e});
      }
      if (corners[c].sector_count() == 2) {
        std::vector<SingularExponent> lamc_roots =
            solve_lamc(corners[c].sectors[0].opening, corners[c].sectors[0].n2,
                       corners[c].sectors[1].n2);
        if (lamc_roots.size() > 1) {
          log << "note: corner " << c << " yields " << lamc_roots.size()
              << " transcendental roots in (0,1); all reported\n";
        }
        for (SingularExponent& e : lamc_roots) {
          e.corner_index = static_cast<int>(c);
          rows.push_back(Row{static_cast<int>(c), &corners[c], e});
        }
      }
    }

    std::ofstream csv = out.open("exponents.csv");
    write_header(csv, "exponents", cfg);
    if (corners.empty()) {
      csv << "# sigma_epsilon: smooth (no interface corners)\n";
    } else if (!std::isfinite(sigma)) {
      csv << "# sigma_epsilon: smooth (no real exponent in (0,1))\n";
    } else {
      csv << "# sigma_epsilon: " << fmt(sigma) << "\n";
    }
    csv << "corner_index,x,y,sector_count,lambda,family,residual\n";
    for (const Row& r : rows) {
      csv << r.corner << ',' << fmt(r.spec->location.x()) << ','
          << fmt(r.spec->location.y()) << ',' << r.spec->sector_count() << ','
          << fmt(r.e.lambda) << ',' << r.e.family << ',' << fmt(r.e.residual)
          << "\n";
    }
    csv.close();

    if (corners.empty() || !std::isfinite(sigma)) {
      log << "exponents: no interface corners, sigma_epsilon = smooth\n";
    } else {
      log << "exponents: " << corners.size() << " corner(s), sigma_epsilon = "
          << fmt(sigma) << "\n";
    }
    return kExitOk;
  } catch (...) {
    out.discard_all();
    throw;
  }
}

int run_converge(const Config& cfg_in, const RunOptions& opts,
                 std::ostream& log) {
  const Config cfg = apply_overrides(cfg_in, opts);
  if (cfg.ladder.size() < 3) {
    throw ConfigError(ConfigError::Kind::Invariant, "ladder",
                      "converge needs a strictly increasing ladder of at "
                      "least 3 cutoffs");
  }
  OutputTracker out(cfg.out_dir);
  try {
    SweepPlan plan;
    plan.table = polygon_table_source(map_of(cfg));
    plan.lattice = cfg.lattice;
    for (const KSample& s : sample_kpath(cfg.kpath, cfg.lattice)) {
      plan.kpoints.push_back(BlochParams{s.xi_folded, cfg.beta});
    }
    plan.ladder = cfg.ladder;
    plan.bands = cfg.bands;
    plan.threads = opts.threads;
    const ConvergenceRecord rec = resolution_sweep(plan);

    std::ofstream csv = out.open("converge.csv");
    write_header(csv, "converge", cfg);
    csv << "k_index,band,N,dof,kappa2,error,p_hat_window\n";
    for (size_t k = 0; k < rec.traces.size(); ++k) {
      for (size_t b = 0; b < rec.traces[k].size(); ++b) {
        const BandTrace& tr = rec.traces[k][b];
        for (size_t r = 0; r < rec.ladder.size(); ++r) {
          csv << k << ',' << b << ',' << rec.ladder[r] << ','
              << static_cast<long long>(rec.dofs[r]) << ','
              << fmt(tr.kappa2[r]) << ',' << fmt(tr.errors[r]) << ','
              << fmt(tr.window_orders[r]) << "\n";
        }
      }
    }
    csv.close();

    for (size_t k = 0; k < rec.traces.size(); ++k) {
      for (size_t b = 0; b < rec.traces[k].size(); ++b) {
        log << "k " << k << " band " << b << ": p_hat = "
            << fmt(rec.traces[k][b].fit.p_hat) << " (reference "
            << fmt(rec.traces[k][b].reference) << ")\n";
      }
    }
    return kExitOk;
  } catch (...) {
    out.discard_all();
    throw;
  }
}

int run_field(const Config& cfg_in, const RunOptions& opts, std::ostream& log) {
  const Config cfg = apply_overrides(cfg_in, opts);
  OutputTracker out(cfg.out_dir);
  try {
    const std::vector<KSample> samples = sample_kpath(cfg.kpath, cfg.lattice);
    if (cfg.field.k_index >= static_cast<int>(samples.size())) {
      throw ConfigError(ConfigError::Kind::Invariant, "field.k_index",
                        "beyond the sampled k-path");
    }
    const BlochParams bloch{samples[cfg.field.k_index].xi_folded, cfg.beta};
    const PlanewaveBasis basis(bloch, cfg.lattice, cfg.cutoff);
    const int skip = 2 * basis.zero_mode_count();
    const int nev = std::min(skip + cfg.field.band + 1, basis.dim());
    if (nev < skip + cfg.field.band + 1) {
      throw ConfigError(ConfigError::Kind::Invariant, "field.band",
                        "beyond the basis dimension");
    }
    const PermittivityMap map = map_of(cfg);
    const FourierTable table = eta_fourier_polygon(map, cfg.cutoff);
    const EigenSolution sol =
        eigensolve(assemble(basis, table), basis, nev, cfg.tol);
    const int band = skip + cfg.field.band;

    const FieldGrid h = reconstruct_h(sol, band, cfg.field.grid);
    const FieldGrid e = recover_e(map, sol, band, cfg.field.grid);

    std::ofstream csv = out.open("field.csv");
    write_header(csv, "field", cfg);
    csv << "# k_index: " << cfg.field.k_index << ", band: " << cfg.field.band
        << ", kappa2: " << fmt(sol.kappa2(band)) << ", beta: " << fmt(cfg.beta)
        << "\n";
    csv << "x,y,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz,re_ex,im_ex,re_ey,im_ey,"
           "re_ez,im_ez\n";
    for (size_t i = 0; i < h.points.size(); ++i) {
      csv << fmt(h.points[i].x()) << ',' << fmt(h.points[i].y());
      for (int d = 0; d < 3; ++d) {
        csv << ',' << fmt(h.values[i](d).real()) << ','
            << fmt(h.values[i](d).imag());
      }
      for (int d = 0; d < 3; ++d) {
        csv << ',' << fmt(e.values[i](d).real()) << ','
            << fmt(e.values[i](d).imag());
      }
      csv << "\n";
    }
    csv.close();

    log << "field: k " << cfg.field.k_index << " band " << cfg.field.band
        << " kappa2 " << fmt(sol.kappa2(band)) << " on " << cfg.field.grid
        << "x" << cfg.field.grid << " grid\n";
    return kExitOk;
  } catch (...) {
    out.discard_all();
    throw;
  }
}

namespace {

struct CheckRow {
  std::string name;
  bool pass;
  std::string detail;
};

class ValidateSuite {
 public:
  explicit ValidateSuite(const Config& cfg)
      : cfg_(cfg), map_{cfg.partition, cfg.lattice}, rng_(cfg.seed) {}

  std::vector<CheckRow> run() {
    check_biorthogonality();
    check_fold_idempotence();
    check_corners();
    check_fourier_table();
    check_translation_covariance();
    check_grid_oracle();
    check_operator_structure();
    check_identity_suite();
    check_garding_suite();
    check_eigenfields();
    check_time_reversal();
    check_nesting();
    return rows_;
  }

 private:
  void add(const std::string& name, bool pass, const std::string& detail) {
    rows_.push_back(CheckRow{name, pass, detail});
  }

  double urand(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  BlochParams random_bloch() {
    const ReciprocalLattice2D rec = reciprocal_lattice(cfg_.lattice);
    const Vec2 xi = urand(-0.5, 0.5) * rec.b1 + urand(-0.5, 0.5) * rec.b2;
    return BlochParams{xi, urand(-2.0, 2.0)};
  }

  void check_biorthogonality() {
    double worst = 0.0;
    auto defect = [](const Lattice2D& lat) {
      const ReciprocalLattice2D rec = reciprocal_lattice(lat);
      const double two_pi = 2.0 * std::numbers::pi;
      double d = 0.0;
      d = std::max(d, std::abs(lat.a1.dot(rec.b1) - two_pi));
      d = std::max(d, std::abs(lat.a2.dot(rec.b2) - two_pi));
      d = std::max(d, std::abs(lat.a1.dot(rec.b2)));
      d = std::max(d, std::abs(lat.a2.dot(rec.b1)));
      return d;
    };
    worst = defect(cfg_.lattice);
    for (int i = 0; i < 20; ++i) {
      Lattice2D lat{Vec2(urand(-2, 2), urand(-2, 2)),
                    Vec2(urand(-2, 2), urand(-2, 2))};
      if (std::abs(lat.det()) < 1e-3) continue;
      worst = std::max(worst, defect(lat));
    }
    add("reciprocal biorthogonality", worst < 1e-12, "max defect " + fmt(worst));
  }

  void check_fold_idempotence() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vec2 xi = random_bloch().xi;
      const Vec2 once = fold_to_bz(cfg_.lattice, xi);
      const Vec2 twice = fold_to_bz(cfg_.lattice, once);
      worst = std::max(worst, (once - twice).norm());
      if (!in_brillouin_zone(cfg_.lattice, once)) worst = 1.0;
    }
    add("Brillouin-zone folding idempotence", worst < 1e-12,
        "max drift " + fmt(worst));
  }

  void check_corners() {
    const std::vector<CornerSpec> corners =
        extract_corners(cfg_.partition, cfg_.lattice);
    double worst = 0.0;
    for (const CornerSpec& c : corners) {
      double total = 0.0;
      for (const CornerSector& s : c.sectors) total += s.opening;
      worst = std::max(worst, std::abs(total - 2.0 * std::numbers::pi));
    }
    add("corner sector angles sum to 2 pi", worst < 1e-10,
        std::to_string(corners.size()) + " corner(s), max defect " + fmt(worst));
  }

  void check_fourier_table() {
    const int n = std::min(cfg_.cutoff, 6);
    const FourierTable tab = eta_fourier_polygon(map_, n);
    double sym = 0.0;
    double parseval = 0.0;
    for (int m1 = -tab.range(); m1 <= tab.range(); ++m1) {
      for (int m2 = -tab.range(); m2 <= tab.range(); ++m2) {
        sym = std::max(conj_defect(tab, m1, m2), sym);
        parseval += std::norm(tab.coeff(m1, m2));
      }
    }
    const double lo = 1.0 / n2_max(map_);
    const double hi = 1.0 / n2_min(map_);
    const double avg = tab.coeff(0, 0).real();
    bool pass = sym < 1e-12 && avg >= lo - 1e-12 && avg <= hi + 1e-12;
    // Bessel bound: the coefficient power never exceeds the mean of eta^2.
    const double bound = hi * hi + 1e-12;
    pass = pass && parseval <= bound;
    add("eta_hat conjugate symmetry / average bounds", pass,
        "sym " + fmt(sym) + ", eta_hat(0) " + fmt(avg));
  }

  double conj_defect(const FourierTable& tab, int m1, int m2) {
    return std::abs(tab.coeff(m1, m2) - std::conj(tab.coeff(-m1, -m2)));
  }

  void check_translation_covariance() {
    if (cfg_.partition.regions.empty()) {
      add("translation covariance", true, "homogeneous, trivial");
      return;
    }
    const Vec2 t(urand(-0.3, 0.3), urand(-0.3, 0.3));
    PermittivityMap shifted = map_;
    for (Region& r : shifted.partition.regions) {
      for (Vec2& v : r.polygon) v += t;
    }
    const int n = std::min(cfg_.cutoff, 4);
    const FourierTable a = eta_fourier_polygon(map_, n);
    const FourierTable b = eta_fourier_polygon(shifted, n);
    double worst = 0.0;
    for (int m1 = -a.range(); m1 <= a.range(); ++m1) {
      for (int m2 = -a.range(); m2 <= a.range(); ++m2) {
        const Vec2 g = a.gvec(m1, m2);
        const Complex phase = std::exp(Complex(0.0, -g.dot(t)));
        worst = std::max(worst,
                         std::abs(b.coeff(m1, m2) - phase * a.coeff(m1, m2)));
      }
    }
    add("translation covariance of eta_hat", worst < 1e-10,
        "max defect " + fmt(worst));
  }

  void check_grid_oracle() {
    const int n = std::min(cfg_.cutoff, 4);
    const int m = std::max(8 * (2 * n + 1), 256);
    const FourierTable exact = eta_fourier_polygon(map_, n);
    const FourierTable grid = eta_fourier_grid(map_, m, n);
    double worst = 0.0;
    for (int m1 = -exact.range(); m1 <= exact.range(); ++m1) {
      for (int m2 = -exact.range(); m2 <= exact.range(); ++m2) {
        worst = std::max(worst,
                         std::abs(exact.coeff(m1, m2) - grid.coeff(m1, m2)));
      }
    }
    add("polygon transform matches grid oracle", worst < 5e-3,
        "max difference " + fmt(worst) + " at grid " + std::to_string(m));
  }

  void check_operator_structure() {
    const int n = std::min(cfg_.cutoff, 8);
    const FourierTable tab = eta_fourier_polygon(map_, n);
    const std::vector<KSample> samples = sample_kpath(cfg_.kpath, cfg_.lattice);
    double herm = 0.0, min_eig = 0.0;
    const int count = std::min<int>(3, static_cast<int>(samples.size()));
    for (int i = 0; i < count; ++i) {
      const KSample& s = samples[i * (samples.size() - 1) /
                                 std::max<size_t>(1, count - 1)];
      const PlanewaveBasis basis({s.xi_folded, cfg_.beta}, cfg_.lattice, n);
      const OperatorMatrix a = assemble(basis, tab);
      herm = std::max(herm, hermiticity_defect(a));
      min_eig = std::min(min_eig, eigenvalues_only(a, 1)(0));
    }
    add("assembled operator Hermitian and PSD", herm < 1e-12 && min_eig > -1e-10,
        "hermiticity " + fmt(herm) + ", min eigenvalue " + fmt(min_eig));
  }

  void check_identity_suite() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const TrigField v = random_field(random_bloch(), cfg_.lattice, 4,
                                       cfg_.seed + 1000 + i);
      const IdentityCheck c = check_identity(v);
      worst = std::max(worst, c.gap / std::max(c.rhs, 1e-300));
    }
    add("curl-div identity on 100 random fields", worst < 1e-12,
        "max relative gap " + fmt(worst));
  }

  void check_garding_suite() {
    const int n = 4;
    const FourierTable tab = eta_fourier_polygon(map_, n);
    const double n_inf = std::sqrt(n2_max(map_));
    double min_slack = std::numeric_limits<double>::infinity();
    double min_slack2 = min_slack;
    bool form_ok = true;
    for (int i = 0; i < 100; ++i) {
      const TrigField v = random_field(random_bloch(), cfg_.lattice, n,
                                       cfg_.seed + 2000 + i);
      const GardingCheck c = check_garding(v, tab, n_inf);
      min_slack = std::min(min_slack, c.slack / std::max(1.0, std::abs(c.lhs)));
      min_slack2 = std::min(min_slack2, c.slack2 / std::max(1.0, std::abs(c.lhs)));
      form_ok = form_ok && c.form_value > -1e-10;
    }
    add("Garding inequality on 100 random fields",
        min_slack >= -1e-10 && min_slack2 >= -1e-10 && form_ok,
        "min slack " + fmt(min_slack) + ", min slack2 " + fmt(min_slack2));
  }

  void check_eigenfields() {
    const int n = std::min(cfg_.cutoff, 6);
    const FourierTable tab = eta_fourier_polygon(map_, n);
    const BlochParams bloch = random_bloch();
    const PlanewaveBasis basis(bloch, cfg_.lattice, n);
    const int nev = std::min(basis.dim(), cfg_.bands + 2 * basis.zero_mode_count());
    const EigenSolution sol =
        eigensolve(assemble(basis, tab), basis, nev, cfg_.tol);
    double worst = 0.0;
    for (int b = 0; b < sol.num_bands(); ++b) {
      worst = std::max(worst, divergence_residual(sol, b));
    }
    add("eigenfield divergence residual", worst < 1e-12,
        "max residual " + fmt(worst));
  }

  void check_time_reversal() {
    const int n = std::min(cfg_.cutoff, 6);
    const FourierTable tab = eta_fourier_polygon(map_, n);
    const BlochParams bloch = random_bloch();
    const PlanewaveBasis bp(bloch, cfg_.lattice, n);
    const PlanewaveBasis bm({-bloch.xi, bloch.beta}, cfg_.lattice, n);
    const int nev = std::min(bp.dim(), 8);
    const Eigen::VectorXd vp = eigenvalues_only(assemble(bp, tab), nev);
    const Eigen::VectorXd vm = eigenvalues_only(assemble(bm, tab), nev);
    const double worst = (vp - vm).cwiseAbs().maxCoeff();
    add("time-reversal symmetry of the spectrum", worst < 1e-9,
        "max eigenvalue shift " + fmt(worst));
  }

  void check_nesting() {
    const int n = std::min(cfg_.cutoff, 6);
    const FourierTable tab = eta_fourier_polygon(map_, n + 1);
    const BlochParams bloch = random_bloch();
    const PlanewaveBasis coarse(bloch, cfg_.lattice, n);
    const PlanewaveBasis fine(bloch, cfg_.lattice, n + 1);
    const int nev = std::min(coarse.dim(), 5);
    const Eigen::VectorXd vc = eigenvalues_only(assemble(coarse, tab), nev);
    const Eigen::VectorXd vf = eigenvalues_only(assemble(fine, tab), nev);
    double worst = 0.0;
    for (int i = 0; i < nev; ++i) worst = std::max(worst, vf(i) - vc(i));
    add("nested-basis eigenvalue monotonicity", worst < 1e-9,
        "max increase " + fmt(worst));
  }

  const Config& cfg_;
  PermittivityMap map_;
  std::mt19937_64 rng_;
  std::vector<CheckRow> rows_;
};

}  // namespace

int run_validate(const Config& cfg_in, const RunOptions& opts,
                 std::ostream& log) {
  const Config cfg = apply_overrides(cfg_in, opts);
  OutputTracker out(cfg.out_dir);
  try {
    ValidateSuite suite(cfg);
    const std::vector<CheckRow> rows = suite.run();

    std::ofstream txt = out.open("validate.txt");
    txt << "# pcfband validate\n# seed: " << cfg.seed << "\n";
    bool all_pass = true;
    for (const CheckRow& r : rows) {
      const std::string line = std::string(r.pass ? "PASS" : "FAIL") + "  " +
                               r.name + "  (" + r.detail + ")";
      txt << line << "\n";
      log << line << "\n";
      all_pass = all_pass && r.pass;
    }
    txt << (all_pass ? "all checks passed\n" : "some checks FAILED\n");
    txt.close();
    log << (all_pass ? "all checks passed\n" : "some checks FAILED\n");
    return all_pass ? kExitOk : kExitValidationFailure;
  } catch (...) {
    out.discard_all();
    throw;
  }
}

}  // namespace pcfband
