// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion. Usage:
//   acceptance [path-to-pcfband-binary]
// The binary path is needed only for the CLI determinism criterion; when
// omitted that criterion is reported as FAIL with an explanation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pcfband/convergence.hpp"
#include "pcfband/corners.hpp"
#include "pcfband/diagnostics.hpp"
#include "pcfband/errors.hpp"

namespace fs = std::filesystem;
using namespace pcfband;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Lattice2D unit_lattice() { return Lattice2D{Vec2(1, 0), Vec2(0, 1)}; }

PermittivityMap homogeneous(double n2) {
  PermittivityMap map;
  map.lattice = unit_lattice();
  map.partition.background_n2 = n2;
  return map;
}

PermittivityMap square_rod_map() {
  PermittivityMap map = homogeneous(1.0);
  Region r;
  r.polygon = {Vec2(-0.2, -0.2), Vec2(0.2, -0.2), Vec2(0.2, 0.2),
               Vec2(-0.2, 0.2)};
  r.n2 = 13.0;
  map.partition.regions = {r};
  return map;
}

BlochParams random_bloch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  std::uniform_real_distribution<double> betas(-2.0, 2.0);
  const ReciprocalLattice2D rec = reciprocal_lattice(unit_lattice());
  return BlochParams{half(rng) * rec.b1 + half(rng) * rec.b2, betas(rng)};
}

// Smooth eta as a trigonometric polynomial injected directly as a table.
TableSource smooth_table_source() {
  const ReciprocalLattice2D rec = reciprocal_lattice(unit_lattice());
  return [rec](int cutoff) {
    FourierTable t(cutoff, rec);
    t.set_pair(0, 0, Complex(0.5, 0.0));
    if (t.range() >= 1) {
      t.set_pair(1, 0, Complex(0.08, 0.0));
      t.set_pair(0, 1, Complex(0.08, 0.0));
    }
    if (t.range() >= 2) {
      t.set_pair(1, 1, Complex(0.02, 0.0));
      t.set_pair(1, -1, Complex(0.02, 0.0));
    }
    return t;
  };
}

// 1. Homogeneous exactness.
Outcome criterion_homogeneous() {
  const auto t0 = std::chrono::steady_clock::now();
  const double n2 = 2.1;
  const PermittivityMap map = homogeneous(n2);
  const FourierTable table = eta_fourier_polygon(map, 4);
  const ReciprocalLattice2D rec = reciprocal_lattice(map.lattice);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const BlochParams bloch = random_bloch(rng);
    const PlanewaveBasis basis(bloch, map.lattice, 4);
    const Eigen::VectorXd vals = eigenvalues_only(assemble(basis, table), 10);
    std::vector<double> exact;
    for (int m1 = -4; m1 <= 4; ++m1) {
      for (int m2 = -4; m2 <= 4; ++m2) {
        const Vec2 g = m1 * rec.b1 + m2 * rec.b2;
        const double k2 =
            (bloch.xi + g).squaredNorm() + bloch.beta * bloch.beta;
        exact.push_back(k2 / n2);
        exact.push_back(k2 / n2);
      }
    }
    std::sort(exact.begin(), exact.end());
    for (int i = 0; i < 10; ++i) {
      worst = std::max(worst,
                       std::abs(vals(i) - exact[i]) / std::max(exact[i], 1e-30));
    }
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max relative error %.2e, %.2f s", worst, dt);
  return Outcome{worst < 1e-8 && dt < 5.0, buf};
}

// 2. Curl-div identity.
Outcome criterion_identity() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const TrigField v = random_field(random_bloch(rng), unit_lattice(), 4,
                                     5000 + i);
    const IdentityCheck c = check_identity(v);
    worst = std::max(worst, c.gap / std::max(c.rhs, 1e-300));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "max relative gap %.2e over 100 fields", worst);
  return Outcome{worst < 1e-12, buf};
}

// 3. Garding inequality with the beta^2-strengthened variant.
Outcome criterion_garding() {
  const PermittivityMap map = square_rod_map();
  const FourierTable table = eta_fourier_polygon(map, 4);
  const double n_inf = std::sqrt(n2_max(map));
  std::mt19937_64 rng(303);
  double min_slack = 1e300, min_slack2 = 1e300;
  for (int i = 0; i < 100; ++i) {
    const TrigField v = random_field(random_bloch(rng), map.lattice, 4,
                                     6000 + i);
    const GardingCheck c = check_garding(v, table, n_inf);
    const double scale = 1.0 + std::abs(c.lhs);
    min_slack = std::min(min_slack, c.slack / scale);
    min_slack2 = std::min(min_slack2, c.slack2 / scale);
  }
  char buf[140];
  std::snprintf(buf, sizeof(buf), "min slack %.2e, min beta-variant slack %.2e",
                min_slack, min_slack2);
  return Outcome{min_slack >= -1e-10 && min_slack2 >= -1e-10, buf};
}

// 4. Gauge and structure of assembled operators and eigenfields.
Outcome criterion_structure() {
  const PermittivityMap rod = square_rod_map();
  const FourierTable rod_table = eta_fourier_polygon(rod, 6);
  const FourierTable hom_table = eta_fourier_polygon(homogeneous(2.1), 6);
  const std::vector<BlochParams> kpts = {
      {Vec2(0, 0), 1.0}, {Vec2(kPi, 0), 1.0}, {Vec2(kPi, kPi), 1.0},
      {Vec2(0.37, -0.81), 0.45}};
  double herm = 0.0, min_eig = 1e300, div = 0.0;
  for (const BlochParams& bloch : kpts) {
    for (const FourierTable* table : {&rod_table, &hom_table}) {
      const PlanewaveBasis basis(bloch, unit_lattice(), 6);
      const OperatorMatrix a = assemble(basis, *table);
      herm = std::max(herm, hermiticity_defect(a));
      const EigenSolution sol = eigensolve(a, basis, 8, 1e-9);
      min_eig = std::min(min_eig, sol.kappa2(0));
      for (int b = 0; b < sol.num_bands(); ++b) {
        div = std::max(div, divergence_residual(sol, b));
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "hermiticity %.2e, min eigenvalue %.2e, max divergence %.2e",
                herm, min_eig, div);
  return Outcome{herm < 1e-12 && min_eig > -1e-10 && div < 1e-12, buf};
}

// 5. Exponent cross-validation over the angle/contrast grid.
Outcome criterion_exponent_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> angle_sixths = {1, 2, 3, 4, 5, 8, 11};
  const std::vector<double> ratios = {1.5, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
  double worst_gap = 0.0;
  bool in_bounds = true;
  int count = 0;
  for (int k : angle_sixths) {
    const double omega = k * kPi / 6.0;
    for (double ratio : ratios) {
      const auto lamc = solve_lamc(omega, ratio, 1.0);
      CornerSpec c;
      c.sectors = {CornerSector{omega, ratio},
                   CornerSector{2 * kPi - omega, 1.0}};
      const auto det = find_exponents(c);
      if (lamc.empty() || det.empty()) {
        return Outcome{false, "missing root at omega=" + std::to_string(omega) +
                                  " ratio=" + std::to_string(ratio)};
      }
      worst_gap = std::max(worst_gap,
                           std::abs(lamc.front().lambda - det.front().lambda));
      for (const SingularExponent& e : lamc) {
        in_bounds = in_bounds && e.lambda > 0.5 && e.lambda < 1.0;
      }
      ++count;
    }
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d corners, max method gap %.2e, bounds %s, %.2f s", count,
                worst_gap, in_bounds ? "ok" : "violated", dt);
  return Outcome{worst_gap < 1e-10 && in_bounds && dt < 2.0, buf};
}

// 6. Limit behavior: vanishing contrast and the alternating cross point.
Outcome criterion_limits() {
  const auto weak = solve_lamc(kPi / 2, 1.0 + 1e-9, 1.0);
  bool no_low_root = true;
  for (const SingularExponent& e : weak) {
    no_low_root = no_low_root && e.lambda > 1.0 - 1e-6;
  }
  CornerSpec cross;
  cross.sectors = {CornerSector{kPi / 2, 1.0}, CornerSector{kPi / 2, 50.0},
                   CornerSector{kPi / 2, 1.0}, CornerSector{kPi / 2, 50.0}};
  const auto roots = find_exponents(cross);
  const bool strong = !roots.empty() && roots.front().lambda < 0.5;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "vanishing contrast roots below 1-1e-6: %s; cross-point root %s",
                no_low_root ? "none" : "present",
                roots.empty() ? "missing"
                              : std::to_string(roots.front().lambda).c_str());
  return Outcome{no_low_root && strong, buf};
}

// 7. Monotone Galerkin convergence on the resolution ladder.
Outcome criterion_monotone() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepPlan plan;
  plan.table = polygon_table_source(square_rod_map());
  plan.lattice = unit_lattice();
  plan.kpoints = {BlochParams{Vec2(0, 0), 1.0}, BlochParams{Vec2(kPi, 0), 1.0},
                  BlochParams{Vec2(kPi, kPi), 1.0}};
  plan.ladder = {4, 6, 8, 12, 16};
  plan.bands = 5;
  const ConvergenceRecord rec = resolution_sweep(plan);
  bool monotone = true, decreasing = true;
  for (const auto& ktraces : rec.traces) {
    for (const BandTrace& tr : ktraces) {
      for (size_t r = 1; r < tr.kappa2.size(); ++r) {
        monotone = monotone && tr.kappa2[r] <= tr.kappa2[r - 1] + 1e-9;
      }
      for (size_t r = 1; r < tr.errors.size(); ++r) {
        decreasing = decreasing && tr.errors[r] < tr.errors[r - 1];
      }
    }
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "monotone %s, errors strictly decreasing %s, %.1f s",
                monotone ? "yes" : "no", decreasing ? "yes" : "no", dt);
  return Outcome{monotone && decreasing && dt < 120.0, buf};
}

// 8. Regularity signature: super-algebraic vs algebraic windowed orders.
Outcome criterion_regularity_signature() {
  SweepPlan smooth;
  smooth.table = smooth_table_source();
  smooth.lattice = unit_lattice();
  smooth.kpoints = {BlochParams{Vec2(kPi, 0), 1.0}};
  smooth.ladder = {2, 3, 4, 6, 8};
  smooth.bands = 1;
  const ConvergenceRecord rs = resolution_sweep(smooth);

  SweepPlan rough = smooth;
  rough.table = polygon_table_source(square_rod_map());
  rough.ladder = {4, 6, 8, 12, 16};
  const ConvergenceRecord rr = resolution_sweep(rough);

  std::vector<double> smooth_windows, rough_windows;
  for (double w : rs.traces[0][0].window_orders) {
    if (std::isfinite(w)) smooth_windows.push_back(w);
  }
  for (double w : rr.traces[0][0].window_orders) {
    if (std::isfinite(w)) rough_windows.push_back(w);
  }
  if (smooth_windows.size() < 2 || rough_windows.size() < 2) {
    return Outcome{false, "not enough finite windowed orders"};
  }
  bool smooth_increasing = true;
  for (size_t i = 1; i < smooth_windows.size(); ++i) {
    smooth_increasing = smooth_increasing &&
                        smooth_windows[i] > smooth_windows[i - 1];
  }
  const double sfinal = smooth_windows.back();
  const double rfinal = rough_windows.back();
  const double rprev = rough_windows[rough_windows.size() - 2];
  const bool rough_stable = std::abs(rfinal - rprev) < 0.5 * std::abs(rfinal);
  const bool ordered = sfinal >= rfinal + 1.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "smooth windows %.2f..%.2f (increasing %s), rough final %.2f "
                "(stable %s), separation %.2f",
                smooth_windows.front(), sfinal,
                smooth_increasing ? "yes" : "no", rfinal,
                rough_stable ? "yes" : "no", sfinal - rfinal);
  return Outcome{smooth_increasing && rough_stable && ordered, buf};
}

// 9. Maxwell system closure: Faraday residual and reg4 decrease.
Outcome criterion_maxwell_closure() {
  const PermittivityMap map = square_rod_map();
  const BlochParams bloch{Vec2(kPi, 0), 1.0};
  double worst_faraday = 0.0;
  std::vector<Reg4Residuals> res;
  for (int n : {4, 8, 16}) {
    const PlanewaveBasis basis(bloch, map.lattice, n);
    const FourierTable table = eta_fourier_polygon(map, n);
    const EigenSolution sol =
        eigensolve(assemble(basis, table), basis, 5, 1e-9);
    for (int b = 0; b < sol.num_bands(); ++b) {
      if (sol.kappa2(b) <= 1e-8) continue;
      worst_faraday =
          std::max(worst_faraday, faraday_residual(sol, b, table));
    }
    res.push_back(reg4_residuals(map, sol, 0, 24));
  }
  bool decreasing = true;
  for (size_t i = 1; i < res.size(); ++i) {
    decreasing = decreasing && res[i].ra <= 1.1 * res[i - 1].ra &&
                 res[i].rb <= 1.1 * res[i - 1].rb &&
                 res[i].rc <= 1.1 * res[i - 1].rc;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "max Faraday residual %.2e; reg4 (ra,rb,rc) at N=16: "
                "(%.2e, %.2e, %.2e), decreasing %s",
                worst_faraday, res.back().ra, res.back().rb, res.back().rc,
                decreasing ? "yes" : "no");
  return Outcome{worst_faraday < 1e-8 && decreasing, buf};
}

// 10. Byte-identical CLI outputs across repeated runs.
Outcome criterion_determinism(const std::string& binary) {
  if (binary.empty()) {
    return Outcome{false, "pcfband binary path not supplied"};
  }
  const fs::path dir = fs::temp_directory_path() / "pcfband_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "rod.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
  "lattice": {"a1": [1, 0], "a2": [0, 1]},
  "background_n2": 1.0,
  "regions": [
    {"polygon": [[-0.2, -0.2], [0.2, -0.2], [0.2, 0.2], [-0.2, 0.2]], "n2": 13.0}
  ],
  "beta": 1.0,
  "kpath": {
    "vertices": [{"label": "G", "xi": [0, 0]},
                 {"label": "X", "xi": [3.141592653589793, 0]},
                 {"label": "M", "xi": [3.141592653589793, 3.141592653589793]}],
    "samples_per_segment": 3
  },
  "cutoff": 6,
  "bands": 4,
  "seed": 20260809
})";
  }
  auto run_once = [&](const std::string& out) {
    const std::string cmd = "\"" + binary + "\" bands --config \"" +
                            cfg_path.string() + "\" --out \"" + out +
                            "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const fs::path out1 = dir / "run1", out2 = dir / "run2";
  if (run_once(out1.string()) != 0 || run_once(out2.string()) != 0) {
    return Outcome{false, "CLI run failed"};
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool identical = true;
  for (const char* name : {"bands.csv", "gaps.csv", "bands.gp"}) {
    const std::string a = slurp(out1 / name);
    const std::string b = slurp(out2 / name);
    identical = identical && !a.empty() && a == b;
  }
  fs::remove_all(dir);
  return Outcome{identical, identical ? "bands.csv, gaps.csv, bands.gp byte-identical"
                                      : "outputs differ between runs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string binary = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    Outcome outcome;
  };
  const std::vector<Criterion> criteria = {
      {"homogeneous exactness", criterion_homogeneous()},
      {"curl-div identity", criterion_identity()},
      {"Garding inequality", criterion_garding()},
      {"gauge and operator structure", criterion_structure()},
      {"exponent cross-validation grid", criterion_exponent_grid()},
      {"limit behavior of exponents", criterion_limits()},
      {"monotone Galerkin convergence", criterion_monotone()},
      {"regularity-driven convergence signature",
       criterion_regularity_signature()},
      {"Maxwell system closure", criterion_maxwell_closure()},
      {"CLI determinism", criterion_determinism(binary)},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const bool pass = criteria[i].outcome.pass;
    failures += pass ? 0 : 1;
    std::printf("[%s] %zu. %s - %s\n", pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, criteria[i].outcome.detail.c_str());
  }
  std::printf("ACCEPTANCE: %zu/%zu criteria passed\n",
              criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
