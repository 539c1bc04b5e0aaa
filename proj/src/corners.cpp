// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/corners.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "pcfband/errors.hpp"

namespace pcfband {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kScanLo = 1e-6;
constexpr double kScanHi = 1.0 - 1e-6;
constexpr double kScanStep = 1e-3;

// Sign-change scan plus bisection. Near each root the neighbourhood
// +-2 coarse steps is rescanned at a finer step so close pairs are not
// missed by the coarse grid.
std::vector<double> scan_roots(const std::function<double(double)>& f,
                               double lo, double hi, double step) {
  std::vector<std::pair<double, double>> brackets;
  double x0 = lo, f0 = f(lo);
  for (double x1 = lo + step; x1 < hi + 0.5 * step; x1 += step) {
    const double xc = std::min(x1, hi);
    const double f1 = f(xc);
    if (f0 == 0.0) brackets.emplace_back(x0, x0);
    if (f0 * f1 < 0.0) brackets.emplace_back(x0, xc);
    x0 = xc;
    f0 = f1;
  }

  std::vector<double> roots;
  for (auto [a, b] : brackets) {
    if (a == b) {
      roots.push_back(a);
      continue;
    }
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if (fa * fm <= 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

std::vector<double> scan_roots_refined(const std::function<double(double)>& f,
                                       double lo, double hi) {
  std::vector<double> roots = scan_roots(f, lo, hi, kScanStep);
  std::vector<double> all = roots;
  for (double r : roots) {
    const double wl = std::max(lo, r - 2.0 * kScanStep);
    const double wh = std::min(hi, r + 2.0 * kScanStep);
    for (double extra : scan_roots(f, wl, wh, kScanStep / 50.0)) {
      bool known = false;
      for (double known_root : all) {
        if (std::abs(extra - known_root) < 1e-9) known = true;
      }
      if (!known) all.push_back(extra);
    }
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<SingularExponent> solve_lamc(double omega_c, double eps1,
                                         double eps2) {
  if (!(omega_c > 0.0 && omega_c < 2.0 * kPi)) {
    throw Error("corner opening angle must lie in (0, 2 pi)");
  }
  if (std::abs(omega_c - kPi) < 1e-12) {
    throw FlatInterface("opening angle pi is a flat interface, not a corner");
  }
  if (!(eps1 > 0.0 && eps2 > 0.0)) {
    throw Error("permittivities must be positive");
  }
  if (std::abs(eps1 - eps2) <= 1e-14 * std::max(eps1, eps2)) {
    throw NoInterface("equal permittivities carry no interface");
  }

  const double ratio = (eps1 + eps2) / (eps1 - eps2);
  std::vector<SingularExponent> out;
  for (int branch = 0; branch < 2; ++branch) {
    const double sign = branch == 0 ? 1.0 : -1.0;
    auto f = [&](double l) {
      return std::sin((kPi - omega_c) * l) - sign * ratio * std::sin(kPi * l);
    };
    auto df = [&](double l) {
      return (kPi - omega_c) * std::cos((kPi - omega_c) * l) -
             sign * ratio * kPi * std::cos(kPi * l);
    };
    for (double root : scan_roots_refined(f, kScanLo, kScanHi)) {
      for (int it = 0; it < 3; ++it) {
        const double d = df(root);
        if (std::abs(d) < 1e-30) break;
        const double next = root - f(root) / d;
        if (next > 0.0 && next < 1.0) root = next;
      }
      if (root <= 0.0 || root >= 1.0) continue;
      SingularExponent e;
      e.lambda = root;
      e.family = sign > 0 ? "lamc+" : "lamc-";
      e.residual = std::abs(f(root)) / (1.0 + std::abs(ratio));
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SingularExponent& a, const SingularExponent& b) {
              return a.lambda < b.lambda;
            });
  return out;
}

Eigen::Matrix2d corner_transfer(const CornerSpec& corner, double lambda) {
  Eigen::Matrix2d t = Eigen::Matrix2d::Identity();
  for (const CornerSector& s : corner.sectors) {
    const double eps = s.n2;  // eps0 = 1, so eps = n^2
    const double c = std::cos(lambda * s.opening);
    const double sn = std::sin(lambda * s.opening);
    Eigen::Matrix2d m;
    m << c, sn / eps, -eps * sn, c;
    t = m * t;
  }
  return t;
}

double angular_determinant(const CornerSpec& corner, double lambda) {
  const Eigen::Matrix2d t = corner_transfer(corner, lambda);
  return (t - Eigen::Matrix2d::Identity()).determinant();
}

std::vector<SingularExponent> find_exponents(const CornerSpec& corner) {
  double total = 0.0;
  for (const CornerSector& s : corner.sectors) total += s.opening;
  if (std::abs(total - 2.0 * kPi) > 1e-10) {
    throw Error("corner sector openings do not sum to 2 pi");
  }

  auto f = [&](double l) { return angular_determinant(corner, l); };
  std::vector<SingularExponent> out;
  for (double root : scan_roots_refined(f, kScanLo, kScanHi)) {
    // One secant polish; the determinant is smooth in lambda.
    const double h = 1e-7;
    const double d = (f(root + h) - f(root - h)) / (2.0 * h);
    if (std::abs(d) > 1e-30) {
      const double next = root - f(root) / d;
      if (next > 0.0 && next < 1.0) root = next;
    }
    SingularExponent e;
    e.lambda = root;
    e.family = "determinant";
    const Eigen::Matrix2d t = corner_transfer(corner, root);
    e.residual = std::abs((t - Eigen::Matrix2d::Identity()).determinant()) /
                 (1.0 + t.squaredNorm());
    out.push_back(e);
  }
  return out;
}

double sigma_epsilon(const std::vector<CornerSpec>& corners) {
  double sigma = std::numeric_limits<double>::infinity();
  for (const CornerSpec& c : corners) {
    for (const SingularExponent& e : find_exponents(c)) {
      sigma = std::min(sigma, e.lambda);
    }
  }
  return sigma;
}

double AngularFunction::eval(double theta) const {
  theta = std::fmod(theta, 2.0 * kPi);
  if (theta < 0.0) theta += 2.0 * kPi;
  size_t l = 0;
  while (l + 1 < coeffs.size() && theta >= boundaries[l + 1]) ++l;
  const double u = lambda * (theta - boundaries[l]);
  return coeffs[l].x() * std::cos(u) + coeffs[l].y() * std::sin(u);
}

double AngularFunction::eval_derivative(double theta) const {
  theta = std::fmod(theta, 2.0 * kPi);
  if (theta < 0.0) theta += 2.0 * kPi;
  size_t l = 0;
  while (l + 1 < coeffs.size() && theta >= boundaries[l + 1]) ++l;
  const double u = lambda * (theta - boundaries[l]);
  return lambda * (-coeffs[l].x() * std::sin(u) + coeffs[l].y() * std::cos(u));
}

namespace {

// Max of |A cos u + B sin u| over u in [0, span].
double sector_max_abs(double a, double b, double span) {
  const double amp = std::hypot(a, b);
  if (amp == 0.0) return 0.0;
  const double psi = std::atan2(b, a);  // extremum of the cosine form at u = psi
  double best = std::max(std::abs(a), std::abs(a * std::cos(span) + b * std::sin(span)));
  for (int k = -2; k <= 2; ++k) {
    const double u = psi + k * kPi;
    if (u >= 0.0 && u <= span) best = std::max(best, amp);
  }
  return best;
}

}  // namespace

AngularFunction angular_function(const CornerSpec& corner,
                                 const SingularExponent& exponent) {
  const double lambda = exponent.lambda;
  const Eigen::Matrix2d t = corner_transfer(corner, lambda);
  const Eigen::Matrix2d m = t - Eigen::Matrix2d::Identity();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullV);
  const double scale = std::max(1.0, t.norm());
  const double s0 = svd.singularValues()(0);
  const double s1 = svd.singularValues()(1);
  if (s1 / scale > 1e-8) {
    throw DegenerateExponent("lambda is not a root: T - I has no null direction");
  }
  if (s0 / scale < 1e-8) {
    throw DegenerateExponent("null space dimension is 2, profile not unique");
  }
  const Eigen::Vector2d state0 = svd.matrixV().col(1);

  AngularFunction phi;
  phi.lambda = lambda;
  phi.boundaries.push_back(0.0);
  Eigen::Vector2d state = state0;
  for (const CornerSector& s : corner.sectors) {
    const double eps = s.n2;
    phi.eps.push_back(eps);
    phi.coeffs.emplace_back(state(0), state(1) / eps);
    const double c = std::cos(lambda * s.opening);
    const double sn = std::sin(lambda * s.opening);
    Eigen::Matrix2d prop;
    prop << c, sn / eps, -eps * sn, c;
    state = prop * state;
    phi.boundaries.push_back(phi.boundaries.back() + s.opening);
  }

  double peak = 0.0;
  double peak_signed = 0.0;
  for (size_t l = 0; l < phi.coeffs.size(); ++l) {
    const double span = lambda * (phi.boundaries[l + 1] - phi.boundaries[l]);
    const double v = sector_max_abs(phi.coeffs[l].x(), phi.coeffs[l].y(), span);
    if (v > peak) {
      peak = v;
      peak_signed = std::abs(phi.coeffs[l].x()) >= std::abs(phi.coeffs[l].y())
                        ? phi.coeffs[l].x()
                        : phi.coeffs[l].y();
    }
  }
  if (peak == 0.0) {
    throw DegenerateExponent("angular profile is identically zero");
  }
  const double norm = (peak_signed < 0.0 ? -1.0 : 1.0) / peak;
  for (Eigen::Vector2d& c : phi.coeffs) c *= norm;
  return phi;
}

double eval_singular_function(const AngularFunction& phi, double r,
                              double theta) {
  return std::pow(r, phi.lambda) * phi.eval(theta);
}

}  // namespace pcfband
