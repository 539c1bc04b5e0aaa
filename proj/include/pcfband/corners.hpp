// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_CORNERS_HPP
#define PCFBAND_CORNERS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pcfband/geometry.hpp"

namespace pcfband {

// One singular exponent lambda in (0,1) of the scalar interface operator
// div(eps grad .) at a corner. `residual` is the normalized defining
// equation at the root: |sin((pi-w)l) -+ R sin(pi l)| / (1+|R|) for the
// two-material equation, |det(T-I)| / (1+||T||_F^2) for the determinant.
struct SingularExponent {
  double lambda = 0.0;
  int corner_index = -1;
  std::string family;  // "lamc+", "lamc-" or "determinant"
  double residual = 0.0;
};

// All real roots in (0,1) of both sign branches of
//   sin((pi - omega_c) lambda) / sin(pi lambda) = +- (eps1+eps2)/(eps1-eps2).
// Exactly one root is expected; all found roots are returned so a caller
// can flag the unexpected. omega_c = pi and eps1 = eps2 are rejected.
std::vector<SingularExponent> solve_lamc(double omega_c, double eps1,
                                         double eps2);

// Angular transfer matrix around the corner at a given exponent. The state
// (phi, eps phi'/lambda) is continuous across interfaces; within a sector
// of opening delta and permittivity eps it propagates by
//   [ cos(lambda delta)        sin(lambda delta)/eps ]
//   [ -eps sin(lambda delta)   cos(lambda delta)     ].
Eigen::Matrix2d corner_transfer(const CornerSpec& corner, double lambda);

// D(lambda) = det(T(lambda) - I); its roots on (0,1) are the singular
// exponents of the scalar transmission problem at the corner.
double angular_determinant(const CornerSpec& corner, double lambda);

// Roots of the angular determinant on (0,1), by sign scan (step 1e-3, with
// local subdivision near found roots) and bisection refinement.
std::vector<SingularExponent> find_exponents(const CornerSpec& corner);

// Minimum exponent over all corners; +infinity when the list is empty or
// no corner has a real exponent in the strip ("smooth" sentinel).
double sigma_epsilon(const std::vector<CornerSpec>& corners);

// Angular profile phi of a singular function r^lambda phi(theta), in local
// angle theta measured from the corner's first interface ray. Coefficients
// per sector: phi = A cos(lambda (theta - w_{l-1})) + B sin(...).
// Normalized so max |phi| = 1.
struct AngularFunction {
  double lambda = 0.0;
  std::vector<double> boundaries;          // w_0 = 0, ..., w_L = 2 pi
  std::vector<double> eps;                 // per sector
  std::vector<Eigen::Vector2d> coeffs;     // (A, B) per sector

  double eval(double theta) const;
  double eval_derivative(double theta) const;
};

// Builds the angular profile from the null vector of T(lambda) - I.
// Throws DegenerateExponent when the null space dimension is not one.
AngularFunction angular_function(const CornerSpec& corner,
                                 const SingularExponent& exponent);

// r^lambda phi(theta) at one point of the local polar grid.
double eval_singular_function(const AngularFunction& phi, double r,
                              double theta);

}  // namespace pcfband

#endif  // PCFBAND_CORNERS_HPP
