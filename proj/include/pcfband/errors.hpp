// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_ERRORS_HPP
#define PCFBAND_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace pcfband {

// Base class of every error thrown by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateLattice : Error { using Error::Error; };
struct EmptyPath : Error { using Error::Error; };
struct AmbiguousGeometry : Error { using Error::Error; };
struct Undersampled : Error { using Error::Error; };
struct TableTooSmall : Error { using Error::Error; };
struct ZeroFrequency : Error { using Error::Error; };
struct FlatInterface : Error { using Error::Error; };
struct NoInterface : Error { using Error::Error; };
struct ParamMismatch : Error { using Error::Error; };
struct DegenerateExponent : Error { using Error::Error; };

struct SolverDiverged : Error {
  double achieved_residual;
  SolverDiverged(const std::string& what, double residual)
      : Error(what), achieved_residual(residual) {}
};

struct ConfigError : Error {
  enum class Kind { Syntax, Schema, Invariant };
  Kind kind;
  std::string path;  // dotted path to the offending key, e.g. "regions[2].n2"
  ConfigError(Kind k, std::string key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what),
        kind(k),
        path(std::move(key_path)) {}
};

}  // namespace pcfband

#endif  // PCFBAND_ERRORS_HPP
