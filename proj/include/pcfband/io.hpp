// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_IO_HPP
#define PCFBAND_IO_HPP

#include <ostream>
#include <string>

#include "pcfband/config.hpp"

namespace pcfband {

// Exit codes of the command-line surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

struct RunOptions {
  std::string out_dir;  // overrides the config when nonempty
  int threads = 0;
  double tol = 0.0;          // overrides when > 0
  std::uint64_t seed = 0;    // applied when seed_set
  bool seed_set = false;
};

Config apply_overrides(Config cfg, const RunOptions& opts);

// Subcommand drivers. Each writes its files under the configured output
// directory and reports to `log`; partial outputs are removed on failure.
int run_bands(const Config& cfg, const RunOptions& opts, std::ostream& log);
int run_exponents(const Config& cfg, const RunOptions& opts, std::ostream& log);
int run_converge(const Config& cfg, const RunOptions& opts, std::ostream& log);
int run_validate(const Config& cfg, const RunOptions& opts, std::ostream& log);
int run_field(const Config& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace pcfband

#endif  // PCFBAND_IO_HPP
