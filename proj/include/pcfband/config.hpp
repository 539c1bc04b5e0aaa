// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_CONFIG_HPP
#define PCFBAND_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pcfband/geometry.hpp"

namespace pcfband {

struct FieldRequest {
  int k_index = 0;
  int band = 0;
  int grid = 64;
};

// Fully validated problem description. Every downstream type invariant is
// checked at parse time; unknown keys are rejected.
struct Config {
  Lattice2D lattice{Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  PolygonalPartition partition;
  double beta = 0.0;
  KPath kpath;               // defaults to the zone center when omitted
  int cutoff = 8;
  std::vector<int> ladder;   // resolution ladder for convergence runs
  int bands = 5;
  double tol = 1e-9;
  std::string out_dir = "./out";
  std::uint64_t seed = 0;
  FieldRequest field;
};

Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

}  // namespace pcfband

#endif  // PCFBAND_CONFIG_HPP
