// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pcfband/errors.hpp"

namespace pcfband {

namespace {

using nlohmann::json;
using Kind = ConfigError::Kind;

void reject_unknown_keys(const json& j, const std::string& path,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError(Kind::Schema, path.empty() ? key : path + "." + key,
                        "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(Kind::Schema, path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ConfigError(Kind::Schema, path, "expected an integer");
  }
  return j.get<int>();
}

Vec2 get_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(Kind::Schema, path, "expected an array of two numbers");
  }
  return Vec2(get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]"));
}

// Drops repeated and collinear pass-through vertices; a collinear vertex
// is a flat point of the boundary, not a corner.
std::vector<Vec2> clean_polygon(std::vector<Vec2> poly, const std::string& path) {
  const double merge_tol = 1e-9;
  std::vector<Vec2> dedup;
  for (const Vec2& v : poly) {
    if (dedup.empty() || (v - dedup.back()).norm() > merge_tol) {
      dedup.push_back(v);
    }
  }
  while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= merge_tol) {
    dedup.pop_back();
  }

  std::vector<Vec2> out;
  const size_t n = dedup.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& prev = dedup[(i + n - 1) % n];
    const Vec2& cur = dedup[i];
    const Vec2& next = dedup[(i + 1) % n];
    const Vec2 e0 = cur - prev;
    const Vec2 e1 = next - cur;
    const double cross = e0.x() * e1.y() - e0.y() * e1.x();
    const double scale = e0.norm() * e1.norm();
    if (std::abs(cross) <= 1e-12 * std::max(scale, 1e-30)) {
      if (e0.dot(e1) > 0.0) continue;  // straight through, merge away
      throw ConfigError(Kind::Invariant, path,
                        "polygon has a degenerate spike vertex");
    }
    out.push_back(cur);
  }
  if (out.size() < 3) {
    throw ConfigError(Kind::Invariant, path,
                      "polygon needs at least 3 non-collinear vertices");
  }
  return out;
}

void check_regions_disjoint(const std::vector<Region>& regions) {
  for (size_t i = 0; i < regions.size(); ++i) {
    for (size_t j = i + 1; j < regions.size(); ++j) {
      const auto& pa = regions[i].polygon;
      const auto& pb = regions[j].polygon;
      for (size_t a = 0; a < pa.size(); ++a) {
        for (size_t b = 0; b < pb.size(); ++b) {
          const Vec2& a0 = pa[a];
          const Vec2& a1 = pa[(a + 1) % pa.size()];
          const Vec2& b0 = pb[b];
          const Vec2& b1 = pb[(b + 1) % pb.size()];
          const double d1 = (a1 - a0).x() * (b0 - a0).y() - (a1 - a0).y() * (b0 - a0).x();
          const double d2 = (a1 - a0).x() * (b1 - a0).y() - (a1 - a0).y() * (b1 - a0).x();
          const double d3 = (b1 - b0).x() * (a0 - b0).y() - (b1 - b0).y() * (a0 - b0).x();
          const double d4 = (b1 - b0).x() * (a1 - b0).y() - (b1 - b0).y() * (a1 - b0).x();
          if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
              ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
            throw ConfigError(Kind::Invariant,
                              "regions[" + std::to_string(j) + "]",
                              "polygon crosses regions[" + std::to_string(i) + "]");
          }
        }
      }
      // Vertex strictly inside the other polygon means overlapping
      // interiors (shared edges and vertices are allowed).
      auto strictly_inside = [](const std::vector<Vec2>& poly, const Vec2& p) {
        if (!point_in_polygon(poly, p)) return false;
        for (size_t e = 0; e < poly.size(); ++e) {
          const Vec2& u = poly[e];
          const Vec2& v = poly[(e + 1) % poly.size()];
          const Vec2 uv = v - u;
          const double len2 = uv.squaredNorm();
          double t = len2 > 0 ? (p - u).dot(uv) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          if ((p - (u + t * uv)).norm() < 1e-9) return false;
        }
        return true;
      };
      for (const Vec2& v : pa) {
        if (strictly_inside(pb, v)) {
          throw ConfigError(Kind::Invariant, "regions[" + std::to_string(i) + "]",
                            "vertex lies inside regions[" + std::to_string(j) + "]");
        }
      }
      for (const Vec2& v : pb) {
        if (strictly_inside(pa, v)) {
          throw ConfigError(Kind::Invariant, "regions[" + std::to_string(j) + "]",
                            "vertex lies inside regions[" + std::to_string(i) + "]");
        }
      }
    }
  }
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(Kind::Syntax, "", std::string("JSON syntax error: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError(Kind::Schema, "", "top level must be an object");
  }
  reject_unknown_keys(j, "",
                      {"lattice", "background_n2", "regions", "beta", "kpath",
                       "cutoff", "ladder", "bands", "tol", "out_dir", "seed",
                       "field"});

  Config cfg;

  if (!j.contains("lattice")) {
    throw ConfigError(Kind::Schema, "lattice", "missing required key");
  }
  reject_unknown_keys(j["lattice"], "lattice", {"a1", "a2"});
  if (!j["lattice"].contains("a1") || !j["lattice"].contains("a2")) {
    throw ConfigError(Kind::Schema, "lattice", "needs a1 and a2");
  }
  const Vec2 a1 = get_vec2(j["lattice"]["a1"], "lattice.a1");
  const Vec2 a2 = get_vec2(j["lattice"]["a2"], "lattice.a2");
  if (std::abs(a1.x() * a2.y() - a1.y() * a2.x()) < 1e-14) {
    throw ConfigError(Kind::Invariant, "lattice",
                      "primitive vectors are linearly dependent");
  }
  cfg.lattice = Lattice2D{a1, a2};

  if (!j.contains("background_n2")) {
    throw ConfigError(Kind::Schema, "background_n2", "missing required key");
  }
  cfg.partition.background_n2 = get_number(j["background_n2"], "background_n2");
  if (!(cfg.partition.background_n2 > 0.0)) {
    throw ConfigError(Kind::Schema, "background_n2", "n2 must be positive");
  }

  if (j.contains("regions")) {
    if (!j["regions"].is_array()) {
      throw ConfigError(Kind::Schema, "regions", "expected an array");
    }
    int idx = 0;
    for (const json& jr : j["regions"]) {
      const std::string path = "regions[" + std::to_string(idx) + "]";
      reject_unknown_keys(jr, path, {"polygon", "n2"});
      if (!jr.contains("polygon") || !jr.contains("n2")) {
        throw ConfigError(Kind::Schema, path, "needs polygon and n2");
      }
      Region region;
      region.n2 = get_number(jr["n2"], path + ".n2");
      if (!(region.n2 > 0.0)) {
        throw ConfigError(Kind::Schema, path + ".n2", "n2 must be positive");
      }
      if (!jr["polygon"].is_array() || jr["polygon"].size() < 3) {
        throw ConfigError(Kind::Schema, path + ".polygon",
                          "expected an array of at least 3 vertices");
      }
      int vi = 0;
      for (const json& jv : jr["polygon"]) {
        region.polygon.push_back(
            get_vec2(jv, path + ".polygon[" + std::to_string(vi) + "]"));
        ++vi;
      }
      region.polygon = clean_polygon(region.polygon, path + ".polygon");
      if (!polygon_is_simple(region.polygon)) {
        throw ConfigError(Kind::Invariant, path + ".polygon",
                          "polygon is self-intersecting");
      }
      if (polygon_signed_area(region.polygon) < 0) {
        std::reverse(region.polygon.begin(), region.polygon.end());
      }
      cfg.partition.regions.push_back(std::move(region));
      ++idx;
    }
    check_regions_disjoint(cfg.partition.regions);
  }

  if (j.contains("beta")) cfg.beta = get_number(j["beta"], "beta");
  if (!std::isfinite(cfg.beta)) {
    throw ConfigError(Kind::Schema, "beta", "must be finite");
  }

  if (j.contains("kpath")) {
    const json& jp = j["kpath"];
    reject_unknown_keys(jp, "kpath", {"vertices", "samples_per_segment"});
    if (!jp.contains("vertices") || !jp["vertices"].is_array() ||
        jp["vertices"].empty()) {
      throw ConfigError(Kind::Schema, "kpath.vertices",
                        "expected a nonempty array");
    }
    int vi = 0;
    for (const json& jv : jp["vertices"]) {
      const std::string path = "kpath.vertices[" + std::to_string(vi) + "]";
      reject_unknown_keys(jv, path, {"label", "xi"});
      if (!jv.contains("xi")) {
        throw ConfigError(Kind::Schema, path, "needs xi");
      }
      KPathVertex v;
      v.xi = get_vec2(jv["xi"], path + ".xi");
      if (jv.contains("label")) {
        if (!jv["label"].is_string()) {
          throw ConfigError(Kind::Schema, path + ".label", "expected a string");
        }
        v.label = jv["label"].get<std::string>();
      }
      cfg.kpath.vertices.push_back(std::move(v));
      ++vi;
    }
    if (jp.contains("samples_per_segment")) {
      cfg.kpath.samples_per_segment =
          get_int(jp["samples_per_segment"], "kpath.samples_per_segment");
      if (cfg.kpath.samples_per_segment < 1) {
        throw ConfigError(Kind::Schema, "kpath.samples_per_segment",
                          "must be at least 1");
      }
    }
  } else {
    cfg.kpath.vertices.push_back(KPathVertex{"Gamma", Vec2::Zero()});
  }

  if (j.contains("cutoff")) {
    cfg.cutoff = get_int(j["cutoff"], "cutoff");
    if (cfg.cutoff < 0) {
      throw ConfigError(Kind::Schema, "cutoff", "must be nonnegative");
    }
  }
  if (j.contains("ladder")) {
    if (!j["ladder"].is_array()) {
      throw ConfigError(Kind::Schema, "ladder", "expected an array");
    }
    int li = 0;
    for (const json& jl : j["ladder"]) {
      const int n = get_int(jl, "ladder[" + std::to_string(li) + "]");
      if (n < 0) {
        throw ConfigError(Kind::Schema, "ladder[" + std::to_string(li) + "]",
                          "must be nonnegative");
      }
      if (!cfg.ladder.empty() && n <= cfg.ladder.back()) {
        throw ConfigError(Kind::Invariant, "ladder",
                          "must be strictly increasing");
      }
      cfg.ladder.push_back(n);
      ++li;
    }
  }
  if (j.contains("bands")) {
    cfg.bands = get_int(j["bands"], "bands");
    if (cfg.bands < 1) {
      throw ConfigError(Kind::Schema, "bands", "must be at least 1");
    }
  }
  if (j.contains("tol")) {
    cfg.tol = get_number(j["tol"], "tol");
    if (!(cfg.tol > 0.0 && cfg.tol <= 1e-4)) {
      throw ConfigError(Kind::Schema, "tol", "must lie in (0, 1e-4]");
    }
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) {
      throw ConfigError(Kind::Schema, "out_dir", "expected a string");
    }
    cfg.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError(Kind::Schema, "seed", "expected a nonnegative integer");
    }
    const std::int64_t s = j["seed"].get<std::int64_t>();
    if (s < 0) throw ConfigError(Kind::Schema, "seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("field")) {
    const json& jf = j["field"];
    reject_unknown_keys(jf, "field", {"k_index", "band", "grid"});
    if (jf.contains("k_index")) {
      cfg.field.k_index = get_int(jf["k_index"], "field.k_index");
      if (cfg.field.k_index < 0) {
        throw ConfigError(Kind::Schema, "field.k_index", "must be nonnegative");
      }
    }
    if (jf.contains("band")) {
      cfg.field.band = get_int(jf["band"], "field.band");
      if (cfg.field.band < 0) {
        throw ConfigError(Kind::Schema, "field.band", "must be nonnegative");
      }
    }
    if (jf.contains("grid")) {
      cfg.field.grid = get_int(jf["grid"], "field.grid");
      if (cfg.field.grid < 2) {
        throw ConfigError(Kind::Schema, "field.grid", "must be at least 2");
      }
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(ConfigError::Kind::Syntax, "",
                      "cannot open config file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pcfband
