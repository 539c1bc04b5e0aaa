// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include "pcfband/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcfband/errors.hpp"

namespace pcfband {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kVertexMergeTol = 1e-9;

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  double t = (p - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Shifts every region polygon by the lattice vector that brings its
// centroid into the centered fundamental cell, so lookups only need to
// consider +-1 translates afterwards.
PolygonalPartition canonicalize_partition(const PolygonalPartition& part,
                                          const Lattice2D& lat) {
  PolygonalPartition out = part;
  for (Region& r : out.regions) {
    if (r.polygon.empty()) continue;
    Vec2 centroid = Vec2::Zero();
    for (const Vec2& v : r.polygon) centroid += v;
    centroid /= static_cast<double>(r.polygon.size());
    const Vec2 f = fractional_coords(lat, centroid);
    const double s1 = std::floor(f.x() + 0.5);
    const double s2 = std::floor(f.y() + 0.5);
    if (s1 == 0.0 && s2 == 0.0) continue;
    const Vec2 shift = s1 * lat.a1 + s2 * lat.a2;
    for (Vec2& v : r.polygon) v -= shift;
  }
  return out;
}

}  // namespace

Lattice2D make_lattice(const Vec2& a1, const Vec2& a2) {
  Lattice2D lat{a1, a2};
  if (std::abs(lat.det()) < 1e-14) {
    throw DegenerateLattice("lattice vectors are linearly dependent");
  }
  return lat;
}

ReciprocalLattice2D reciprocal_lattice(const Lattice2D& lat) {
  const double d = lat.det();
  if (std::abs(d) < 1e-14) {
    throw DegenerateLattice("lattice vectors are linearly dependent");
  }
  const double f = kTwoPi / d;
  return ReciprocalLattice2D{Vec2(f * lat.a2.y(), -f * lat.a2.x()),
                             Vec2(-f * lat.a1.y(), f * lat.a1.x())};
}

Vec2 fractional_coords(const Lattice2D& lat, const Vec2& x) {
  const double d = lat.det();
  return Vec2((x.x() * lat.a2.y() - x.y() * lat.a2.x()) / d,
              (lat.a1.x() * x.y() - lat.a1.y() * x.x()) / d);
}

Vec2 fold_to_cell(const Lattice2D& lat, const Vec2& x) {
  Vec2 f = fractional_coords(lat, x);
  f.x() -= std::floor(f.x() + 0.5);
  f.y() -= std::floor(f.y() + 0.5);
  return f.x() * lat.a1 + f.y() * lat.a2;
}

Vec2 fold_to_bz(const Lattice2D& lat, const Vec2& xi) {
  // xi = f1 b1 + f2 b2 with f_i = a_i . xi / (2 pi); fold f_i to (-1/2, 1/2].
  double f1 = lat.a1.dot(xi) / kTwoPi;
  double f2 = lat.a2.dot(xi) / kTwoPi;
  f1 -= std::ceil(f1 - 0.5);
  f2 -= std::ceil(f2 - 0.5);
  const ReciprocalLattice2D rec = reciprocal_lattice(lat);
  return f1 * rec.b1 + f2 * rec.b2;
}

bool in_brillouin_zone(const Lattice2D& lat, const Vec2& xi, double tol) {
  const double f1 = lat.a1.dot(xi) / kTwoPi;
  const double f2 = lat.a2.dot(xi) / kTwoPi;
  return std::abs(f1) <= 0.5 + tol && std::abs(f2) <= 0.5 + tol;
}

std::vector<KSample> sample_kpath(const KPath& path, const Lattice2D& lat) {
  if (path.vertices.empty()) throw EmptyPath("k-path has no vertices");
  if (path.samples_per_segment < 1) {
    throw Error("samples_per_segment must be positive");
  }
  std::vector<KSample> out;
  const Vec2 first = path.vertices.front().xi;
  out.push_back(KSample{first, fold_to_bz(lat, first), 0.0});
  double s = 0.0;
  for (size_t i = 1; i < path.vertices.size(); ++i) {
    const Vec2 a = path.vertices[i - 1].xi;
    const Vec2 b = path.vertices[i].xi;
    const double len = (b - a).norm();
    for (int j = 1; j <= path.samples_per_segment; ++j) {
      const double t = static_cast<double>(j) / path.samples_per_segment;
      const Vec2 xi = a + t * (b - a);
      out.push_back(KSample{xi, fold_to_bz(lat, xi), s + t * len});
    }
    s += len;
  }
  return out;
}

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double area = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    area += cross2(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * area;
}

namespace {

// Proper crossing of open segments (shared endpoints and collinear overlap
// do not count).
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

bool polygon_is_simple(const std::vector<Vec2>& poly, double tol) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((b - a).norm() < tol) return false;
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p,
                      double boundary_tol) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) < boundary_tol) {
      return true;
    }
  }
  bool inside = false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xint =
          a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < xint) inside = !inside;
    }
  }
  return inside;
}

double region_at(const PolygonalPartition& part_in, const Lattice2D& lat,
                 const Vec2& x) {
  const PolygonalPartition part = canonicalize_partition(part_in, lat);
  const Vec2 xf = fold_to_cell(lat, x);
  for (const Region& r : part.regions) {
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        const Vec2 shifted = xf - i * lat.a1 - j * lat.a2;
        if (point_in_polygon(r.polygon, shifted)) return r.n2;
      }
    }
  }
  return part.background_n2;
}

RegionLocator::RegionLocator(const PolygonalPartition& part_in,
                             const Lattice2D& lat)
    : lat_(lat), background_(part_in.background_n2) {
  const PolygonalPartition part = canonicalize_partition(part_in, lat);
  // Centered-cell bounding box, expanded so boundary-straddling translates
  // are kept.
  Vec2 cell_lo(1e300, 1e300), cell_hi(-1e300, -1e300);
  for (double s : {-0.5, 0.5}) {
    for (double t : {-0.5, 0.5}) {
      const Vec2 c = s * lat.a1 + t * lat.a2;
      cell_lo = cell_lo.cwiseMin(c);
      cell_hi = cell_hi.cwiseMax(c);
    }
  }
  const double margin = 1e-9 * (1.0 + (cell_hi - cell_lo).norm());
  cell_lo.array() -= margin;
  cell_hi.array() += margin;

  int index = 0;
  for (const Region& r : part.regions) {
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        const Vec2 shift = i * lat.a1 + j * lat.a2;
        Candidate c;
        c.polygon.reserve(r.polygon.size());
        c.lo = Vec2(1e300, 1e300);
        c.hi = Vec2(-1e300, -1e300);
        for (const Vec2& v : r.polygon) {
          const Vec2 w = v + shift;
          c.polygon.push_back(w);
          c.lo = c.lo.cwiseMin(w);
          c.hi = c.hi.cwiseMax(w);
        }
        if ((c.lo.array() > cell_hi.array()).any() ||
            (c.hi.array() < cell_lo.array()).any()) {
          continue;
        }
        c.n2 = r.n2;
        c.region_index = index;
        candidates_.push_back(std::move(c));
      }
    }
    ++index;
  }
  std::stable_sort(candidates_.begin(), candidates_.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.region_index < b.region_index;
                   });
}

double RegionLocator::n2_at(const Vec2& x) const {
  const Vec2 xf = fold_to_cell(lat_, x);
  for (const Candidate& c : candidates_) {
    if (xf.x() < c.lo.x() - 1e-12 || xf.x() > c.hi.x() + 1e-12 ||
        xf.y() < c.lo.y() - 1e-12 || xf.y() > c.hi.y() + 1e-12) {
      continue;
    }
    if (point_in_polygon(c.polygon, xf)) return c.n2;
  }
  return background_;
}

namespace {

struct VertexCluster {
  Vec2 position;               // representative (first-encountered vertex)
  std::vector<Vec2> members;
};

std::vector<VertexCluster> cluster_vertices(const PolygonalPartition& part) {
  std::vector<VertexCluster> clusters;
  for (const Region& r : part.regions) {
    for (const Vec2& v : r.polygon) {
      bool merged = false;
      for (VertexCluster& c : clusters) {
        for (const Vec2& m : c.members) {
          if ((v - m).norm() < kVertexMergeTol) {
            c.members.push_back(v);
            merged = true;
            break;
          }
        }
        if (merged) break;
      }
      if (!merged) clusters.push_back(VertexCluster{v, {v}});
    }
  }
  // A cluster linked transitively across more than twice the merge
  // tolerance means two distinct vertices were conflated.
  for (const VertexCluster& c : clusters) {
    for (size_t i = 0; i < c.members.size(); ++i) {
      for (size_t j = i + 1; j < c.members.size(); ++j) {
        if ((c.members[i] - c.members[j]).norm() > 2.0 * kVertexMergeTol) {
          throw AmbiguousGeometry(
              "coincident-but-unequal vertices within merge tolerance");
        }
      }
    }
  }
  return clusters;
}

double normalize_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace

std::vector<CornerSpec> extract_corners(const PolygonalPartition& part_in,
                                        const Lattice2D& lat) {
  const PolygonalPartition part = canonicalize_partition(part_in, lat);
  const std::vector<VertexCluster> clusters = cluster_vertices(part);
  const RegionLocator locator(part, lat);
  const double angle_tol = 1e-9;
  const double probe_radius = 1e-6;

  std::vector<CornerSpec> corners;
  for (const VertexCluster& cluster : clusters) {
    const Vec2 c = cluster.position;

    // Incident rays from every edge of every region translate that touches
    // the corner, including edges passing straight through it.
    std::vector<double> rays;
    for (const Region& r : part.regions) {
      for (int ti = -1; ti <= 1; ++ti) {
        for (int tj = -1; tj <= 1; ++tj) {
          const Vec2 shift = ti * lat.a1 + tj * lat.a2;
          const size_t n = r.polygon.size();
          for (size_t i = 0; i < n; ++i) {
            const Vec2 u = r.polygon[i] + shift;
            const Vec2 v = r.polygon[(i + 1) % n] + shift;
            const Vec2 e = v - u;
            if ((u - c).norm() < kVertexMergeTol) {
              rays.push_back(normalize_angle(std::atan2(e.y(), e.x())));
            } else if ((v - c).norm() < kVertexMergeTol) {
              rays.push_back(normalize_angle(std::atan2(-e.y(), -e.x())));
            } else if (point_segment_distance(c, u, v) < kVertexMergeTol) {
              rays.push_back(normalize_angle(std::atan2(e.y(), e.x())));
              rays.push_back(normalize_angle(std::atan2(-e.y(), -e.x())));
            }
          }
        }
      }
    }
    if (rays.empty()) continue;
    std::sort(rays.begin(), rays.end());
    std::vector<double> unique_rays;
    for (double a : rays) {
      if (unique_rays.empty() || a - unique_rays.back() > angle_tol) {
        unique_rays.push_back(a);
      }
    }
    if (unique_rays.size() > 1 &&
        unique_rays.front() + kTwoPi - unique_rays.back() <= angle_tol) {
      unique_rays.pop_back();
    }

    // Probe the material between consecutive rays.
    const size_t nr = unique_rays.size();
    std::vector<CornerSector> sectors;
    std::vector<double> sector_start;
    for (size_t i = 0; i < nr; ++i) {
      const double a0 = unique_rays[i];
      const double a1 = (i + 1 < nr) ? unique_rays[i + 1] : unique_rays[0] + kTwoPi;
      const double opening = a1 - a0;
      if (opening <= angle_tol) continue;
      const double mid = a0 + 0.5 * opening;
      const Vec2 probe = c + probe_radius * Vec2(std::cos(mid), std::sin(mid));
      sectors.push_back(CornerSector{opening, locator.n2_at(probe)});
      sector_start.push_back(a0);
    }
    if (sectors.empty()) continue;

    // Merge consecutive sectors with the same material, wrap-around included.
    auto same_n2 = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    std::vector<CornerSector> merged;
    std::vector<double> merged_start;
    for (size_t i = 0; i < sectors.size(); ++i) {
      if (!merged.empty() && same_n2(merged.back().n2, sectors[i].n2)) {
        merged.back().opening += sectors[i].opening;
      } else {
        merged.push_back(sectors[i]);
        merged_start.push_back(sector_start[i]);
      }
    }
    while (merged.size() > 1 && same_n2(merged.front().n2, merged.back().n2)) {
      merged.front().opening += merged.back().opening;
      merged_start.front() = merged_start.back();
      merged.pop_back();
      merged_start.pop_back();
    }

    if (merged.size() < 2) continue;  // locally homogeneous, no interface
    if (merged.size() == 2 &&
        std::abs(merged[0].opening - std::numbers::pi) < 1e-7 &&
        std::abs(merged[1].opening - std::numbers::pi) < 1e-7) {
      continue;  // flat interface through the vertex, no kink
    }

    CornerSpec spec;
    spec.location = c;
    spec.start_angle = normalize_angle(merged_start.front());
    spec.sectors = merged;
    corners.push_back(std::move(spec));
  }
  return corners;
}

}  // namespace pcfband
