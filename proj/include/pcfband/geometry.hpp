// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCFBAND_GEOMETRY_HPP
#define PCFBAND_GEOMETRY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pcfband {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Two-dimensional Bravais lattice with primitive vectors a1, a2.
// All lengths are in units of the lattice pitch.
struct Lattice2D {
  Vec2 a1;
  Vec2 a2;

  double det() const { return a1.x() * a2.y() - a1.y() * a2.x(); }
  double cell_area() const { return std::abs(det()); }
};

// Validates linear independence (|det| >= 1e-14), throws DegenerateLattice.
Lattice2D make_lattice(const Vec2& a1, const Vec2& a2);

// Reciprocal lattice, a_i . b_j = 2 pi delta_ij.
struct ReciprocalLattice2D {
  Vec2 b1;
  Vec2 b2;
};

ReciprocalLattice2D reciprocal_lattice(const Lattice2D& lat);

// Fractional coordinates: x = s a1 + t a2  ->  (s, t).
Vec2 fractional_coords(const Lattice2D& lat, const Vec2& x);

// Fold a position into the centered fundamental cell, s,t in [-1/2, 1/2).
Vec2 fold_to_cell(const Lattice2D& lat, const Vec2& x);

// Fold a quasi-momentum into the first Brillouin zone (parallelogram cell
// of the reciprocal lattice, fractional coordinates in (-1/2, 1/2]).
Vec2 fold_to_bz(const Lattice2D& lat, const Vec2& xi);

// Closed-cell membership test for the first Brillouin zone.
bool in_brillouin_zone(const Lattice2D& lat, const Vec2& xi, double tol = 1e-12);

struct KPathVertex {
  std::string label;
  Vec2 xi;
};

struct KPath {
  std::vector<KPathVertex> vertices;
  int samples_per_segment = 1;
};

struct KSample {
  Vec2 xi;         // as sampled along the path
  Vec2 xi_folded;  // folded into the first Brillouin zone
  double arclength = 0.0;
};

// Piecewise-linear sampling of the path; endpoints included, arclength
// cumulative Euclidean. samples_per_segment subdivisions per segment.
std::vector<KSample> sample_kpath(const KPath& path, const Lattice2D& lat);

// One material region: a simple closed polygon with constant n^2.
struct Region {
  std::vector<Vec2> polygon;
  double n2 = 1.0;
};

// Polygonal partition of the periodicity cell. Points covered by no region
// take the background value. Region order is significant: boundary points
// are resolved first-region-wins.
struct PolygonalPartition {
  std::vector<Region> regions;
  double background_n2 = 1.0;
};

double polygon_signed_area(const std::vector<Vec2>& poly);
bool polygon_is_simple(const std::vector<Vec2>& poly, double tol = 1e-12);

// Boundary-inclusive point-in-polygon test (even-odd rule).
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p,
                      double boundary_tol = 1e-12);

// n^2 at a point, periodic in the lattice. The point is folded to the
// centered cell; regions are tested in order (first-region-wins), each
// against its lattice translates.
double region_at(const PolygonalPartition& part, const Lattice2D& lat,
                 const Vec2& x);

// Precomputed translate/bbox lists for repeated region_at queries.
class RegionLocator {
 public:
  RegionLocator(const PolygonalPartition& part, const Lattice2D& lat);

  double n2_at(const Vec2& x) const;

 private:
  struct Candidate {
    std::vector<Vec2> polygon;
    Vec2 lo, hi;
    double n2;
    int region_index;
  };
  Lattice2D lat_;
  double background_;
  std::vector<Candidate> candidates_;  // region order preserved
};

// One angular sector at a corner: opening angle and the n^2 inside it.
struct CornerSector {
  double opening;
  double n2;
};

// Interface corner: location, absolute angle of the first interface ray,
// and the counterclockwise sector decomposition (openings sum to 2 pi).
struct CornerSpec {
  Vec2 location;
  double start_angle = 0.0;
  std::vector<CornerSector> sectors;

  int sector_count() const { return static_cast<int>(sectors.size()); }
};

// All material-interface corners of the partition. Polygon vertices within
// 1e-9 are merged; vertices whose surroundings reduce to a single material
// or to a flat two-sided interface are not corners.
std::vector<CornerSpec> extract_corners(const PolygonalPartition& part,
                                        const Lattice2D& lat);

}  // namespace pcfband

#endif  // PCFBAND_GEOMETRY_HPP
