#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dslab/grid.hpp"

namespace dslab {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct Box2 {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  static Box2 of_cube(const DyadicCube& q);
};

/// A thin rectangle ("tube"): unit-scale length, width a few cells, with the
/// occupied part stored as a 2D set. Direction is canonicalized to angle in
/// [0, pi).
struct Tube {
  Vec2 direction;
  Vec2 center;
  double length = 1.0;
  double width = 0.0;
  DiscretizedSet cells;

  double angle() const;  // in [0, pi)
};

class TubeFamily {
 public:
  TubeFamily(int m, std::vector<Tube> tubes);  // validates delta-separation

  int resolution() const { return m_; }
  double delta() const;
  const std::vector<Tube>& tubes() const { return tubes_; }
  std::size_t size() const { return tubes_.size(); }

 private:
  int m_;
  std::vector<Tube> tubes_;
};

/// Projective-linear map of the plane via a nonsingular 3x3 matrix acting on
/// homogeneous coordinates (x, y, 1), row-major storage.
struct ProjectiveMap {
  std::array<double, 9> a{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static ProjectiveMap identity();
  static ProjectiveMap translation(double dx, double dy);

  /// Homogeneous image; w may be ~0 near the preimage of the line at infinity.
  void apply_h(double x, double y, double* X, double* Y, double* W) const;
  double det() const;
  /// Jacobian determinant of the planar map at (x, y): det / w^3.
  double jacobian(double x, double y) const;
  ProjectiveMap compose(const ProjectiveMap& inner) const;  // this after inner
};

/// Outer cover of { |x - y| : x in k1, y in k2 } on the 1D grid at the same
/// resolution: per occupied cell pair, the exact min/max Euclidean distance
/// between the two closed cells spans the marked cells.
DiscretizedSet distance_set(const DiscretizedSet& k1, const DiscretizedSet& k2);

struct TripleMeasure {
  std::int64_t raw_count = 0;
  double measure = 0.0;  // raw_count * delta^6
};

/// Counts occupied cell triples (x0, x1, x2) whose pairwise distance
/// intervals (x0,x1) and (x0,x2) both meet d. A direct triple loop runs when
/// the candidate count is at most 2^24; beyond that the per-x0 factorized
/// count (exactly equal) is used.
TripleMeasure bilinear_triple_measure(const DiscretizedSet& e0,
                                      const DiscretizedSet& e1,
                                      const DiscretizedSet& e2,
                                      const DiscretizedSet& d);

/// Exact minimum of |(x1-x0) ^ (x2-x0)| over the corner triples of three
/// boxes; returns 0 when the multi-affine wedge changes sign over the
/// corners (a zero then exists inside).
double wedge_min(const Box2& q0, const Box2& q1, const Box2& q2);

struct PairMeasure {
  std::int64_t raw_count = 0;
  double measure = 0.0;  // raw_count * delta^4
};

/// Measure of the union over tubes of (E cap R)^2 in the 4-dimensional
/// product; cell pairs counted once even when shared by several tubes.
PairMeasure furstenberg_pair_measure(const DiscretizedSet& e, const TubeFamily& fam);

struct KakeyaEntry {
  double angle = 0.0;
  double value = 0.0;
  double anchor_s = 0.0;  // along-direction offset of the best rectangle
  double anchor_t = 0.0;  // perpendicular offset
};

struct KakeyaProfile {
  double delta = 0.0;
  std::vector<KakeyaEntry> entries;

  double max_value() const;
};

/// Discrete Kakeya maximal function: for each direction sampled at angle
/// step delta, the best occupied fraction of cell centers over 1 x delta
/// rectangles anchored on the delta-grid in the rotated frame. Values are
/// occupied/total center counts, hence always in [0, 1].
KakeyaProfile kakeya_maximal(const DiscretizedSet& f_set);

struct CordobaNorms {
  double l2_sq = 0.0;                     // sum over tube pairs of overlap area
  double sum_areas = 0.0;                 // diagonal part
  std::vector<std::int64_t> overlap_cells;  // n x n shared-cell counts, row-major
  std::size_t n = 0;

  double overlap_area(std::size_t i, std::size_t j, int m) const;
};

/// Exact pairwise overlap table |R_i cap R_j| from cell intersections,
/// together with the squared L2 norm of the tube-count function.
CordobaNorms cordoba_norms(const TubeFamily& fam);

struct ProjectedSet {
  DiscretizedSet image;
  double jac_min = 0.0;
  double jac_max = 0.0;
};

/// Outer cover of the projective image: each occupied cell's four mapped
/// corners span a bounding box rasterized onto out_grid. Throws
/// std::domain_error when the set meets the preimage of the line at
/// infinity or the image leaves out_grid.
ProjectedSet projective_apply(const ProjectiveMap& map, const DiscretizedSet& s,
                              const GridSpec& out_grid);

/// Smallest grid at the source resolution containing the mapped corners.
GridSpec projective_fit_grid(const ProjectiveMap& map, const DiscretizedSet& s);

/// The neighborhood of radius width_cells * delta around the perpendicular
/// bisector segment of x0 and x0p (length 2, centered at their midpoint),
/// clipped to the domain and rasterized at resolution m.
Tube bisector_tube(Vec2 x0, Vec2 x0p, int width_cells, int m);

/// Rasterizes the rectangle with the given axis: cells at resolution m whose
/// centers lie within half_width of the axis line and half_length along it.
DiscretizedSet rasterize_rectangle(Vec2 center, Vec2 direction, double half_length,
                                   double half_width, int m);

}  // namespace dslab
