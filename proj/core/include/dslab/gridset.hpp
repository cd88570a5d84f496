#pragma once

#include <optional>
#include <vector>

#include "dslab/grid.hpp"

namespace dslab {

/// Exact measure cell_count * delta^dim.
double measure(const DiscretizedSet& s);

/// Mass of s inside the closed sup-norm ball of dyadic radius r around the
/// center of the given grid-relative cell: the (2K+1)-cell window per axis,
/// K = r/delta, clipped to the extent. r must be 2^-j with j in [0, m].
double ball_mass(const DiscretizedSet& s, std::int64_t cx, std::int64_t cy, double r);

struct ConcentrationRow {
  int j = 0;               // radius 2^-j
  double r = 0.0;
  double worst_mass = 0.0;
  std::int64_t cx = 0, cy = 0;  // grid-relative worst center
  double ratio = 0.0;           // worst_mass / (delta^dim * (r/delta)^alpha)
};

struct ConcentrationReport {
  double alpha = 0.0;
  double allowed_ratio = 0.0;
  std::vector<ConcentrationRow> rows;  // coarse radius first (j ascending)
  bool pass = false;
  std::optional<int> failing_j;

  double worst_ratio() const;
};

/// Scans every dyadic radius r in [delta, 1] and every grid cell center,
/// reporting the worst ball mass per radius. Passes when every ratio is at
/// most tol.conc_factor.
ConcentrationReport check_delta_alpha(const DiscretizedSet& s, double alpha,
                                      const ToleranceProfile& tol);

/// Minkowski sum with the sup-norm ball of radius k cells, clipped to the
/// extent of s (the grid does not grow).
DiscretizedSet thicken(const DiscretizedSet& s, int k);

struct RefineLayer {
  int jprime = 0;      // scale 2^-jprime
  double scale = 0.0;
  DiscretizedSet cells;
  std::int64_t cover_count = 0;  // dyadic scale-cubes touching the layer
  double cover_bound = 0.0;      // conc_factor * slack * scale^-alpha
  bool within_bound = false;
};

struct RefineResult {
  DiscretizedSet core;
  std::vector<RefineLayer> layers;
  bool covers_ok = true;  // all layers within their cover bounds
};

/// Splits s into heavy layers (one per dyadic scale 2delta..1/2, the cells
/// whose scale-ball mass reaches slack * delta^dim * (scale/delta)^alpha)
/// and a residual core with those cells removed. The union of core and all
/// layers always contains s. Requires measure(s) within the tolerance's
/// slack of delta^(dim-alpha).
RefineResult refine_decompose(const DiscretizedSet& s, double alpha,
                              const ToleranceProfile& tol);

struct RankedCube {
  DyadicCube cube;
  std::int64_t cells = 0;
};

struct SeparationResult {
  DiscretizedSet s1;
  DyadicCube q1;
  DiscretizedSet s2;
  DyadicCube q2;
  int level = 0;                 // chosen cube level
  std::vector<RankedCube> top;   // up to 5^dim heaviest cubes, ranked
};

/// Partitions the domain into dyadic cubes at the coarsest level where no
/// cube holds more than 10^-dim of the mass, ranks the heaviest 5^dim
/// cubes, and returns the restriction of s to the two non-adjacent cubes
/// with the largest sup-norm gap. Throws std::domain_error when every pair
/// of top cubes is adjacent.
SeparationResult separate(const DiscretizedSet& s, const ToleranceProfile& tol);

}  // namespace dslab
