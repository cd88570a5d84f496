#pragma once

#include <vector>

#include "dslab/grid.hpp"

namespace dslab {

/// A cover of a set by disjoint dyadic cubes, with cost sum l(Q)^alpha.
/// Costs are evaluated canonically from per-level cube counts so that equal
/// covers compare exactly equal; `counts[j]` is the number of cubes of side
/// 2^-j in the cover.
struct CoverSolution {
  std::vector<DyadicCube> cubes;
  double alpha = 0.0;
  double max_side = 1.0;  // the cap c: no cube side exceeds this
  std::vector<std::int64_t> counts;
  double cost = 0.0;

  /// Recomputes the cost from the per-level counts; equals `cost` exactly.
  double recompute_cost() const;
};

/// Canonical evaluation of sum_j counts[j] * (2^-j)^alpha, level 0 first.
long double cover_cost_value(const std::vector<std::int64_t>& counts, double alpha);

/// Exact minimizer of sum l(Q)^alpha over covers of s by disjoint dyadic
/// cubes with side in [delta, max_side], by a bottom-up fold over the dyadic
/// tree. Ties between keeping a cube and splitting it resolve to the
/// coarser cube. max_side must be 2^-j for some j in [0, m].
CoverSolution optimal_dyadic_cover(const DiscretizedSet& s, double alpha,
                                   double max_side);

/// Checks that for every dyadic cube I with side <= max_side, the chosen
/// cubes inside I cost at most l(I)^alpha. Returns true when no violation
/// exists (the replacement argument makes this a structural guarantee).
bool verify_cover_local_optimality(const CoverSolution& sol, int m);

struct ContentBound {
  double value = 0.0;        // optimal dyadic-cube cover cost
  double alpha = 0.0;
  double c = 1.0;
  double ball_upper_factor = 1.0;   // ball-based content <= value * this
  double dyadic_lower_factor = 1.0; // value <= this * ball content at cap 2c
  std::int64_t cube_count = 0;
};

/// Dyadic-cube Hausdorff-content surrogate at cap c, with the comparison
/// factors to ball-based content reported alongside.
ContentBound content_upper(const DiscretizedSet& s, double alpha, double c);

struct ScaleList {
  double eps = 0.0;
  std::vector<int> exponents;   // scale 2^-e, strictly increasing e
  std::vector<double> scales;   // descending values
};

/// All scales 2^-floor((1+eps)^k) that are >= delta_min, descending,
/// duplicates removed.
ScaleList hyperdyadic_scales(double eps, double delta_min);

}  // namespace dslab
