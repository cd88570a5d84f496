#pragma once

#include <cstdint>

#include "dslab/grid.hpp"
#include "dslab/incidence.hpp"

namespace dslab {

/// Columns one cell wide at x = k * 2^(-m/2), k = 0 .. 2^(m/2)-1, each of
/// height 2^(-m/2), sitting on y = 0. Total measure exactly 2^-m. m even.
DiscretizedSet train_track(int m);

/// Two-ended Cantor iteration on [1, 2]: each surviving block keeps its
/// leftmost and rightmost sub-block at the dyadic shrink ratio nearest
/// 2^(-1/alpha), descending to cell level. alpha = 1 keeps the interval.
DiscretizedSet cantor_1d(int m, double alpha);

/// One cell at each 1 + k * 2^(-m/2) within [1, 2]. m even.
DiscretizedSet ap_set(int m);

/// One cell at each (1 + 2^(-m/2))^k within [1, 2), consecutive duplicates
/// keeping the lower-indexed cell. m even.
DiscretizedSet gp_set(int m);

/// Seeded random dyadic-cascade set: each node keeps one or two children
/// (dim 1) or 1..4 children (dim 2) with mean 2^alpha, certified post hoc;
/// the seed advances on failed certification up to a bounded retry budget.
DiscretizedSet random_delta_alpha(int m, double alpha, std::uint64_t seed,
                                  int dim = 1,
                                  const ToleranceProfile& tol = ToleranceProfile{});

/// Cartesian product of two 1D sets at the same resolution; exact product
/// measure.
DiscretizedSet product_2d(const DiscretizedSet& a, const DiscretizedSet& b);

/// Tubes along segments y = s*x + b over x in [1, 2], slopes from the
/// delta-step grid on [0, 1] deduplicated to delta-separated directions,
/// intercepts cycling through the occupied cells of a; each tube's occupied
/// part is restricted to the columns where a is occupied.
TubeFamily ring_tube_family(const DiscretizedSet& a, int m);

/// n evenly spread directions through a common point (unit length tubes).
TubeFamily bush_tube_family(int m, int n, Vec2 center = {0.5, 0.5});

/// n seeded random tubes with distinct direction indices (hence
/// delta-separated) and centers in the middle of the domain.
TubeFamily random_tube_family(int m, int n, std::uint64_t seed);

}  // namespace dslab
