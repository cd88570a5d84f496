#include "dslab/covers.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dslab {

long double cover_cost_value(const std::vector<std::int64_t>& counts, double alpha) {
  long double v = 0.0L;
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j]) v += static_cast<long double>(counts[j]) *
                        exp2l(-static_cast<long double>(alpha) * j);
  return v;
}

double CoverSolution::recompute_cost() const {
  return static_cast<double>(cover_cost_value(counts, alpha));
}

namespace {

struct NodeResult {
  std::vector<std::int64_t> counts;
  std::vector<DyadicCube> cubes;
};

struct DpContext {
  const DiscretizedSet* s;
  const CellPrefix* pre;
  int m;
  int dim;
  int min_level;  // coarsest level a cube may be kept at (side <= max_side)
  double alpha;
};

void add_counts(std::vector<std::int64_t>& acc, const std::vector<std::int64_t>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
}

// Occupancy of the cube (level, ix, iy) against the set's extent.
bool cube_occupied(const DpContext& c, int level, std::int64_t ix, std::int64_t iy) {
  const std::int64_t K = std::int64_t{1} << (c.m - level);
  const GridSpec& g = c.s->grid();
  return c.pre->rect(ix * K - g.ox, c.dim == 2 ? iy * K - g.oy : 0,
                     (ix + 1) * K - g.ox, c.dim == 2 ? (iy + 1) * K - g.oy : 1) > 0;
}

NodeResult solve(const DpContext& c, int level, std::int64_t ix, std::int64_t iy) {
  NodeResult keep;
  keep.counts.assign(c.m + 1, 0);
  if (!cube_occupied(c, level, ix, iy)) return keep;  // empty: cost 0

  if (level == c.m) {  // single cell, always admissible (max_side >= delta)
    keep.counts[level] = 1;
    keep.cubes.push_back({level, ix, iy});
    return keep;
  }

  NodeResult split;
  split.counts.assign(c.m + 1, 0);
  for (int cx = 0; cx < 2; ++cx) {
    const int cy_max = c.dim == 2 ? 2 : 1;
    for (int cy = 0; cy < cy_max; ++cy) {
      NodeResult child = solve(c, level + 1, 2 * ix + cx, 2 * iy + cy);
      add_counts(split.counts, child.counts);
      split.cubes.insert(split.cubes.end(), child.cubes.begin(), child.cubes.end());
    }
  }
  if (level < c.min_level) return split;  // cube too large to keep

  keep.counts[level] = 1;
  const long double keep_cost = cover_cost_value(keep.counts, c.alpha);
  const long double split_cost = cover_cost_value(split.counts, c.alpha);
  if (keep_cost <= split_cost) {
    keep.cubes.push_back({level, ix, iy});
    return keep;
  }
  return split;
}

}  // namespace

CoverSolution optimal_dyadic_cover(const DiscretizedSet& s, double alpha,
                                   double max_side) {
  if (s.empty()) throw std::invalid_argument("optimal_dyadic_cover: empty set");
  if (!(alpha > 0)) throw std::invalid_argument("optimal_dyadic_cover: alpha must be > 0");
  int min_level = 0;
  if (!detail::dyadic_radius_exponent(max_side, s.resolution(), &min_level))
    throw std::invalid_argument("optimal_dyadic_cover: max_side must be dyadic in [delta, 1]");

  const GridSpec& g = s.grid();
  CellPrefix pre(s);
  DpContext ctx{&s, &pre, g.m, g.dim, min_level, alpha};

  // Fold every unit cube (level 0) intersecting the extent.
  const std::int64_t K0 = std::int64_t{1} << g.m;
  const std::int64_t x0 = detail::floor_div(g.ox, K0);
  const std::int64_t x1 = detail::floor_div(g.ox + g.nx - 1, K0);
  const std::int64_t y0 = g.dim == 2 ? detail::floor_div(g.oy, K0) : 0;
  const std::int64_t y1 = g.dim == 2 ? detail::floor_div(g.oy + g.ny - 1, K0) : 0;

  CoverSolution sol;
  sol.alpha = alpha;
  sol.max_side = max_side;
  sol.counts.assign(g.m + 1, 0);
  for (std::int64_t iy = y0; iy <= y1; ++iy) {
    for (std::int64_t ix = x0; ix <= x1; ++ix) {
      NodeResult r = solve(ctx, 0, ix, iy);
      add_counts(sol.counts, r.counts);
      sol.cubes.insert(sol.cubes.end(), r.cubes.begin(), r.cubes.end());
    }
  }
  sol.cost = static_cast<double>(cover_cost_value(sol.counts, alpha));
  return sol;
}

bool verify_cover_local_optimality(const CoverSolution& sol, int m) {
  int cap_level = 0;
  detail::dyadic_radius_exponent(sol.max_side, m, &cap_level);
  // Accumulate exact per-level counts of chosen cubes under every ancestor.
  std::map<std::tuple<int, std::int64_t, std::int64_t>, std::vector<std::int64_t>> under;
  for (const DyadicCube& q : sol.cubes) {
    std::int64_t ax = q.ix, ay = q.iy;
    for (int lvl = q.level; lvl >= cap_level; --lvl) {
      auto& counts = under[{lvl, ax, ay}];
      if (counts.empty()) counts.assign(m + 1, 0);
      counts[q.level] += 1;
      ax = detail::floor_div(ax, 2);
      ay = detail::floor_div(ay, 2);
    }
  }
  for (const auto& [key, counts] : under) {
    const int lvl = std::get<0>(key);
    std::vector<std::int64_t> anc(m + 1, 0);
    anc[lvl] = 1;
    if (cover_cost_value(counts, sol.alpha) > cover_cost_value(anc, sol.alpha))
      return false;
  }
  return true;
}

ContentBound content_upper(const DiscretizedSet& s, double alpha, double c) {
  CoverSolution sol = optimal_dyadic_cover(s, alpha, c);
  ContentBound out;
  out.value = sol.cost;
  out.alpha = alpha;
  out.c = c;
  // A cube of side l sits in a ball of radius l, so ball content at cap c
  // is at most 2^alpha * value; conversely a ball of radius r is covered by
  // 2^dim dyadic cubes of side at most 2r.
  out.ball_upper_factor = std::exp2(alpha);
  out.dyadic_lower_factor = std::exp2(s.dim()) * std::exp2(alpha);
  out.cube_count = static_cast<std::int64_t>(sol.cubes.size());
  return out;
}

ScaleList hyperdyadic_scales(double eps, double delta_min) {
  if (!(eps > 0)) throw std::invalid_argument("hyperdyadic_scales: eps must be > 0");
  if (!(delta_min > 0) || delta_min > 0.5)
    throw std::invalid_argument("hyperdyadic_scales: delta_min in (0, 1/2]");
  ScaleList out;
  out.eps = eps;
  const int max_exp = static_cast<int>(std::ceil(-std::log2(delta_min)));
  double power = 1.0;  // (1+eps)^k
  for (int k = 0; k < 10000; ++k) {
    const int e = static_cast<int>(std::floor(power));
    if (e > max_exp || std::ldexp(1.0, -e) < delta_min) break;
    if (out.exponents.empty() || out.exponents.back() != e) {
      out.exponents.push_back(e);
      out.scales.push_back(std::ldexp(1.0, -e));
    }
    power *= (1.0 + eps);
  }
  return out;
}

}  // namespace dslab
