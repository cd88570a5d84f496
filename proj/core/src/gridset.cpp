#include "dslab/gridset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dslab {

namespace {

double cell_measure(const GridSpec& g) {
  const double d = g.delta();
  return g.dim == 1 ? d : d * d;
}

// Worst (2K+1)-window count over all grid centers, via prefix sums.
void worst_window(const CellPrefix& pre, const GridSpec& g, std::int64_t K,
                  std::int64_t* best, std::int64_t* bx, std::int64_t* by) {
  *best = -1;
  for (std::int64_t y = 0; y < g.ny; ++y) {
    for (std::int64_t x = 0; x < g.nx; ++x) {
      const std::int64_t c =
          pre.rect(x - K, y - (g.dim == 2 ? K : 0), x + K + 1,
                   y + (g.dim == 2 ? K : 0) + 1);
      if (c > *best) {
        *best = c;
        *bx = x;
        *by = y;
      }
    }
  }
}

}  // namespace

double measure(const DiscretizedSet& s) { return s.measure(); }

double ball_mass(const DiscretizedSet& s, std::int64_t cx, std::int64_t cy, double r) {
  const GridSpec& g = s.grid();
  int j = 0;
  if (!detail::dyadic_radius_exponent(r, g.m, &j))
    throw std::invalid_argument("ball_mass: radius must be dyadic in [delta, 1]");
  if (cx < 0 || cx >= g.nx || cy < 0 || cy >= g.ny)
    throw std::invalid_argument("ball_mass: center outside extent");
  const std::int64_t K = std::int64_t{1} << (g.m - j);
  CellPrefix pre(s);
  const std::int64_t c = pre.rect(cx - K, cy - (g.dim == 2 ? K : 0), cx + K + 1,
                                  cy + (g.dim == 2 ? K : 0) + 1);
  return c * cell_measure(g);
}

double ConcentrationReport::worst_ratio() const {
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.ratio);
  return worst;
}

ConcentrationReport check_delta_alpha(const DiscretizedSet& s, double alpha,
                                      const ToleranceProfile& tol) {
  tol.validate();
  if (s.empty()) throw std::invalid_argument("check_delta_alpha: empty set");
  const GridSpec& g = s.grid();
  if (!(alpha > 0) || alpha > g.dim)
    throw std::invalid_argument("check_delta_alpha: alpha must be in (0, dim]");

  ConcentrationReport rep;
  rep.alpha = alpha;
  rep.allowed_ratio = tol.conc_factor;
  rep.pass = true;

  CellPrefix pre(s);
  const double cm = cell_measure(g);
  for (int j = 0; j <= g.m; ++j) {
    const std::int64_t K = std::int64_t{1} << (g.m - j);
    ConcentrationRow row;
    row.j = j;
    row.r = std::ldexp(1.0, -j);
    std::int64_t best = 0;
    worst_window(pre, g, K, &best, &row.cx, &row.cy);
    row.worst_mass = best * cm;
    // denominator delta^dim * (r/delta)^alpha = delta^dim * K^alpha
    row.ratio = best * std::exp2(-alpha * (g.m - j));
    if (row.ratio > rep.allowed_ratio && rep.pass) {
      rep.pass = false;
      rep.failing_j = j;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

DiscretizedSet thicken(const DiscretizedSet& s, int k) {
  if (k < 0) throw std::invalid_argument("thicken: k must be >= 0");
  if (k == 0) return s;
  const GridSpec& g = s.grid();
  const std::int64_t nw = (g.nx + 63) / 64;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(nw * g.ny), 0);
  // horizontal dilation per row
  for (std::int64_t y = 0; y < g.ny; ++y) {
    std::vector<std::uint64_t> row(nw, 0);
    for (std::int64_t x = 0; x < g.nx; ++x)
      if (s.test(x, y)) row[x >> 6] |= std::uint64_t{1} << (x & 63);
    for (int d = -k; d <= k; ++d) {
      for (std::int64_t x = 0; x < g.nx; ++x) {
        const std::int64_t sx = x - d;
        if (sx < 0 || sx >= g.nx) continue;
        if ((row[sx >> 6] >> (sx & 63)) & 1)
          rows[y * nw + (x >> 6)] |= std::uint64_t{1} << (x & 63);
      }
    }
  }
  SetBuilder out(g);
  for (std::int64_t y = 0; y < g.ny; ++y) {
    const std::int64_t ylo = g.dim == 2 ? std::max<std::int64_t>(0, y - k) : y;
    const std::int64_t yhi = g.dim == 2 ? std::min(g.ny - 1, y + k) : y;
    for (std::int64_t x = 0; x < g.nx; ++x) {
      bool on = false;
      for (std::int64_t sy = ylo; sy <= yhi && !on; ++sy)
        on = (rows[sy * nw + (x >> 6)] >> (x & 63)) & 1;
      if (on) out.set(x, y);
    }
  }
  return out.build();
}

RefineResult refine_decompose(const DiscretizedSet& s, double alpha,
                              const ToleranceProfile& tol) {
  tol.validate();
  const GridSpec& g = s.grid();
  if (!(alpha > 0) || alpha > g.dim)
    throw std::invalid_argument("refine_decompose: alpha must be in (0, dim]");
  const double slack = tol.refinement_slack(g.m);
  const double mass_bound =
      tol.conc_factor * slack * std::exp2(-(g.dim - alpha) * g.m);
  if (s.measure() > mass_bound)
    throw std::invalid_argument("refine_decompose: measure exceeds delta^(dim-alpha) within tolerance");

  CellPrefix pre(s);
  const double cm = cell_measure(g);

  RefineResult res{DiscretizedSet(g), {}};
  std::vector<std::uint64_t> layer_union(s.words().size(), 0);

  for (int jp = g.m - 1; jp >= 1; --jp) {
    const std::int64_t K = std::int64_t{1} << (g.m - jp);
    const double threshold =
        slack * std::exp2(-g.dim * g.m) * std::exp2(alpha * (g.m - jp));
    SetBuilder layer(g);
    bool nonempty = false;
    for (std::int64_t y = 0; y < g.ny; ++y) {
      for (std::int64_t x = 0; x < g.nx; ++x) {
        const std::int64_t c = pre.rect(x - K, y - (g.dim == 2 ? K : 0), x + K + 1,
                                        y + (g.dim == 2 ? K : 0) + 1);
        if (c * cm >= threshold) {
          layer.set(x, y);
          nonempty = true;
        }
      }
    }
    RefineLayer out;
    out.jprime = jp;
    out.scale = std::ldexp(1.0, -jp);
    out.cells = layer.build();
    // Cover count: distinct scale-aligned dyadic cubes touching the layer.
    std::map<std::pair<std::int64_t, std::int64_t>, bool> cubes;
    out.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
      cubes[{detail::floor_div(x + g.ox, K), detail::floor_div(y + g.oy, K)}] = true;
    });
    out.cover_count = static_cast<std::int64_t>(cubes.size());
    out.cover_bound = tol.conc_factor * slack * std::exp2(alpha * jp);
    out.within_bound = out.cover_count <= out.cover_bound;
    if (!out.within_bound) res.covers_ok = false;
    if (nonempty) {
      const auto& lw = out.cells.words();
      for (std::size_t i = 0; i < layer_union.size(); ++i) layer_union[i] |= lw[i];
    }
    res.layers.push_back(std::move(out));
  }

  std::vector<std::uint64_t> core_words(s.words());
  for (std::size_t i = 0; i < core_words.size(); ++i) core_words[i] &= ~layer_union[i];
  res.core = DiscretizedSet(g, std::move(core_words));
  return res;
}

SeparationResult separate(const DiscretizedSet& s, const ToleranceProfile& tol) {
  tol.validate();
  if (s.empty()) throw std::invalid_argument("separate: empty set");
  const GridSpec& g = s.grid();
  const std::int64_t total = s.cell_count();
  const std::int64_t limit_num = total;  // cube mass <= total / 10^dim
  const std::int64_t limit_den = g.dim == 1 ? 10 : 100;

  int level = g.m;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> masses;
  for (int j = 0; j <= g.m; ++j) {
    const std::int64_t K = std::int64_t{1} << (g.m - j);
    masses.clear();
    s.for_each_cell([&](std::int64_t x, std::int64_t y) {
      masses[{detail::floor_div(x + g.ox, K), detail::floor_div(y + g.oy, K)}]++;
    });
    std::int64_t worst = 0;
    for (const auto& [k, v] : masses) worst = std::max(worst, v);
    if (worst * limit_den <= limit_num) {
      level = j;
      break;
    }
    level = j;  // fall through to cells if nothing coarser qualifies
  }

  const std::int64_t K = std::int64_t{1} << (g.m - level);
  masses.clear();
  s.for_each_cell([&](std::int64_t x, std::int64_t y) {
    masses[{detail::floor_div(x + g.ox, K), detail::floor_div(y + g.oy, K)}]++;
  });

  std::vector<RankedCube> ranked;
  ranked.reserve(masses.size());
  for (const auto& [k, v] : masses)
    ranked.push_back({DyadicCube{level, k.first, k.second}, v});
  std::sort(ranked.begin(), ranked.end(), [](const RankedCube& a, const RankedCube& b) {
    if (a.cells != b.cells) return a.cells > b.cells;
    if (a.cube.ix != b.cube.ix) return a.cube.ix < b.cube.ix;
    return a.cube.iy < b.cube.iy;
  });
  const std::size_t keep = std::min<std::size_t>(
      ranked.size(), g.dim == 1 ? 5 : 25);
  ranked.resize(keep);

  // Pick the non-adjacent pair with the largest sup-norm index gap;
  // lexicographic rank order breaks ties.
  std::int64_t best_gap = -1;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    for (std::size_t j = i + 1; j < ranked.size(); ++j) {
      const std::int64_t gap =
          std::max(std::llabs(ranked[i].cube.ix - ranked[j].cube.ix),
                   std::llabs(ranked[i].cube.iy - ranked[j].cube.iy));
      if (gap >= 2 && gap > best_gap) {
        best_gap = gap;
        bi = i;
        bj = j;
      }
    }
  }
  if (best_gap < 0) throw std::domain_error("separate: cannot separate (all top cubes adjacent)");

  auto restrict_to = [&](const DyadicCube& q) {
    SetBuilder b(g);
    s.for_each_cell([&](std::int64_t x, std::int64_t y) {
      if (detail::floor_div(x + g.ox, K) == q.ix &&
          detail::floor_div(y + g.oy, K) == q.iy)
        b.set(x, y);
    });
    return b.build();
  };

  SeparationResult res{restrict_to(ranked[bi].cube), ranked[bi].cube,
                       restrict_to(ranked[bj].cube), ranked[bj].cube, level,
                       std::move(ranked)};
  return res;
}

}  // namespace dslab
