#include "dslab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dslab/gridset.hpp"

namespace dslab {

namespace {

void require_even(int m, const char* who) {
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument(std::string(who) + ": m must be even and >= 2");
}

bool coin(std::mt19937_64& rng, double p) {
  return (rng() >> 11) * 0x1.0p-53 < p;
}

}  // namespace

DiscretizedSet train_track(int m) {
  require_even(m, "train_track");
  const std::int64_t P = std::int64_t{1} << (m / 2);  // cells per column; column pitch
  SetBuilder b(GridSpec::plane(m, 0, 0, std::int64_t{1} << m, P));
  for (std::int64_t k = 0; k < P; ++k)
    for (std::int64_t y = 0; y < P; ++y) b.set(k * P, y);
  return b.build();
}

DiscretizedSet cantor_1d(int m, double alpha) {
  if (m < 2) throw std::invalid_argument("cantor_1d: m must be >= 2");
  if (!(alpha > 0) || alpha > 1)
    throw std::invalid_argument("cantor_1d: alpha must be in (0, 1]");
  const int shrink = std::max(1, static_cast<int>(std::lround(1.0 / alpha)));
  const std::int64_t base = std::int64_t{1} << m;  // cell index of 1.0

  SetBuilder b(GridSpec::line(m, base, base));
  struct Block {
    std::int64_t start;
    std::int64_t len;
  };
  std::vector<Block> blocks{{base, base}};
  while (blocks.front().len >> shrink >= 1) {
    std::vector<Block> next;
    next.reserve(blocks.size() * 2);
    const std::int64_t child = blocks.front().len >> shrink;
    for (const Block& blk : blocks) {
      next.push_back({blk.start, child});
      if (blk.start + blk.len - child != blk.start)  // shrink == 0 keeps one copy
        next.push_back({blk.start + blk.len - child, child});
    }
    blocks = std::move(next);
  }
  for (const Block& blk : blocks)
    for (std::int64_t i = 0; i < blk.len; ++i) b.set_abs(blk.start + i);
  return b.build();
}

DiscretizedSet ap_set(int m) {
  require_even(m, "ap_set");
  const std::int64_t P = std::int64_t{1} << (m / 2);
  const std::int64_t base = std::int64_t{1} << m;
  SetBuilder b(GridSpec::line(m, base, base));
  for (std::int64_t k = 0; k < P; ++k) b.set_abs(base + k * P);
  return b.build();
}

DiscretizedSet gp_set(int m) {
  require_even(m, "gp_set");
  const std::int64_t base = std::int64_t{1} << m;
  const double ratio = 1.0 + std::ldexp(1.0, -m / 2);
  SetBuilder b(GridSpec::line(m, base, base));
  double v = 1.0;
  std::int64_t prev = -1;
  while (v < 2.0) {
    const auto cell = static_cast<std::int64_t>(std::floor(v * base));
    if (cell >= 2 * base) break;
    if (cell != prev) {
      b.set_abs(cell);
      prev = cell;
    }
    v *= ratio;
  }
  return b.build();
}

DiscretizedSet random_delta_alpha(int m, double alpha, std::uint64_t seed, int dim,
                                  const ToleranceProfile& tol) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("random_delta_alpha: dim 1 or 2");
  if (!(alpha > 0) || alpha > dim)
    throw std::invalid_argument("random_delta_alpha: alpha in (0, dim]");
  const int children = dim == 1 ? 2 : 4;
  const double mean = std::exp2(alpha);

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL);
    // descend the dyadic tree over [1,2] (1D) or [0,1]^2 (2D)
    struct Node {
      std::int64_t x, y;
      int level;
    };
    std::vector<Node> frontier{{dim == 1 ? std::int64_t{1} : std::int64_t{0}, 0, 0}};
    for (int lvl = 0; lvl < m; ++lvl) {
      std::vector<Node> next;
      next.reserve(frontier.size() * 2);
      for (const Node& nd : frontier) {
        bool kept[4] = {false, false, false, false};
        int n_kept = 0;
        for (int c = 0; c < children; ++c) {
          // keep with probability mean/children, at least one forced below
          if (coin(rng, mean / children)) {
            kept[c] = true;
            ++n_kept;
          }
        }
        if (n_kept == 0) kept[rng() % children] = true;
        for (int c = 0; c < children; ++c) {
          if (!kept[c]) continue;
          Node ch;
          ch.level = lvl + 1;
          ch.x = 2 * nd.x + (c & 1);
          ch.y = dim == 2 ? 2 * nd.y + (c >> 1) : 0;
          next.push_back(ch);
        }
      }
      frontier = std::move(next);
    }
    GridSpec g = dim == 1
                     ? GridSpec::line(m, std::int64_t{1} << m, std::int64_t{1} << m)
                     : GridSpec::plane(m, 0, 0, std::int64_t{1} << m, std::int64_t{1} << m);
    SetBuilder b(g);
    for (const Node& nd : frontier) b.set_abs(nd.x, nd.y);
    DiscretizedSet s = b.build();

    const double target = std::exp2(-(dim - alpha) * m);
    if (s.measure() < target / 4 || s.measure() > 4 * target) continue;
    if (!check_delta_alpha(s, alpha, tol).pass) continue;
    return s;
  }
  throw std::runtime_error("random_delta_alpha: retries exhausted without certification");
}

DiscretizedSet product_2d(const DiscretizedSet& a, const DiscretizedSet& b) {
  if (a.dim() != 1 || b.dim() != 1)
    throw std::invalid_argument("product_2d: operands must be 1D");
  if (a.resolution() != b.resolution())
    throw std::invalid_argument("product_2d: operands must share m");
  const GridSpec& ga = a.grid();
  const GridSpec& gb = b.grid();
  SetBuilder out(GridSpec::plane(ga.m, ga.ox, gb.ox, ga.nx, gb.nx));
  b.for_each_cell([&](std::int64_t xb, std::int64_t) {
    a.for_each_cell([&](std::int64_t xa, std::int64_t) { out.set(xa, xb); });
  });
  return out.build();
}

namespace {

constexpr double kPi = std::numbers::pi;

Tube make_segment_tube(Vec2 p0, Vec2 p1, double half_width, int m) {
  Tube t;
  t.center = {(p0.x + p1.x) / 2, (p0.y + p1.y) / 2};
  const double len = std::hypot(p1.x - p0.x, p1.y - p0.y);
  Vec2 dir{(p1.x - p0.x) / len, (p1.y - p0.y) / len};
  if (dir.y < 0 || (dir.y == 0 && dir.x < 0)) {
    dir.x = -dir.x;
    dir.y = -dir.y;
  }
  t.direction = dir;
  t.length = len;
  t.width = 2 * half_width;
  t.cells = rasterize_rectangle(t.center, t.direction, len / 2, half_width, m);
  return t;
}

}  // namespace

TubeFamily ring_tube_family(const DiscretizedSet& a, int m) {
  if (a.dim() != 1) throw std::invalid_argument("ring_tube_family: a must be 1D");
  if (a.empty()) throw std::invalid_argument("ring_tube_family: empty set");
  if (a.resolution() != m)
    throw std::invalid_argument("ring_tube_family: resolution mismatch");
  const std::int64_t base = std::int64_t{1} << m;
  const double d = std::ldexp(1.0, -m);
  const auto cells = a.cells_abs();
  for (const auto& [gx, gy] : cells)
    if (gx < base || gx >= 2 * base)
      throw std::invalid_argument("ring_tube_family: a must lie in [1, 2]");

  std::vector<Tube> tubes;
  double last_angle = -1.0;
  std::size_t pick = 0;
  for (std::int64_t k = 0; k <= base; ++k) {
    const double slope = k * d;
    const double angle = std::atan(slope);
    if (!tubes.empty() && angle - last_angle < d) continue;  // keep delta-separated
    const double intercept = (cells[pick % cells.size()].first + 0.5) * d;
    pick++;
    Tube t = make_segment_tube({1.0, slope * 1.0 + intercept},
                               {2.0, slope * 2.0 + intercept}, d, m);
    // restrict the occupied part to the columns where a is occupied
    const GridSpec& tg = t.cells.grid();
    SetBuilder masked(tg);
    t.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
      if (a.test_abs(x + tg.ox)) masked.set(x, y);
    });
    t.cells = masked.build();
    tubes.push_back(std::move(t));
    last_angle = angle;
  }
  return TubeFamily(m, std::move(tubes));
}

TubeFamily bush_tube_family(int m, int n, Vec2 center) {
  if (n < 1) throw std::invalid_argument("bush_tube_family: n must be >= 1");
  const double d = std::ldexp(1.0, -m);
  const int n_dirs = static_cast<int>(std::floor(kPi / d));
  if (n > n_dirs) throw std::invalid_argument("bush_tube_family: too many directions");
  const int step = n_dirs / n;
  std::vector<Tube> tubes;
  tubes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double theta = (i * step) * d;
    Tube t;
    t.center = center;
    t.direction = {std::cos(theta), std::sin(theta)};
    if (t.direction.y < 0) {
      t.direction.x = -t.direction.x;
      t.direction.y = -t.direction.y;
    }
    t.length = 1.0;
    t.width = 2 * d;
    t.cells = rasterize_rectangle(t.center, t.direction, 0.5, d, m);
    tubes.push_back(std::move(t));
  }
  return TubeFamily(m, std::move(tubes));
}

TubeFamily random_tube_family(int m, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_tube_family: n must be >= 1");
  const double d = std::ldexp(1.0, -m);
  const int n_dirs = static_cast<int>(std::floor(kPi / d));
  if (n > n_dirs) throw std::invalid_argument("random_tube_family: too many directions");
  std::mt19937_64 rng(seed);

  // distinct direction indices => pairwise separation at least delta
  std::vector<int> idx(static_cast<std::size_t>(n_dirs));
  for (int i = 0; i < n_dirs; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n; ++i) {
    const auto j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n_dirs - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }

  std::vector<Tube> tubes;
  tubes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double theta = idx[static_cast<std::size_t>(i)] * d;
    Tube t;
    t.center = {0.3 + 0.4 * ((rng() >> 11) * 0x1.0p-53),
                0.3 + 0.4 * ((rng() >> 11) * 0x1.0p-53)};
    t.direction = {std::cos(theta), std::sin(theta)};
    if (t.direction.y < 0) {
      t.direction.x = -t.direction.x;
      t.direction.y = -t.direction.y;
    }
    t.length = 1.0;
    t.width = 2 * d;
    t.cells = rasterize_rectangle(t.center, t.direction, 0.5, d, m);
    tubes.push_back(std::move(t));
  }
  return TubeFamily(m, std::move(tubes));
}

}  // namespace dslab
