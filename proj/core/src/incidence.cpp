#include "dslab/incidence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace dslab {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_of(Vec2 v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

double angle_dist(double a, double b) {
  double d = std::fabs(a - b);
  return std::min(d, kPi - d);
}

// Exact squared min/max Euclidean distance between two closed cells with
// index difference (di, dj), in delta^2 units.
void cell_pair_dist_sq(std::int64_t di, std::int64_t dj, std::int64_t* lo_sq,
                       std::int64_t* hi_sq) {
  di = std::llabs(di);
  dj = std::llabs(dj);
  const std::int64_t gi = std::max<std::int64_t>(di - 1, 0);
  const std::int64_t gj = std::max<std::int64_t>(dj - 1, 0);
  *lo_sq = gi * gi + gj * gj;
  *hi_sq = (di + 1) * (di + 1) + (dj + 1) * (dj + 1);
}

// Marked 1D cell range for a distance interval given by exact squared
// bounds: t with t^2 < hi_sq and (t+1)^2 > lo_sq.
void dist_cell_range(std::int64_t lo_sq, std::int64_t hi_sq, std::int64_t* t0,
                     std::int64_t* t1) {
  *t0 = detail::isqrt(lo_sq);
  std::int64_t r = detail::isqrt(hi_sq);
  if (r * r == hi_sq) --r;
  *t1 = r;
}

struct ColumnView {
  std::int64_t gx;                  // absolute column coordinate
  std::vector<std::uint64_t> bits;  // rows, bit y-relative to grid
  std::int64_t count;
};

std::vector<ColumnView> columns_of(const DiscretizedSet& s) {
  const GridSpec& g = s.grid();
  const std::int64_t words = (g.ny + 63) / 64;
  std::vector<std::vector<std::uint64_t>> cols;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(g.nx), 0);
  cols.assign(static_cast<std::size_t>(g.nx), {});
  s.for_each_cell([&](std::int64_t x, std::int64_t y) {
    auto& c = cols[static_cast<std::size_t>(x)];
    if (c.empty()) c.assign(static_cast<std::size_t>(words), 0);
    c[y >> 6] |= std::uint64_t{1} << (y & 63);
    counts[static_cast<std::size_t>(x)]++;
  });
  std::vector<ColumnView> out;
  for (std::int64_t x = 0; x < g.nx; ++x)
    if (counts[static_cast<std::size_t>(x)])
      out.push_back({x + g.ox, std::move(cols[static_cast<std::size_t>(x)]),
                     counts[static_cast<std::size_t>(x)]});
  return out;
}

}  // namespace

Box2 Box2::of_cube(const DyadicCube& q) {
  const double s = q.side();
  return {q.ix * s, (q.ix + 1) * s, q.iy * s, (q.iy + 1) * s};
}

double Tube::angle() const { return angle_of(direction); }

TubeFamily::TubeFamily(int m, std::vector<Tube> tubes) : m_(m), tubes_(std::move(tubes)) {
  if (m < 0 || m > kMaxResolution) throw std::invalid_argument("TubeFamily: bad m");
  const double d = std::ldexp(1.0, -m);
  if (static_cast<double>(tubes_.size()) > kPi / d + 1)
    throw std::invalid_argument("TubeFamily: more tubes than delta-separated directions");
  for (std::size_t i = 0; i < tubes_.size(); ++i) {
    if (tubes_[i].width > 4 * d + 1e-12)
      throw std::invalid_argument("TubeFamily: tube wider than 4 delta");
    for (std::size_t j = i + 1; j < tubes_.size(); ++j) {
      if (angle_dist(tubes_[i].angle(), tubes_[j].angle()) < d * (1 - 1e-9))
        throw std::invalid_argument("TubeFamily: directions closer than delta");
    }
  }
}

double TubeFamily::delta() const { return std::ldexp(1.0, -m_); }

ProjectiveMap ProjectiveMap::identity() { return ProjectiveMap{}; }

ProjectiveMap ProjectiveMap::translation(double dx, double dy) {
  ProjectiveMap p;
  p.a = {1, 0, dx, 0, 1, dy, 0, 0, 1};
  return p;
}

void ProjectiveMap::apply_h(double x, double y, double* X, double* Y, double* W) const {
  *X = a[0] * x + a[1] * y + a[2];
  *Y = a[3] * x + a[4] * y + a[5];
  *W = a[6] * x + a[7] * y + a[8];
}

double ProjectiveMap::det() const {
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

double ProjectiveMap::jacobian(double x, double y) const {
  const double w = a[6] * x + a[7] * y + a[8];
  return det() / (w * w * w);
}

ProjectiveMap ProjectiveMap::compose(const ProjectiveMap& inner) const {
  ProjectiveMap r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * inner.a[k * 3 + j];
      r.a[i * 3 + j] = s;
    }
  return r;
}

DiscretizedSet distance_set(const DiscretizedSet& k1, const DiscretizedSet& k2) {
  if (k1.dim() != 2 || k2.dim() != 2)
    throw std::invalid_argument("distance_set: inputs must be 2D");
  if (k1.resolution() != k2.resolution())
    throw std::invalid_argument("distance_set: inputs must share m");
  const int m = k1.resolution();
  if (k1.empty() || k2.empty()) return DiscretizedSet(GridSpec::line(m, 0, 1));

  const auto cols1 = columns_of(k1);
  const auto cols2 = columns_of(k2);
  const GridSpec &g1 = k1.grid(), &g2 = k2.grid();

  // Output bound: max hi over extreme index differences.
  const std::int64_t dxm = std::max(std::llabs(g1.ox + g1.nx - g2.ox),
                                    std::llabs(g2.ox + g2.nx - g1.ox));
  const std::int64_t dym = std::max(std::llabs(g1.oy + g1.ny - g2.oy),
                                    std::llabs(g2.oy + g2.ny - g1.oy));
  const std::int64_t max_cell = detail::isqrt((dxm + 1) * (dxm + 1) +
                                              (dym + 1) * (dym + 1)) + 2;
  std::vector<std::uint64_t> out(static_cast<std::size_t>((max_cell + 64) / 64 + 1), 0);
  auto mark = [&](std::int64_t t) { out[t >> 6] |= std::uint64_t{1} << (t & 63); };

  // Per column pair: word-parallel support of row differences, then exact
  // distance-interval marking per distinct difference vector.
  const std::int64_t span = g1.ny + g2.ny;  // shifted support size
  std::vector<std::uint64_t> acc(static_cast<std::size_t>((span + 63) / 64), 0);
  for (const ColumnView& c1 : cols1) {
    for (const ColumnView& c2 : cols2) {
      std::fill(acc.begin(), acc.end(), 0);
      // acc bit (y1 - y2 + g2.ny - 1) over grid-relative rows
      for (std::int64_t w = 0; w < static_cast<std::int64_t>(c2.bits.size()); ++w) {
        std::uint64_t bits = c2.bits[static_cast<std::size_t>(w)];
        while (bits) {
          const int b = std::countr_zero(bits);
          bits &= bits - 1;
          const std::int64_t y2 = w * 64 + b;
          const std::int64_t shift = g2.ny - 1 - y2;
          // acc |= c1.bits << shift
          const std::int64_t word_shift = shift >> 6;
          const int bit_shift = static_cast<int>(shift & 63);
          for (std::int64_t i = static_cast<std::int64_t>(c1.bits.size()) - 1; i >= 0;
               --i) {
            const std::uint64_t v = c1.bits[static_cast<std::size_t>(i)];
            if (!v) continue;
            const std::int64_t lo = i + word_shift;
            if (bit_shift == 0) {
              acc[static_cast<std::size_t>(lo)] |= v;
            } else {
              acc[static_cast<std::size_t>(lo)] |= v << bit_shift;
              const std::uint64_t hi_bits = v >> (64 - bit_shift);
              if (hi_bits) acc[static_cast<std::size_t>(lo + 1)] |= hi_bits;
            }
          }
        }
      }
      const std::int64_t dgx = c1.gx - c2.gx;
      const std::int64_t ybase = g1.oy - g2.oy - (g2.ny - 1);
      for (std::int64_t w = 0; w < static_cast<std::int64_t>(acc.size()); ++w) {
        std::uint64_t bits = acc[static_cast<std::size_t>(w)];
        while (bits) {
          const int b = std::countr_zero(bits);
          bits &= bits - 1;
          const std::int64_t dgy = ybase + w * 64 + b;
          std::int64_t lo_sq, hi_sq, t0, t1;
          cell_pair_dist_sq(dgx, dgy, &lo_sq, &hi_sq);
          dist_cell_range(lo_sq, hi_sq, &t0, &t1);
          for (std::int64_t t = t0; t <= t1; ++t) mark(t);
        }
      }
    }
  }

  std::int64_t last = -1;
  for (std::int64_t t = 0; t <= max_cell; ++t)
    if ((out[t >> 6] >> (t & 63)) & 1) last = t;
  if (last < 0) return DiscretizedSet(GridSpec::line(m, 0, 1));
  if (last + 1 > (std::int64_t{8} << m))
    throw std::domain_error("distance_set: distances leave the [0,8] range");
  SetBuilder b(GridSpec::line(m, 0, last + 1));
  for (std::int64_t t = 0; t <= last; ++t)
    if ((out[t >> 6] >> (t & 63)) & 1) b.set(t);
  return b.build();
}

namespace {

// Does the distance interval of the cell pair meet any occupied cell of d?
bool distance_hits(const DiscretizedSet& d, std::int64_t di, std::int64_t dj) {
  std::int64_t lo_sq, hi_sq, t0, t1;
  cell_pair_dist_sq(di, dj, &lo_sq, &hi_sq);
  dist_cell_range(lo_sq, hi_sq, &t0, &t1);
  for (std::int64_t t = t0; t <= t1; ++t)
    if (d.test_abs(t)) return true;
  return false;
}

}  // namespace

TripleMeasure bilinear_triple_measure(const DiscretizedSet& e0,
                                      const DiscretizedSet& e1,
                                      const DiscretizedSet& e2,
                                      const DiscretizedSet& d) {
  if (e0.dim() != 2 || e1.dim() != 2 || e2.dim() != 2 || d.dim() != 1)
    throw std::invalid_argument("bilinear_triple_measure: need 2D sets and a 1D set");
  const int m = e0.resolution();
  if (e1.resolution() != m || e2.resolution() != m || d.resolution() != m)
    throw std::invalid_argument("bilinear_triple_measure: inputs must share m");

  const auto c0 = e0.cells_abs();
  const auto c1 = e1.cells_abs();
  const auto c2 = e2.cells_abs();
  TripleMeasure out;
  const double d6 = std::exp2(-6.0 * m);
  if (c0.empty() || c1.empty() || c2.empty() || d.empty()) return out;

  const double candidates = static_cast<double>(c0.size()) * c1.size() * c2.size();
  if (candidates <= std::exp2(24)) {
    for (const auto& [x0, y0] : c0)
      for (const auto& [x1, y1] : c1) {
        if (!distance_hits(d, x0 - x1, y0 - y1)) continue;
        for (const auto& [x2, y2] : c2)
          if (distance_hits(d, x0 - x2, y0 - y2)) out.raw_count++;
      }
  } else {
    // The predicate factorizes over x1, x2 once x0 is fixed.
    for (const auto& [x0, y0] : c0) {
      std::int64_t n1 = 0, n2 = 0;
      for (const auto& [x1, y1] : c1)
        if (distance_hits(d, x0 - x1, y0 - y1)) ++n1;
      if (n1 == 0) continue;
      for (const auto& [x2, y2] : c2)
        if (distance_hits(d, x0 - x2, y0 - y2)) ++n2;
      out.raw_count += n1 * n2;
    }
  }
  out.measure = out.raw_count * d6;
  return out;
}

double wedge_min(const Box2& q0, const Box2& q1, const Box2& q2) {
  const double xs0[2] = {q0.x0, q0.x1}, ys0[2] = {q0.y0, q0.y1};
  const double xs1[2] = {q1.x0, q1.x1}, ys1[2] = {q1.y0, q1.y1};
  const double xs2[2] = {q2.x0, q2.x1}, ys2[2] = {q2.y0, q2.y1};
  double best = std::numeric_limits<double>::infinity();
  bool pos = false, neg = false;
  for (double x0 : xs0)
    for (double y0 : ys0)
      for (double x1 : xs1)
        for (double y1 : ys1)
          for (double x2 : xs2)
            for (double y2 : ys2) {
              const double w = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
              if (w > 0) pos = true;
              if (w < 0) neg = true;
              best = std::min(best, std::fabs(w));
            }
  // the wedge is affine per argument, so a sign change forces a zero inside
  if (pos && neg) return 0.0;
  return best;
}

PairMeasure furstenberg_pair_measure(const DiscretizedSet& e, const TubeFamily& fam) {
  if (e.dim() != 2) throw std::invalid_argument("furstenberg_pair_measure: E must be 2D");
  if (e.resolution() != fam.resolution())
    throw std::invalid_argument("furstenberg_pair_measure: resolution mismatch");
  if (e.grid().cells() > std::int64_t{0xffffffff})
    throw std::invalid_argument("furstenberg_pair_measure: E extent too large");
  PairMeasure out;
  std::vector<std::uint64_t> pairs;
  for (const Tube& t : fam.tubes()) {
    std::vector<std::uint32_t> common;
    t.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
      const std::int64_t gx = x + t.cells.grid().ox;
      const std::int64_t gy = y + t.cells.grid().oy;
      if (!e.test_abs(gx, gy)) return;
      // compact id within E's extent
      const std::int64_t ex = gx - e.grid().ox, ey = gy - e.grid().oy;
      common.push_back(static_cast<std::uint32_t>(ey * e.grid().nx + ex));
    });
    for (std::uint32_t a : common)
      for (std::uint32_t b : common)
        pairs.push_back((static_cast<std::uint64_t>(a) << 32) | b);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  out.raw_count = static_cast<std::int64_t>(pairs.size());
  out.measure = out.raw_count * std::exp2(-4.0 * fam.resolution());
  return out;
}

double KakeyaProfile::max_value() const {
  double v = 0.0;
  for (const auto& e : entries) v = std::max(v, e.value);
  return v;
}

KakeyaProfile kakeya_maximal(const DiscretizedSet& f_set) {
  const int m = f_set.resolution();
  if (f_set.dim() != 2) throw std::invalid_argument("kakeya_maximal: input must be 2D");
  const double d = std::ldexp(1.0, -m);
  const std::int64_t len_bins = std::int64_t{1} << m;  // rectangle length 1

  KakeyaProfile prof;
  prof.delta = d;
  const int n_dirs = static_cast<int>(std::ceil(kPi / d));

  const GridSpec& g = f_set.grid();
  const std::int64_t bound = g.coord_bound();
  // inflate the occupied bounding region by the rectangle length
  const std::int64_t gx0 = std::max(g.ox - len_bins, -bound);
  const std::int64_t gx1 = std::min(g.ox + g.nx + len_bins, bound);
  const std::int64_t gy0 = std::max(g.oy - len_bins, -bound);
  const std::int64_t gy1 = std::min(g.oy + g.ny + len_bins, bound);

  const auto occupied = f_set.cells_abs();

  for (int k = 0; k < n_dirs; ++k) {
    const double theta = k * d;
    const double c = std::cos(theta), s = std::sin(theta);
    // rotated-frame coordinates: along = p . (c, s); perp = p . (-s, c)
    auto s_of = [&](double px, double py) { return px * c + py * s; };
    auto t_of = [&](double px, double py) { return -px * s + py * c; };

    // bin extents over the inflated region corners
    double smin = 1e300, smax = -1e300, tmin = 1e300, tmax = -1e300;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy) {
        const double px = (cx ? gx1 : gx0) * d, py = (cy ? gy1 : gy0) * d;
        smin = std::min(smin, s_of(px, py));
        smax = std::max(smax, s_of(px, py));
        tmin = std::min(tmin, t_of(px, py));
        tmax = std::max(tmax, t_of(px, py));
      }
    const std::int64_t sb0 = static_cast<std::int64_t>(std::floor(smin / d)) - 1;
    const std::int64_t tb0 = static_cast<std::int64_t>(std::floor(tmin / d)) - 1;
    const std::int64_t ns = static_cast<std::int64_t>(std::floor(smax / d)) + 2 - sb0;
    const std::int64_t nt = static_cast<std::int64_t>(std::floor(tmax / d)) + 2 - tb0;
    std::vector<std::int32_t> occ(static_cast<std::size_t>(ns * nt), 0);
    std::vector<std::int32_t> lat(static_cast<std::size_t>(ns * nt), 0);

    auto bin_of = [&](std::int64_t gx, std::int64_t gy, std::int64_t* bs,
                      std::int64_t* bt) {
      const double px = (gx + 0.5) * d, py = (gy + 0.5) * d;
      *bs = static_cast<std::int64_t>(std::floor(s_of(px, py) / d)) - sb0;
      *bt = static_cast<std::int64_t>(std::floor(t_of(px, py) / d)) - tb0;
    };

    for (std::int64_t gy = gy0; gy < gy1; ++gy)
      for (std::int64_t gx = gx0; gx < gx1; ++gx) {
        std::int64_t bs, bt;
        bin_of(gx, gy, &bs, &bt);
        lat[static_cast<std::size_t>(bt * ns + bs)]++;
      }
    for (const auto& [gx, gy] : occupied) {
      std::int64_t bs, bt;
      bin_of(gx, gy, &bs, &bt);
      occ[static_cast<std::size_t>(bt * ns + bs)]++;
    }

    KakeyaEntry entry;
    entry.angle = theta;
    for (std::int64_t bt = 0; bt < nt; ++bt) {
      std::int64_t occ_run = 0, lat_run = 0;
      for (std::int64_t bs = 0; bs < ns; ++bs) {
        occ_run += occ[static_cast<std::size_t>(bt * ns + bs)];
        lat_run += lat[static_cast<std::size_t>(bt * ns + bs)];
        if (bs >= len_bins) {
          occ_run -= occ[static_cast<std::size_t>(bt * ns + bs - len_bins)];
          lat_run -= lat[static_cast<std::size_t>(bt * ns + bs - len_bins)];
        }
        if (lat_run > 0 && occ_run > 0) {
          const double v = static_cast<double>(occ_run) / static_cast<double>(lat_run);
          if (v > entry.value) {
            entry.value = v;
            entry.anchor_s = (sb0 + bs - len_bins + 1) * d;
            entry.anchor_t = (tb0 + bt) * d;
          }
        }
      }
    }
    prof.entries.push_back(entry);
  }
  return prof;
}

double CordobaNorms::overlap_area(std::size_t i, std::size_t j, int m) const {
  return overlap_cells[i * n + j] * std::exp2(-2.0 * m);
}

CordobaNorms cordoba_norms(const TubeFamily& fam) {
  CordobaNorms out;
  out.n = fam.size();
  out.overlap_cells.assign(out.n * out.n, 0);
  const double cell_area = std::exp2(-2.0 * fam.resolution());

  // (cell, tube) incidence list sorted by cell; per-cell groups yield both
  // the multiplicity moments and the pairwise table.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> inc;
  for (std::size_t i = 0; i < out.n; ++i) {
    const Tube& t = fam.tubes()[i];
    t.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
      const std::uint64_t gx = static_cast<std::uint64_t>(
          static_cast<std::uint32_t>(x + t.cells.grid().ox));
      const std::uint64_t gy = static_cast<std::uint64_t>(
          static_cast<std::uint32_t>(y + t.cells.grid().oy));
      inc.emplace_back((gx << 32) | gy, static_cast<std::uint32_t>(i));
    });
  }
  std::sort(inc.begin(), inc.end());

  std::int64_t sum_sq = 0, sum = 0;
  std::size_t i = 0;
  while (i < inc.size()) {
    std::size_t j = i;
    while (j < inc.size() && inc[j].first == inc[i].first) ++j;
    const std::int64_t mult = static_cast<std::int64_t>(j - i);
    sum += mult;
    sum_sq += mult * mult;
    for (std::size_t p = i; p < j; ++p)
      for (std::size_t q = i; q < j; ++q)
        out.overlap_cells[inc[p].second * out.n + inc[q].second]++;
    i = j;
  }
  out.l2_sq = sum_sq * cell_area;
  out.sum_areas = sum * cell_area;
  return out;
}

GridSpec projective_fit_grid(const ProjectiveMap& map, const DiscretizedSet& s) {
  const int m = s.resolution();
  const double d = std::ldexp(1.0, -m);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  bool any = false;
  s.for_each_cell([&](std::int64_t x, std::int64_t y) {
    const std::int64_t gx = x + s.grid().ox, gy = y + s.grid().oy;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy) {
        double X, Y, W;
        map.apply_h((gx + cx) * d, (gy + cy) * d, &X, &Y, &W);
        if (std::fabs(W) < 1e-9)
          throw std::domain_error("projective_fit_grid: set meets the line at infinity");
        xmin = std::min(xmin, X / W);
        xmax = std::max(xmax, X / W);
        ymin = std::min(ymin, Y / W);
        ymax = std::max(ymax, Y / W);
        any = true;
      }
  });
  if (!any) return GridSpec::plane(m, 0, 0, 1, 1);
  const auto fx0 = static_cast<std::int64_t>(std::floor(xmin / d)) - 1;
  const auto fy0 = static_cast<std::int64_t>(std::floor(ymin / d)) - 1;
  const auto fx1 = static_cast<std::int64_t>(std::floor(xmax / d)) + 2;
  const auto fy1 = static_cast<std::int64_t>(std::floor(ymax / d)) + 2;
  return GridSpec::plane(m, fx0, fy0, fx1 - fx0, fy1 - fy0);
}

ProjectedSet projective_apply(const ProjectiveMap& map, const DiscretizedSet& s,
                              const GridSpec& out_grid) {
  if (s.dim() != 2 || out_grid.dim != 2)
    throw std::invalid_argument("projective_apply: 2D sets only");
  const int m = s.resolution();
  const double d = std::ldexp(1.0, -m);
  const double dout = out_grid.delta();
  SetBuilder b(out_grid);
  ProjectedSet out{DiscretizedSet(out_grid), 1e300, -1e300};
  bool any = false;
  int w_sign = 0;
  s.for_each_cell([&](std::int64_t x, std::int64_t y) {
    const std::int64_t gx = x + s.grid().ox, gy = y + s.grid().oy;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy) {
        double X, Y, W;
        const double px = (gx + cx) * d, py = (gy + cy) * d;
        map.apply_h(px, py, &X, &Y, &W);
        if (std::fabs(W) < 1e-9)
          throw std::domain_error("projective_apply: set meets the line at infinity");
        const int sign = W > 0 ? 1 : -1;
        if (w_sign == 0) w_sign = sign;
        if (sign != w_sign)
          throw std::domain_error("projective_apply: set meets the line at infinity");
        xmin = std::min(xmin, X / W);
        xmax = std::max(xmax, X / W);
        ymin = std::min(ymin, Y / W);
        ymax = std::max(ymax, Y / W);
        const double j = std::fabs(map.jacobian(px, py));
        out.jac_min = std::min(out.jac_min, j);
        out.jac_max = std::max(out.jac_max, j);
      }
    // positive-overlap rasterization of the corner bounding box
    const auto tx0 = static_cast<std::int64_t>(std::floor(xmin / dout));
    const auto ty0 = static_cast<std::int64_t>(std::floor(ymin / dout));
    const auto tx1 = static_cast<std::int64_t>(std::ceil(xmax / dout)) - 1;
    const auto ty1 = static_cast<std::int64_t>(std::ceil(ymax / dout)) - 1;
    for (std::int64_t ty = ty0; ty <= std::max(ty0, ty1); ++ty)
      for (std::int64_t tx = tx0; tx <= std::max(tx0, tx1); ++tx) {
        const std::int64_t rx = tx - out_grid.ox, ry = ty - out_grid.oy;
        if (rx < 0 || rx >= out_grid.nx || ry < 0 || ry >= out_grid.ny)
          throw std::domain_error("projective_apply: image leaves out_grid");
        b.set(rx, ry);
        any = true;
      }
  });
  if (!any) {
    out.jac_min = out.jac_max = 0.0;
  }
  out.image = b.build();
  return out;
}

namespace {

// Intersects [lo, hi] with { t : a*t + b in [-c, c] }; returns false when empty.
bool clip_linear(double a, double b, double c, double* lo, double* hi) {
  if (a == 0.0) return std::fabs(b) <= c;
  double t0 = (-c - b) / a, t1 = (c - b) / a;
  if (t0 > t1) std::swap(t0, t1);
  *lo = std::max(*lo, t0);
  *hi = std::min(*hi, t1);
  return *lo <= *hi;
}

}  // namespace

DiscretizedSet rasterize_rectangle(Vec2 center, Vec2 direction, double half_length,
                                   double half_width, int m) {
  const double d = std::ldexp(1.0, -m);
  const double norm = std::hypot(direction.x, direction.y);
  if (norm == 0) throw std::invalid_argument("rasterize_rectangle: zero direction");
  const double ux = direction.x / norm, uy = direction.y / norm;
  const double nxv = -uy, nyv = ux;

  const std::int64_t bound = std::int64_t{8} << m;
  const double ext_x = std::fabs(ux) * half_length + std::fabs(nxv) * half_width;
  const double ext_y = std::fabs(uy) * half_length + std::fabs(nyv) * half_width;
  std::int64_t gx0 = static_cast<std::int64_t>(std::floor((center.x - ext_x) / d)) - 1;
  std::int64_t gx1 = static_cast<std::int64_t>(std::floor((center.x + ext_x) / d)) + 1;
  std::int64_t gy0 = static_cast<std::int64_t>(std::floor((center.y - ext_y) / d)) - 1;
  std::int64_t gy1 = static_cast<std::int64_t>(std::floor((center.y + ext_y) / d)) + 1;
  gx0 = std::max(gx0, -bound);
  gy0 = std::max(gy0, -bound);
  gx1 = std::min(gx1, bound - 1);
  gy1 = std::min(gy1, bound - 1);
  if (gx1 < gx0 || gy1 < gy0)
    return DiscretizedSet(GridSpec::plane(m, 0, 0, 1, 1));

  SetBuilder b(GridSpec::plane(m, gx0, gy0, gx1 - gx0 + 1, gy1 - gy0 + 1));
  // Slice along the major axis; the minor range per slice comes from the
  // two linear constraints |along| <= hl, |perp| <= hw on cell centers.
  const bool major_x = std::fabs(ux) >= std::fabs(uy);
  const std::int64_t p0 = major_x ? gx0 : gy0;
  const std::int64_t p1 = major_x ? gx1 : gy1;
  const std::int64_t q0 = major_x ? gy0 : gx0;
  const std::int64_t q1 = major_x ? gy1 : gx1;
  for (std::int64_t p = p0; p <= p1; ++p) {
    const double pc = (p + 0.5) * d - (major_x ? center.x : center.y);
    // constraints in the minor coordinate t (center offset):
    //   along = pc*u_major + t*u_minor in [-hl, hl]
    //   perp  = pc*n_major + t*n_minor in [-hw, hw]
    const double u_major = major_x ? ux : uy, u_minor = major_x ? uy : ux;
    const double n_major = major_x ? nxv : nyv, n_minor = major_x ? nyv : nxv;
    double tlo = (q0 + 0.5) * d - (major_x ? center.y : center.x);
    double thi = (q1 + 0.5) * d - (major_x ? center.y : center.x);
    if (!clip_linear(u_minor, pc * u_major, half_length, &tlo, &thi)) continue;
    if (!clip_linear(n_minor, pc * n_major, half_width, &tlo, &thi)) continue;
    const double qc = major_x ? center.y : center.x;
    const auto qa = static_cast<std::int64_t>(std::ceil((tlo + qc) / d - 0.5));
    const auto qb = static_cast<std::int64_t>(std::floor((thi + qc) / d - 0.5));
    for (std::int64_t q = std::max(qa, q0); q <= std::min(qb, q1); ++q) {
      if (major_x)
        b.set(p - gx0, q - gy0);
      else
        b.set(q - gx0, p - gy0);
    }
  }
  return b.build();
}

Tube bisector_tube(Vec2 x0, Vec2 x0p, int width_cells, int m) {
  const double d = std::ldexp(1.0, -m);
  const double dx = x0p.x - x0.x, dy = x0p.y - x0.y;
  const double dist = std::hypot(dx, dy);
  if (dist < 16 * d)
    throw std::invalid_argument("bisector_tube: anchor points closer than 16 delta");
  if (width_cells < 1 || width_cells > 2)
    throw std::invalid_argument("bisector_tube: width_cells must be 1 or 2");
  Tube t;
  t.center = {(x0.x + x0p.x) / 2, (x0.y + x0p.y) / 2};
  // direction perpendicular to the segment joining the anchors
  Vec2 dir{-dy / dist, dx / dist};
  if (dir.y < 0 || (dir.y == 0 && dir.x < 0)) {
    dir.x = -dir.x;
    dir.y = -dir.y;
  }
  t.direction = dir;
  t.length = 2.0;
  t.width = 2.0 * width_cells * d;
  t.cells = rasterize_rectangle(t.center, t.direction, 1.0, width_cells * d, m);
  return t;
}

}  // namespace dslab
