#include "dslab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace dslab {

namespace {

std::int64_t word_count(std::int64_t bits) { return (bits + 63) / 64; }

}  // namespace

GridSpec GridSpec::line(int m, std::int64_t ox, std::int64_t nx) {
  GridSpec g;
  g.dim = 1;
  g.m = m;
  g.ox = ox;
  g.nx = nx;
  g.oy = 0;
  g.ny = 1;
  g.validate();
  return g;
}

GridSpec GridSpec::plane(int m, std::int64_t ox, std::int64_t oy, std::int64_t nx,
                         std::int64_t ny) {
  GridSpec g;
  g.dim = 2;
  g.m = m;
  g.ox = ox;
  g.oy = oy;
  g.nx = nx;
  g.ny = ny;
  g.validate();
  return g;
}

double GridSpec::delta() const { return std::ldexp(1.0, -m); }

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
  if (m < 0 || m > kMaxResolution)
    throw std::invalid_argument("GridSpec: m out of range [0, " +
                                std::to_string(kMaxResolution) + "]");
  if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: empty extent");
  if (dim == 1 && (ny != 1 || oy != 0))
    throw std::invalid_argument("GridSpec: 1D grids require ny=1, oy=0");
  const std::int64_t bound = coord_bound();
  if (ox < -bound || ox + nx > bound || oy < -bound || oy + ny > bound)
    throw std::invalid_argument("GridSpec: extent leaves the [-8,8] domain");
  if (nx * ny > (std::int64_t{1} << 34))
    throw std::invalid_argument("GridSpec: extent too large");
}

DiscretizedSet::DiscretizedSet() : DiscretizedSet(GridSpec{}) {}

DiscretizedSet::DiscretizedSet(GridSpec grid) : grid_(grid) {
  grid_.validate();
  words_.assign(word_count(grid_.cells()), 0);
}

DiscretizedSet::DiscretizedSet(GridSpec grid, std::vector<std::uint64_t> words)
    : grid_(grid), words_(std::move(words)) {
  grid_.validate();
  const std::int64_t bits = grid_.cells();
  if (static_cast<std::int64_t>(words_.size()) != word_count(bits))
    throw std::invalid_argument("DiscretizedSet: word count does not match extent");
  if (bits % 64 != 0 && !words_.empty()) {
    const std::uint64_t mask = (std::uint64_t{1} << (bits % 64)) - 1;
    if (words_.back() & ~mask)
      throw std::invalid_argument("DiscretizedSet: bits set beyond extent");
  }
  count_ = 0;
  for (std::uint64_t w : words_) count_ += std::popcount(w);
}

double DiscretizedSet::measure() const {
  const double d = delta();
  return grid_.dim == 1 ? count_ * d : count_ * d * d;
}

bool DiscretizedSet::test(std::int64_t x, std::int64_t y) const {
  if (x < 0 || x >= grid_.nx || y < 0 || y >= grid_.ny) return false;
  const std::int64_t idx = y * grid_.nx + x;
  return (words_[idx >> 6] >> (idx & 63)) & 1;
}

bool DiscretizedSet::test_abs(std::int64_t gx, std::int64_t gy) const {
  return test(gx - grid_.ox, gy - grid_.oy);
}

void DiscretizedSet::for_each_cell(
    const std::function<void(std::int64_t, std::int64_t)>& fn) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      const int b = std::countr_zero(bits);
      bits &= bits - 1;
      const std::int64_t idx = static_cast<std::int64_t>(w) * 64 + b;
      fn(idx % grid_.nx, idx / grid_.nx);
    }
  }
}

std::vector<std::pair<std::int64_t, std::int64_t>> DiscretizedSet::cells_abs() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(static_cast<std::size_t>(count_));
  for_each_cell([&](std::int64_t x, std::int64_t y) {
    out.emplace_back(x + grid_.ox, y + grid_.oy);
  });
  return out;
}

bool DiscretizedSet::subset_of(const DiscretizedSet& other) const {
  if (grid_.m != other.grid_.m || grid_.dim != other.grid_.dim) return false;
  if (grid_ == other.grid_) {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }
  bool ok = true;
  for_each_cell([&](std::int64_t x, std::int64_t y) {
    if (!other.test_abs(x + grid_.ox, y + grid_.oy)) ok = false;
  });
  return ok;
}

bool DiscretizedSet::same_cells(const DiscretizedSet& other) const {
  return count_ == other.count_ && subset_of(other);
}

SetBuilder::SetBuilder(GridSpec grid) : grid_(grid) {
  grid_.validate();
  words_.assign(word_count(grid_.cells()), 0);
}

void SetBuilder::set(std::int64_t x, std::int64_t y, bool value) {
  if (x < 0 || x >= grid_.nx || y < 0 || y >= grid_.ny)
    throw std::invalid_argument("SetBuilder: cell outside extent");
  const std::int64_t idx = y * grid_.nx + x;
  if (value)
    words_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
  else
    words_[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
}

void SetBuilder::set_abs(std::int64_t gx, std::int64_t gy, bool value) {
  set(gx - grid_.ox, gy - grid_.oy, value);
}

bool SetBuilder::test(std::int64_t x, std::int64_t y) const {
  if (x < 0 || x >= grid_.nx || y < 0 || y >= grid_.ny) return false;
  const std::int64_t idx = y * grid_.nx + x;
  return (words_[idx >> 6] >> (idx & 63)) & 1;
}

DiscretizedSet SetBuilder::build() { return DiscretizedSet(grid_, words_); }

void ToleranceProfile::validate() const {
  if (!(eps > 0) || !(K > 0)) throw std::invalid_argument("ToleranceProfile: eps, K > 0");
  if (!(conc_factor >= 1) || !(approx_factor >= 1))
    throw std::invalid_argument("ToleranceProfile: factors must be >= 1");
}

double ToleranceProfile::refinement_slack(int m) const {
  return std::exp2(K * eps * m);
}

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

CellPrefix::CellPrefix(const DiscretizedSet& s)
    : nx_(s.grid().nx), ny_(s.grid().ny), p_((nx_ + 1) * (ny_ + 1), 0) {
  for (std::int64_t y = 0; y < ny_; ++y) {
    std::int64_t row = 0;
    for (std::int64_t x = 0; x < nx_; ++x) {
      row += s.test(x, y) ? 1 : 0;
      p_[(y + 1) * (nx_ + 1) + (x + 1)] = p_[y * (nx_ + 1) + (x + 1)] + row;
    }
  }
}

std::int64_t CellPrefix::rect(std::int64_t x0, std::int64_t y0, std::int64_t x1,
                              std::int64_t y1) const {
  x0 = std::clamp<std::int64_t>(x0, 0, nx_);
  x1 = std::clamp<std::int64_t>(x1, 0, nx_);
  y0 = std::clamp<std::int64_t>(y0, 0, ny_);
  y1 = std::clamp<std::int64_t>(y1, 0, ny_);
  if (x0 >= x1 || y0 >= y1) return 0;
  const std::int64_t w = nx_ + 1;
  return p_[y1 * w + x1] - p_[y0 * w + x1] - p_[y1 * w + x0] + p_[y0 * w + x0];
}

namespace detail {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t isqrt(std::int64_t v) {
  if (v < 0) throw std::invalid_argument("isqrt of negative value");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

bool dyadic_radius_exponent(double r, int m, int* j_out) {
  for (int j = 0; j <= m; ++j) {
    if (r == std::ldexp(1.0, -j)) {
      if (j_out) *j_out = j;
      return true;
    }
  }
  return false;
}

}  // namespace detail

}  // namespace dslab
