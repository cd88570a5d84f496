#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dslab {

/// Half-width of the ambient box: all geometry lives in [-8, 8]^dim.
inline constexpr double kDomainHalfWidth = 8.0;

/// Largest grid resolution exponent we accept. Keeps cell indices and the
/// squared-distance integer arithmetic comfortably inside 64 bits.
inline constexpr int kMaxResolution = 24;

/// Geometry of a finite axis-aligned cell grid with cell width
/// delta = 2^-m. Origin and extent are in cell units; absolute cell (gx, gy)
/// covers [gx*delta, (gx+1)*delta) x [gy*delta, (gy+1)*delta).
struct GridSpec {
  int dim = 1;     // 1 or 2
  int m = 0;       // cell width 2^-m
  std::int64_t ox = 0;
  std::int64_t oy = 0;
  std::int64_t nx = 1;
  std::int64_t ny = 1;  // 1 when dim == 1

  static GridSpec line(int m, std::int64_t ox, std::int64_t nx);
  static GridSpec plane(int m, std::int64_t ox, std::int64_t oy, std::int64_t nx,
                        std::int64_t ny);

  double delta() const;
  std::int64_t cells() const { return nx * ny; }
  /// Largest absolute cell coordinate magnitude: 8 * 2^m.
  std::int64_t coord_bound() const { return std::int64_t{8} << m; }

  void validate() const;  // throws std::invalid_argument

  bool operator==(const GridSpec&) const = default;
};

/// An immutable bit-packed occupancy set over a GridSpec. Bit (x, y) is
/// stored at index y*nx + x (x fastest), LSB-first within 64-bit words.
/// The cell count is cached so measure() is exact: cell_count * delta^dim.
class DiscretizedSet {
 public:
  DiscretizedSet();                        // empty set on a trivial grid
  explicit DiscretizedSet(GridSpec grid);  // empty set
  DiscretizedSet(GridSpec grid, std::vector<std::uint64_t> words);

  const GridSpec& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  int resolution() const { return grid_.m; }
  double delta() const { return grid_.delta(); }

  std::int64_t cell_count() const { return count_; }
  bool empty() const { return count_ == 0; }
  double measure() const;

  /// Occupancy at grid-relative coordinates; out-of-extent queries are false.
  bool test(std::int64_t x, std::int64_t y = 0) const;
  /// Occupancy at absolute cell coordinates (origin-independent).
  bool test_abs(std::int64_t gx, std::int64_t gy = 0) const;

  void for_each_cell(const std::function<void(std::int64_t x, std::int64_t y)>& fn) const;
  /// Absolute coordinates of every occupied cell, row-major order.
  std::vector<std::pair<std::int64_t, std::int64_t>> cells_abs() const;

  /// True if every occupied cell of this set is occupied in `other`
  /// (compared in absolute coordinates; grids may differ).
  bool subset_of(const DiscretizedSet& other) const;

  bool same_cells(const DiscretizedSet& other) const;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  friend class SetBuilder;
  GridSpec grid_;
  std::vector<std::uint64_t> words_;
  std::int64_t count_ = 0;
};

/// Mutable staging area for constructing a DiscretizedSet.
class SetBuilder {
 public:
  explicit SetBuilder(GridSpec grid);

  void set(std::int64_t x, std::int64_t y = 0, bool value = true);
  void set_abs(std::int64_t gx, std::int64_t gy = 0, bool value = true);
  bool test(std::int64_t x, std::int64_t y = 0) const;
  const GridSpec& grid() const { return grid_; }

  DiscretizedSet build();

 private:
  GridSpec grid_;
  std::vector<std::uint64_t> words_;
};

/// Implicit constants behind the approximate inequalities: eps is the small
/// exponent parameter, K scales the refinement slack delta^(-K*eps),
/// conc_factor is the non-concentration pass bar and approx_factor the
/// multiplicative slack allowed in approximate-equality assertions.
struct ToleranceProfile {
  double eps = 0.05;
  double K = 10.0;
  double conc_factor = 5.0;
  double approx_factor = 8.0;

  void validate() const;
  /// delta^(-K*eps) for cell width 2^-m.
  double refinement_slack(int m) const;
};

/// Axis-aligned dyadic cube: side 2^-level, absolute index coordinates at
/// that level (cube ix covers [ix*2^-level, (ix+1)*2^-level)).
struct DyadicCube {
  int level = 0;
  std::int64_t ix = 0;
  std::int64_t iy = 0;

  double side() const;
  double x0() const { return ix * side(); }
  double y0() const { return iy * side(); }

  bool operator==(const DyadicCube&) const = default;
};

/// Prefix-summed cell counts for O(1) rectangle queries against a set.
class CellPrefix {
 public:
  explicit CellPrefix(const DiscretizedSet& s);
  /// Count of occupied cells with x in [x0, x1) and y in [y0, y1),
  /// grid-relative, clipped to the extent.
  std::int64_t rect(std::int64_t x0, std::int64_t y0, std::int64_t x1,
                    std::int64_t y1) const;

 private:
  std::int64_t nx_, ny_;
  std::vector<std::int64_t> p_;
};

namespace detail {

std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t isqrt(std::int64_t v);
/// True when r equals 2^-j for some j in [0, m]; j is written out.
bool dyadic_radius_exponent(double r, int m, int* j_out);

}  // namespace detail

}  // namespace dslab
