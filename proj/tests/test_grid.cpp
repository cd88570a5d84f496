#include <doctest.h>

#include <random>

#include "dslab/grid.hpp"
#include "oracles.hpp"

using namespace dslab;

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(GridSpec::line(3, 0, 8));
  CHECK_NOTHROW(GridSpec::plane(4, -64, -64, 128, 128));
  CHECK_THROWS_AS(GridSpec::line(3, 0, 100), std::invalid_argument);  // leaves domain
  CHECK_THROWS_AS(GridSpec::line(-1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::plane(3, 0, 0, 0, 1), std::invalid_argument);
  GridSpec g = GridSpec::line(3, 0, 8);
  CHECK(g.delta() == 0.125);
  CHECK(g.coord_bound() == 64);
}

TEST_CASE("measure is exact: count * 2^-(m dim) recovers the integer count") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 4 + static_cast<int>(rng() % 6);
    DiscretizedSet s = oracle::random_set_1d(m, 0.4, rng);
    CHECK(s.measure() * std::exp2(m) == static_cast<double>(s.cell_count()));
    DiscretizedSet t = oracle::random_set_2d(m, 16, 16, 0.3, rng);
    CHECK(t.measure() * std::exp2(2 * m) == static_cast<double>(t.cell_count()));
  }
  CHECK(DiscretizedSet(GridSpec::line(3, 0, 8)).measure() == 0.0);
}

TEST_CASE("bitwise monotonicity of measure") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    DiscretizedSet t = oracle::random_set_2d(5, 32, 32, 0.5, rng);
    SetBuilder sub(t.grid());
    t.for_each_cell([&](std::int64_t x, std::int64_t y) {
      if (rng() & 1) sub.set(x, y);
    });
    DiscretizedSet s = sub.build();
    CHECK(s.subset_of(t));
    CHECK(s.measure() <= t.measure());
  }
}

TEST_CASE("prefix rectangle counts match direct scans") {
  std::mt19937_64 rng(13);
  DiscretizedSet s = oracle::random_set_2d(5, 24, 17, 0.35, rng);
  CellPrefix pre(s);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t x0 = static_cast<std::int64_t>(rng() % 30) - 3;
    const std::int64_t y0 = static_cast<std::int64_t>(rng() % 22) - 3;
    const std::int64_t x1 = x0 + static_cast<std::int64_t>(rng() % 12);
    const std::int64_t y1 = y0 + static_cast<std::int64_t>(rng() % 12);
    std::int64_t direct = 0;
    for (std::int64_t y = std::max<std::int64_t>(y0, 0); y < std::min<std::int64_t>(y1, 17); ++y)
      for (std::int64_t x = std::max<std::int64_t>(x0, 0); x < std::min<std::int64_t>(x1, 24); ++x)
        direct += s.test(x, y) ? 1 : 0;
    CHECK(pre.rect(x0, y0, x1, y1) == direct);
  }
}

TEST_CASE("stray bits past the extent are rejected") {
  std::vector<std::uint64_t> words(1, ~std::uint64_t{0});
  CHECK_THROWS_AS(DiscretizedSet(GridSpec::line(3, 0, 8), words), std::invalid_argument);
}

TEST_CASE("floor_div and isqrt") {
  CHECK(detail::floor_div(7, 2) == 3);
  CHECK(detail::floor_div(-7, 2) == -4);
  CHECK(detail::floor_div(-8, 2) == -4);
  for (std::int64_t v : {0LL, 1LL, 2LL, 3LL, 4LL, 15LL, 16LL, 17LL, 123456789LL}) {
    const std::int64_t r = detail::isqrt(v);
    CHECK(r * r <= v);
    CHECK((r + 1) * (r + 1) > v);
  }
}
