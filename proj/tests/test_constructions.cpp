#include <doctest.h>

#include <random>

#include "dslab/constructions.hpp"
#include "dslab/gridset.hpp"
#include "dslab/incidence.hpp"
#include "oracles.hpp"

using namespace dslab;

TEST_CASE("train_track structure") {
  // smallest instance, enumerable by hand: 2 columns x 2 cells
  DiscretizedSet t2 = train_track(2);
  CHECK(t2.cell_count() == 4);
  CHECK(t2.measure() == 0.25);
  CHECK(t2.test_abs(0, 0));
  CHECK(t2.test_abs(0, 1));
  CHECK(t2.test_abs(2, 0));
  CHECK(t2.test_abs(2, 1));

  DiscretizedSet t8 = train_track(8);
  CHECK(t8.cell_count() == 256);  // 16 columns x 16 cells
  CHECK(t8.measure() == std::exp2(-8));
  // columns sit at multiples of sqrt(delta) and are one cell wide
  t8.for_each_cell([&](std::int64_t x, std::int64_t y) {
    CHECK(x % 16 == 0);
    CHECK(y < 16);
  });

  CHECK_THROWS_AS(train_track(7), std::invalid_argument);
}

TEST_CASE("cantor_1d structure") {
  DiscretizedSet c6 = cantor_1d(6, 0.5);
  CHECK(c6.cell_count() == 8);  // 2 per level, 3 levels
  CHECK(c6.measure() == 8 * std::exp2(-6));

  // alpha = 1 keeps the whole interval
  DiscretizedSet full = cantor_1d(6, 1.0);
  CHECK(full.cell_count() == 64);
}

TEST_CASE("ap and gp sets") {
  DiscretizedSet a2 = ap_set(2);
  CHECK(a2.cell_count() == 2);
  CHECK(a2.test_abs(4));  // 1.0
  CHECK(a2.test_abs(6));  // 1.5
  CHECK(a2.measure() == 0.5);

  DiscretizedSet a8 = ap_set(8);
  CHECK(a8.cell_count() == 16);
  CHECK(a8.measure() == std::exp2(-4));

  // gp: regenerate with the same recurrence and dedup
  DiscretizedSet g8 = gp_set(8);
  std::set<std::int64_t> expect;
  double v = 1.0;
  while (v < 2.0) {
    expect.insert(static_cast<std::int64_t>(std::floor(v * 256)));
    v *= 1.0625;
  }
  CHECK(g8.cell_count() == static_cast<std::int64_t>(expect.size()));
  for (std::int64_t j : expect) CHECK(g8.test_abs(j));

  CHECK_THROWS_AS(ap_set(7), std::invalid_argument);
  CHECK_THROWS_AS(gp_set(5), std::invalid_argument);
}

TEST_CASE("generator certification contracts") {
  ToleranceProfile tol;
  for (int m : {6, 8, 10, 12}) {
    CHECK(check_delta_alpha(train_track(m), 1.0, tol).pass);
    CHECK(check_delta_alpha(train_track(m), 1.0, tol).worst_ratio() <= 8.0);
    CHECK(check_delta_alpha(ap_set(m), 0.5, tol).pass);
    CHECK(check_delta_alpha(gp_set(m), 0.5, tol).pass);
    CHECK(check_delta_alpha(cantor_1d(m, 0.5), 0.5, tol).pass);
    CHECK_NOTHROW(random_delta_alpha(m, 0.5, 1, 1, tol));  // certified post hoc
  }
}

TEST_CASE("random_delta_alpha determinism and mass") {
  DiscretizedSet a = random_delta_alpha(10, 0.5, 1);
  DiscretizedSet b = random_delta_alpha(10, 0.5, 1);
  CHECK(a.same_cells(b));

  const double target = std::exp2(-5);
  CHECK(a.measure() >= target / 4);
  CHECK(a.measure() <= 4 * target);
  ToleranceProfile tol;
  CHECK(check_delta_alpha(a, 0.5, tol).pass);

  // alpha = dim keeps the full set regardless of seed
  DiscretizedSet full = random_delta_alpha(6, 1.0, 99);
  CHECK(full.cell_count() == 64);
}

TEST_CASE("product_2d measure identity") {
  DiscretizedSet a = ap_set(6);
  DiscretizedSet c = cantor_1d(6, 0.5);
  DiscretizedSet p = product_2d(a, c);
  CHECK(p.measure() == doctest::Approx(a.measure() * c.measure()).epsilon(1e-15));
  CHECK(p.cell_count() == a.cell_count() * c.cell_count());

  DiscretizedSet sq = product_2d(c, c);
  CHECK(sq.measure() == doctest::Approx(c.measure() * c.measure()).epsilon(1e-15));

  CHECK(product_2d(a, DiscretizedSet(GridSpec::line(6, 64, 64))).empty());
}

TEST_CASE("ring_tube_family structure") {
  const int m = 6;
  DiscretizedSet a = ap_set(m);
  TubeFamily fam = ring_tube_family(a, m);
  CHECK(fam.size() > 0);
  const double d = std::exp2(-m);
  // occupied parts live over occupied columns of a only
  for (const auto& t : fam.tubes()) {
    t.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
      CHECK(a.test_abs(x + t.cells.grid().ox));
      (void)y;
    });
    CHECK(t.width <= 4 * d + 1e-12);
  }

  // full interval: tubes are fully occupied along their length
  SetBuilder fb(GridSpec::line(m, 64, 64));
  for (int i = 0; i < 64; ++i) fb.set(i);
  TubeFamily dense = ring_tube_family(fb.build(), m);
  for (const auto& t : dense.tubes()) CHECK(t.cells.cell_count() >= 64);

  // per-tube occupied fraction against a direct rasterization check
  const Tube& probe = fam.tubes()[fam.size() / 2];
  DiscretizedSet raster = rasterize_rectangle(probe.center, probe.direction,
                                              probe.length / 2, probe.width / 2, m);
  probe.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
    CHECK(raster.test_abs(x + probe.cells.grid().ox, y + probe.cells.grid().oy));
  });

  CHECK_THROWS_AS(ring_tube_family(DiscretizedSet(GridSpec::line(m, 64, 64)), m),
                  std::invalid_argument);
}

TEST_CASE("separating the train track leaves a positive wedge triple") {
  ToleranceProfile tol;
  for (int m : {8, 10}) {
    auto res = separate(train_track(m), tol);
    REQUIRE(res.top.size() >= 3);
    // best wedge over top-cube triples is strictly positive
    double best = 0.0;
    for (std::size_t i = 0; i < res.top.size(); ++i)
      for (std::size_t j = i + 1; j < res.top.size(); ++j)
        for (std::size_t k = j + 1; k < res.top.size(); ++k)
          best = std::max(best, wedge_min(Box2::of_cube(res.top[i].cube),
                                          Box2::of_cube(res.top[j].cube),
                                          Box2::of_cube(res.top[k].cube)));
    CHECK(best > 0.0);
  }
}

TEST_CASE("tube family generators respect separation invariants") {
  CHECK_NOTHROW(bush_tube_family(8, 64));
  CHECK_NOTHROW(random_tube_family(8, 64, 7));
  // determinism of the seeded family
  TubeFamily f1 = random_tube_family(8, 16, 3);
  TubeFamily f2 = random_tube_family(8, 16, 3);
  REQUIRE(f1.size() == f2.size());
  for (std::size_t i = 0; i < f1.size(); ++i)
    CHECK(f1.tubes()[i].cells.same_cells(f2.tubes()[i].cells));
}
