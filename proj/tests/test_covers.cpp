#include <doctest.h>

#include <random>

#include "dslab/constructions.hpp"
#include "dslab/covers.hpp"
#include "oracles.hpp"

using namespace dslab;

namespace {

DiscretizedSet from_mask(std::uint32_t mask, int m) {
  SetBuilder b(GridSpec::line(m, 0, std::int64_t{1} << m));
  for (std::int64_t i = 0; i < (std::int64_t{1} << m); ++i)
    if (mask & (1u << i)) b.set(i);
  return b.build();
}

}  // namespace

TEST_CASE("optimal cover examples") {
  // a single cell keeps itself: every ancestor costs more for alpha > 0
  DiscretizedSet one = from_mask(1u << 5, 4);
  auto sol = optimal_dyadic_cover(one, 0.7, 1.0);
  CHECK(sol.cubes.size() == 1);
  CHECK(sol.cubes[0].level == 4);
  CHECK(sol.cost == doctest::Approx(std::exp2(-0.7 * 4)).epsilon(1e-15));

  // full [0,1) at alpha < 1 keeps the unit cube at cost 1
  auto full = optimal_dyadic_cover(from_mask(0xffffu, 4), 0.5, 1.0);
  CHECK(full.cubes.size() == 1);
  CHECK(full.cubes[0].level == 0);
  CHECK(full.cost == 1.0);

  // middle-half Cantor at alpha = 1/2 ties at every level; the tie keeps
  // the coarser cube, so the unit cube wins at cost exactly 1
  DiscretizedSet cantor = cantor_1d(6, 0.5);
  auto csol = optimal_dyadic_cover(cantor, 0.5, 1.0);
  CHECK(csol.cost == 1.0);
  CHECK(csol.cubes.size() == 1);

  CHECK_THROWS_AS(optimal_dyadic_cover(DiscretizedSet(GridSpec::line(4, 0, 16)), 0.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_dyadic_cover(one, 0.5, 0.3), std::invalid_argument);
}

TEST_CASE("cover solutions are covers and locally optimal") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mask = static_cast<std::uint32_t>(rng() & 0xffffu);
    if (!mask) continue;
    DiscretizedSet s = from_mask(mask, 4);
    for (double alpha : {0.3, 0.5, 0.7, 1.0}) {
      auto sol = optimal_dyadic_cover(s, alpha, 1.0);
      CHECK(sol.cost == sol.recompute_cost());
      CHECK(verify_cover_local_optimality(sol, 4));
      // disjointness and coverage
      std::vector<bool> covered(16, false);
      for (const auto& q : sol.cubes) {
        const std::int64_t k = std::int64_t{1} << (4 - q.level);
        for (std::int64_t i = q.ix * k; i < (q.ix + 1) * k; ++i) {
          CHECK_FALSE(covered[static_cast<std::size_t>(i)]);
          covered[static_cast<std::size_t>(i)] = true;
        }
      }
      s.for_each_cell([&](std::int64_t x, std::int64_t) {
        CHECK(covered[static_cast<std::size_t>(x)]);
      });
    }
  }
}

TEST_CASE("cover DP equals the exhaustive minimum on sampled m=4 masks") {
  const auto partitions = oracle::dyadic_partitions(0, 16);
  CHECK(partitions.size() == 677);
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mask = static_cast<std::uint32_t>(rng() & 0xffffu);
    if (!mask) continue;
    DiscretizedSet s = from_mask(mask, 4);
    for (double alpha : {0.3, 0.5, 0.7, 1.0}) {
      auto sol = optimal_dyadic_cover(s, alpha, 1.0);
      const long double best = oracle::exhaustive_cover_cost(mask, 4, alpha, partitions);
      CHECK(cover_cost_value(sol.counts, alpha) == best);
    }
  }
}

TEST_CASE("max_side caps the kept cubes") {
  DiscretizedSet s = from_mask(0xffffu, 4);
  auto sol = optimal_dyadic_cover(s, 0.5, 0.25);
  for (const auto& q : sol.cubes) CHECK(q.side() <= 0.25);
  CHECK(verify_cover_local_optimality(sol, 4));
  // capped covers cost at least the uncapped optimum
  CHECK(sol.cost >= optimal_dyadic_cover(s, 0.5, 1.0).cost);
}

TEST_CASE("cover cost is monotone and subadditive") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 40; ++trial) {
    const auto ma = static_cast<std::uint32_t>(rng() & 0xffffu);
    const auto mb = static_cast<std::uint32_t>(rng() & 0xffffu);
    if (!ma || !mb) continue;
    const double alpha = 0.3 + 0.2 * static_cast<double>(rng() % 4);
    const double cost_a = optimal_dyadic_cover(from_mask(ma, 4), alpha, 1.0).cost;
    const double cost_b = optimal_dyadic_cover(from_mask(mb, 4), alpha, 1.0).cost;
    const double cost_u = optimal_dyadic_cover(from_mask(ma | mb, 4), alpha, 1.0).cost;
    CHECK(cost_u >= cost_a);         // monotone
    CHECK(cost_u <= cost_a + cost_b + 1e-15);  // subadditive
  }
}

TEST_CASE("2D cover: area content of the full square") {
  SetBuilder b(GridSpec::plane(3, 0, 0, 8, 8));
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) b.set(x, y);
  auto bound = content_upper(b.build(), 2.0, 1.0);
  CHECK(bound.value == 1.0);
  CHECK(bound.cube_count == 1);
  CHECK(bound.ball_upper_factor == doctest::Approx(4.0));
}

TEST_CASE("train track cover at alpha = 1: tie cascade keeps the unit square") {
  // covering each column with its own side-sqrt(delta) square costs exactly
  // as much as any coarser dyadic merge, so ties walk up to one unit cube
  auto bound = content_upper(train_track(8), 1.0, 1.0);
  CHECK(bound.value == 1.0);
  CHECK(bound.cube_count == 1);
  // a capped cover cannot do better than the column cover
  auto capped = optimal_dyadic_cover(train_track(8), 1.0, std::exp2(-4));
  CHECK(capped.cost == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("content_upper on the singleton") {
  DiscretizedSet one = from_mask(1u << 3, 4);
  auto bound = content_upper(one, 0.5, 1.0);
  CHECK(bound.value == doctest::Approx(std::exp2(-0.5 * 4)).epsilon(1e-15));
}

TEST_CASE("hyperdyadic scales") {
  auto s1 = hyperdyadic_scales(1.0, std::exp2(-8));
  CHECK(s1.exponents == std::vector<int>{1, 2, 4, 8});
  CHECK(s1.scales == std::vector<double>{0.5, 0.25, 0.0625, std::exp2(-8)});

  // small eps: duplicates removed, strictly decreasing
  auto s2 = hyperdyadic_scales(0.05, std::exp2(-6));
  for (std::size_t i = 1; i < s2.scales.size(); ++i)
    CHECK(s2.scales[i] < s2.scales[i - 1]);

  auto s3 = hyperdyadic_scales(0.5, std::exp2(-10));
  CHECK(s3.exponents == std::vector<int>{1, 2, 3, 5, 7});

  CHECK_THROWS_AS(hyperdyadic_scales(0.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(hyperdyadic_scales(0.5, 0.7), std::invalid_argument);
}
