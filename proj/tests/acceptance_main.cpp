// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <vector>

#include "dslab/constructions.hpp"
#include "dslab/covers.hpp"
#include "dslab/experiment.hpp"
#include "dslab/gridset.hpp"
#include "dslab/incidence.hpp"
#include "dslab/serialize.hpp"
#include "dslab/setarith.hpp"
#include "oracles.hpp"

using namespace dslab;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] C%d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// C1: train-track scaling
void criterion1() {
  const auto t0 = Clock::now();
  bool measures_exact = true;
  std::vector<std::pair<double, double>> points;
  for (int m : {8, 10, 12, 14, 16}) {
    DiscretizedSet s = train_track(m);
    if (s.measure() != std::exp2(-m)) measures_exact = false;
    points.emplace_back(std::exp2(-m), distance_set(s, s).measure());
  }
  const ExponentFit fit = fit_exponent(points);
  const double elapsed = seconds_since(t0);
  const bool pass =
      measures_exact && fit.slope >= 0.40 && fit.slope <= 0.60 && elapsed < 120.0;
  report(1, "train-track scaling", pass,
         fmt("measure exact=%d, distance slope=%.4f in [0.40,0.60], %.1fs < 120s",
             measures_exact, fit.slope, elapsed));
}

// ---------------------------------------------------------------------------
// C2: non-concentration certifications
void criterion2() {
  ToleranceProfile tol;
  bool pass = true;
  double worst_pass_ratio = 0.0;
  for (int m : {6, 8, 10, 12}) {
    auto tt = check_delta_alpha(train_track(m), 1.0, tol);
    auto ap = check_delta_alpha(ap_set(m), 0.5, tol);
    auto ct = check_delta_alpha(cantor_1d(m, 0.5), 0.5, tol);
    for (const auto* rep : {&tt, &ap, &ct}) {
      if (!rep->pass || rep->worst_ratio() > 8.0) pass = false;
      worst_pass_ratio = std::max(worst_pass_ratio, rep->worst_ratio());
    }
  }
  bool rejected = true;
  for (int m : {8, 10, 12}) {
    const std::int64_t base = std::int64_t{1} << m;
    SetBuilder b(GridSpec::line(m, base, base));
    for (std::int64_t i = 0; i < (std::int64_t{1} << (m / 2)); ++i) b.set(i);
    if (check_delta_alpha(b.build(), 0.5, tol).pass) rejected = false;
  }
  pass = pass && rejected;
  report(2, "non-concentration certifications", pass,
         fmt("constructions certify with worst ratio %.3f <= 8; "
             "concentrated interval rejected for m>=8: %s",
             worst_pass_ratio, rejected ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// C3: Cordoba bound
void criterion3() {
  const int m = 10;
  const double delta = std::exp2(-m);
  const int n = 1 << m;  // delta^-1 tubes
  const double lg = m;   // log2(1/delta)
  const double bound_general = 10.0 * delta * n + 10.0 * lg * std::max(1.0, n * delta);
  const double bound_concrete = 10.0 * lg;
  bool pass = true;
  double worst = 0.0;
  for (int family = 0; family < 21; ++family) {
    TubeFamily fam = family == 20 ? bush_tube_family(m, n)
                                  : random_tube_family(m, n, 1000 + family);
    CordobaNorms norms = cordoba_norms(fam);
    // cross-check against the exact pairwise table
    std::int64_t table_cells = 0;
    for (std::int64_t c : norms.overlap_cells) table_cells += c;
    const double table_total = table_cells * delta * delta;
    if (norms.l2_sq != table_total) pass = false;
    if (norms.l2_sq > bound_general || norms.l2_sq > bound_concrete) pass = false;
    worst = std::max(worst, norms.l2_sq);
  }
  report(3, "Cordoba bound", pass,
         fmt("21 families at m=10, N=%d: worst l2_sq=%.3f <= %.1f (and <= %.1f); "
             "table cross-check exact",
             n, worst, bound_concrete, bound_general));
}

// ---------------------------------------------------------------------------
// C4: cover DP oracle equivalence over all 2^16 subsets of the m=4 grid
void criterion4() {
  const auto t0 = Clock::now();
  const int m = 4;
  const auto partitions = oracle::dyadic_partitions(0, 16);
  // per-partition pieces as bit masks plus levels
  struct Piece {
    std::uint32_t mask;
    int level;
  };
  std::vector<std::vector<Piece>> pieces;
  pieces.reserve(partitions.size());
  for (const auto& p : partitions) {
    std::vector<Piece> ps;
    for (const auto& [off, len] : p) {
      int level = m;
      for (std::int64_t l = len; l > 1; l /= 2) --level;
      ps.push_back({static_cast<std::uint32_t>(((1u << len) - 1u) << off), level});
    }
    pieces.push_back(std::move(ps));
  }
  const double alphas[4] = {0.3, 0.5, 0.7, 1.0};
  long double weights[4][5];
  for (int a = 0; a < 4; ++a)
    for (int j = 0; j <= m; ++j)
      weights[a][j] = exp2l(-static_cast<long double>(alphas[a]) * j);

  bool pass = true;
  std::uint32_t checked = 0;
  for (std::uint32_t mask = 1; mask < 65536 && pass; ++mask) {
    long double best[4] = {1e300L, 1e300L, 1e300L, 1e300L};
    for (const auto& ps : pieces) {
      // accumulate per-level counts, then evaluate in the canonical
      // level-ascending order so ties compare exactly
      int counts[5] = {0, 0, 0, 0, 0};
      for (const Piece& pc : ps)
        if (mask & pc.mask) counts[pc.level]++;
      long double cost[4] = {0, 0, 0, 0};
      for (int j = 0; j <= m; ++j) {
        if (!counts[j]) continue;
        for (int a = 0; a < 4; ++a)
          cost[a] += static_cast<long double>(counts[j]) * weights[a][j];
      }
      for (int a = 0; a < 4; ++a) best[a] = std::min(best[a], cost[a]);
    }
    SetBuilder b(GridSpec::line(m, 0, 16));
    for (int i = 0; i < 16; ++i)
      if (mask & (1u << i)) b.set(i);
    DiscretizedSet s = b.build();
    for (int a = 0; a < 4; ++a) {
      auto sol = optimal_dyadic_cover(s, alphas[a], 1.0);
      if (cover_cost_value(sol.counts, alphas[a]) != best[a]) pass = false;
      if (!verify_cover_local_optimality(sol, m)) pass = false;
    }
    ++checked;
  }
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 60.0;
  report(4, "cover DP oracle equivalence", pass,
         fmt("%u masks x 4 alphas: DP == exhaustive minimum exactly, "
             "local optimality holds, %.1fs < 60s",
             checked, elapsed));
}

// ---------------------------------------------------------------------------
// C5: arithmetic soundness
void criterion5() {
  std::mt19937_64 rng(5001);
  const int m = 8;
  const double d = std::exp2(-m);
  int violations = 0;
  bool commutes = true;
  for (int trial = 0; trial < 1000; ++trial) {
    DiscretizedSet a = oracle::random_set_1d(m, 0.15, rng);
    DiscretizedSet b = oracle::random_set_1d(m, 0.15, rng);
    if (a.empty() || b.empty()) continue;
    const BinaryOp op = static_cast<BinaryOp>(rng() % 4);
    DiscretizedSet r = pointwise_combine(a, b, op);
    const auto ca = a.cells_abs();
    const auto cb = b.cells_abs();
    for (int k = 0; k < 8; ++k) {
      const double x = oracle::sample_in_cell(ca[rng() % ca.size()].first, d, rng);
      const double y = oracle::sample_in_cell(cb[rng() % cb.size()].first, d, rng);
      double v = 0;
      switch (op) {
        case BinaryOp::Add: v = x + y; break;
        case BinaryOp::Sub: v = x - y; break;
        case BinaryOp::Mul: v = x * y; break;
        case BinaryOp::Div: v = x / y; break;
      }
      if (!r.test_abs(static_cast<std::int64_t>(std::floor(v / d)))) ++violations;
    }
    if (trial % 10 == 0) {
      if (!pointwise_combine(a, b, BinaryOp::Add)
               .same_cells(pointwise_combine(b, a, BinaryOp::Add)))
        commutes = false;
      if (!pointwise_combine(a, b, BinaryOp::Mul)
               .same_cells(pointwise_combine(b, a, BinaryOp::Mul)))
        commutes = false;
    }
  }

  // representation counts against the sextuple brute force
  bool counts_ok = true;
  int counted = 0;
  while (counted < 200) {
    DiscretizedSet a = oracle::random_set_1d(5, 0.2, rng);
    DiscretizedSet b = oracle::random_set_1d(5, 0.2, rng);
    if (a.empty() || b.empty() || a.cell_count() > 8 || b.cell_count() > 8) continue;
    ++counted;
    std::vector<std::int64_t> av, bv;
    for (const auto& [j, _] : a.cells_abs()) av.push_back(j);
    for (const auto& [j, _] : b.cells_abs()) bv.push_back(j);
    std::map<std::int64_t, std::int64_t> hist;
    for (std::int64_t a1 : av)
      for (std::int64_t a2 : av)
        for (std::int64_t a3 : av)
          for (std::int64_t b1 : bv)
            for (std::int64_t b2 : bv)
              for (std::int64_t b3 : bv) hist[(a1 - b1) - (a2 - b2) + (a3 - b3)]++;
    RepresentationTable table = representation_table(a, b);
    std::int64_t total = 0;
    for (const auto& [x, c] : hist) {
      if (table.count_at(x) != c) counts_ok = false;
      total += c;
    }
    if (table.total() != total) counts_ok = false;
  }
  const bool pass = violations == 0 && commutes && counts_ok;
  report(5, "arithmetic soundness", pass,
         fmt("1000 random op triples: %d outer violations; commutativity bit-exact: %s; "
             "200 representation tables equal the sextuple brute force: %s",
             violations, commutes ? "yes" : "no", counts_ok ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// C6: ring statistic spreading
void criterion6() {
  double ap_worst = 0.0, gp_worst = 0.0;
  std::vector<std::pair<double, double>> ap_points, gp_points;
  for (int m = 8; m <= 16; m += 2) {
    const double sq = std::exp2(-0.5 * m);
    DiscretizedSet a = ap_set(m);
    DiscretizedSet g = gp_set(m);
    const double ap_sum = pointwise_combine(a, a, BinaryOp::Add).measure();
    const double ap_mul = pointwise_combine(a, a, BinaryOp::Mul).measure();
    const double gp_sum = pointwise_combine(g, g, BinaryOp::Add).measure();
    const double gp_mul = pointwise_combine(g, g, BinaryOp::Mul).measure();
    ap_worst = std::max(ap_worst, ap_sum / sq);
    gp_worst = std::max(gp_worst, gp_mul / sq);
    ap_points.emplace_back(std::exp2(-m), std::max(ap_sum, ap_mul) / sq);
    gp_points.emplace_back(std::exp2(-m), std::max(gp_sum, gp_mul) / sq);
  }
  const bool structured_ok = ap_worst <= 4.0 && gp_worst <= 4.0;
  const double ap_slope = fit_exponent(ap_points).slope;
  const double gp_slope = fit_exponent(gp_points).slope;
  const bool slopes_ok = ap_slope <= -0.25 && gp_slope <= -0.25;
  report(6, "ring statistic spreading", structured_ok && slopes_ok,
         fmt("structured measures <= 4 sqrt(delta): %s (ap %.3f, gp %.3f x sqrt(delta)); "
             "ring-stat exponents ap=%.3f gp=%.3f <= -0.25: %s",
             structured_ok ? "yes" : "no", ap_worst, gp_worst, ap_slope, gp_slope,
             slopes_ok ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// C7: incidence oracles
void criterion7() {
  std::mt19937_64 rng(7001);
  const int m = 6;
  bool equal = true;
  // pair measures against brute force on families of <= 8 tubes
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    TubeFamily fam = trial % 2 == 0 ? bush_tube_family(m, n)
                                    : random_tube_family(m, n, 7000 + trial);
    DiscretizedSet e = oracle::random_set_2d(m, 64, 64, 0.35, rng);
    if (furstenberg_pair_measure(e, fam).raw_count != oracle::pair_union_count(e, fam))
      equal = false;
  }
  // triple measures against brute force on <= 2^15 candidate triples
  for (int trial = 0; trial < 12; ++trial) {
    DiscretizedSet e0 = oracle::random_set_2d(m, 14, 14, 0.15, rng);
    DiscretizedSet e1 = oracle::random_set_2d(m, 14, 14, 0.15, rng);
    DiscretizedSet e2 = oracle::random_set_2d(m, 14, 14, 0.15, rng);
    DiscretizedSet dd = oracle::random_set_1d(m, 0.25, rng);
    if (e0.empty() || e1.empty() || e2.empty() || dd.empty()) continue;
    const double cand = static_cast<double>(e0.cell_count()) * e1.cell_count() *
                        e2.cell_count();
    if (cand > 32768) continue;
    if (bilinear_triple_measure(e0, e1, e2, dd).raw_count !=
        oracle::triple_count(e0, e1, e2, dd))
      equal = false;
  }
  // monotonicity in 100 seeded trials
  bool monotone = true;
  TubeFamily fam = bush_tube_family(m, 6);
  for (int trial = 0; trial < 100; ++trial) {
    DiscretizedSet big = oracle::random_set_2d(m, 32, 32, 0.3, rng);
    SetBuilder subb(big.grid());
    big.for_each_cell([&](std::int64_t x, std::int64_t y) {
      if (rng() & 1) subb.set(x, y);
    });
    DiscretizedSet small = subb.build();
    if (furstenberg_pair_measure(small, fam).raw_count >
        furstenberg_pair_measure(big, fam).raw_count)
      monotone = false;
    DiscretizedSet dd = oracle::random_set_1d(m, 0.3, rng);
    if (small.empty() || dd.empty()) continue;
    if (bilinear_triple_measure(small, small, small, dd).raw_count >
        bilinear_triple_measure(big, big, big, dd).raw_count)
      monotone = false;
  }
  report(7, "incidence oracles", equal && monotone,
         fmt("brute-force equality at m=6: %s; monotone under enlargement in 100 "
             "trials: %s",
             equal ? "yes" : "no", monotone ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// C8: serialization
void criterion8() {
  std::mt19937_64 rng(8001);
  bool round_trips = true;
  for (int trial = 0; trial < 100; ++trial) {
    DiscretizedSet s = trial % 2 == 0
                           ? oracle::random_set_1d(5 + static_cast<int>(rng() % 5),
                                                   0.35, rng)
                           : oracle::random_set_2d(6, 1 + static_cast<int>(rng() % 40),
                                                   1 + static_cast<int>(rng() % 40),
                                                   0.3, rng);
    DiscretizedSet back = decode_set(encode_set(s));
    if (!(back.grid() == s.grid()) || !back.same_cells(s)) round_trips = false;
  }

  SetBuilder b(GridSpec::line(3, 0, 1));
  b.set(0);
  const std::string expect =
      "DSETv1\ndim=1\nm=3\nox=0\noy=0\nnx=1\nny=1\nenc=raw\n\n" + std::string(1, '\x01');
  const bool bytes_ok = encode_set(b.build()) == expect;

  const std::string good = encode_set(b.build());
  bool errors_ok = true;
  try {
    std::string bad = good;
    bad[0] = 'X';
    decode_set(bad);
    errors_ok = false;
  } catch (const BadMagicError&) {
  } catch (...) {
    errors_ok = false;
  }
  try {
    decode_set(good.substr(0, good.size() - 1));
    errors_ok = false;
  } catch (const TruncatedPayloadError&) {
  } catch (...) {
    errors_ok = false;
  }
  try {
    decode_set(good + '\x00');  // payload longer than the declared extent
    errors_ok = false;
  } catch (const HeaderMismatchError&) {
  } catch (...) {
    errors_ok = false;
  }
  report(8, "serialization", round_trips && bytes_ok && errors_ok,
         fmt("100 round trips bit-exact: %s; documented file byte-exact: %s; three "
             "distinct corruption errors: %s",
             round_trips ? "yes" : "no", bytes_ok ? "yes" : "no",
             errors_ok ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// C9: projective device
void criterion9() {
  const int m = 8;
  SetBuilder sb(GridSpec::plane(m, 0, 0, 256, 256));
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) sb.set(x, y);
  DiscretizedSet square = sb.build();

  auto id = projective_apply(ProjectiveMap::identity(), square, square.grid());
  const bool identity_ok = id.image.same_cells(square);

  std::mt19937_64 rng(9001);
  auto u = [&] { return (rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  bool ratios_ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    ProjectiveMap map;
    map.a = {1.0 + 0.15 * u(), 0.1 * u(),  0.2 * u(),
             0.1 * u(),        1.0 + 0.15 * u(), 0.2 * u(),
             0.05 * u(),       0.05 * u(), 1.0};
    auto ps = projective_apply(map, square, projective_fit_grid(map, square));
    const double ratio = ps.image.measure() / square.measure();
    if (ratio < ps.jac_min / 4.0 || ratio > ps.jac_max * 4.0) ratios_ok = false;
  }
  report(9, "projective device", identity_ok && ratios_ok,
         fmt("identity bit-exact: %s; 10 seeded maps keep measure ratios within "
             "[jac_min, jac_max] x 4: %s",
             identity_ok ? "yes" : "no", ratios_ok ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
