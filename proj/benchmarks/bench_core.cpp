#include <benchmark/benchmark.h>

#include "dslab/constructions.hpp"
#include "dslab/covers.hpp"
#include "dslab/gridset.hpp"
#include "dslab/incidence.hpp"
#include "dslab/setarith.hpp"

namespace {

void ConcentrationScan(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const dslab::DiscretizedSet s = dslab::train_track(m);
  const dslab::ToleranceProfile tol;
  for (auto _ : state) {
    auto rep = dslab::check_delta_alpha(s, 1.0, tol);
    benchmark::DoNotOptimize(rep.pass);
  }
}
BENCHMARK(ConcentrationScan)->Arg(8)->Arg(10)->Arg(12);

void Sumset(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const dslab::DiscretizedSet a = dslab::ap_set(m);
  for (auto _ : state) {
    auto s = dslab::pointwise_combine(a, a, dslab::BinaryOp::Add);
    benchmark::DoNotOptimize(s.cell_count());
  }
}
BENCHMARK(Sumset)->Arg(10)->Arg(14)->Arg(16);

void ProductSet(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const dslab::DiscretizedSet a = dslab::ap_set(m);
  for (auto _ : state) {
    auto s = dslab::pointwise_combine(a, a, dslab::BinaryOp::Mul);
    benchmark::DoNotOptimize(s.cell_count());
  }
}
BENCHMARK(ProductSet)->Arg(10)->Arg(14)->Arg(16);

void DistanceSet(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const dslab::DiscretizedSet s = dslab::train_track(m);
  for (auto _ : state) {
    auto d = dslab::distance_set(s, s);
    benchmark::DoNotOptimize(d.cell_count());
  }
}
BENCHMARK(DistanceSet)->Arg(10)->Arg(12)->Arg(14);

void CoverDp(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const dslab::DiscretizedSet s = dslab::cantor_1d(m, 0.5);
  for (auto _ : state) {
    auto sol = dslab::optimal_dyadic_cover(s, 0.5, 1.0);
    benchmark::DoNotOptimize(sol.cost);
  }
}
BENCHMARK(CoverDp)->Arg(10)->Arg(14)->Arg(16);

void CordobaBush(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const dslab::TubeFamily fam = dslab::bush_tube_family(m, 1 << m);
  for (auto _ : state) {
    auto norms = dslab::cordoba_norms(fam);
    benchmark::DoNotOptimize(norms.l2_sq);
  }
}
BENCHMARK(CordobaBush)->Arg(8)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
