#include <benchmark/benchmark.h>

#include <array>

#include "piola/piola.hpp"
#include "piola/random_fields.hpp"
#include "piola/scenario.hpp"
#include "piola/variational.hpp"

using namespace piola;

namespace {

using Space = OrientedInnerProductSpace<double>;

void BM_IntrinsicCof(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng = make_rng(1);
  const LinearMap<double> a(Space(random_spd(d, rng, 10)), Space(random_spd(d, rng, 10)), random_matrix(d, rng));
  for (auto _ : state) benchmark::DoNotOptimize(intrinsic_cof(a).matrix);
}
BENCHMARK(BM_IntrinsicCof)->DenseRange(2, 6);

void BM_IntrinsicDet(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng = make_rng(2);
  const LinearMap<double> a(Space(random_spd(d, rng, 10)), Space(random_spd(d, rng, 10)), random_matrix(d, rng));
  for (auto _ : state) benchmark::DoNotOptimize(intrinsic_det(a));
}
BENCHMARK(BM_IntrinsicDet)->DenseRange(2, 6);

void BM_Coderivative(benchmark::State& state) {
  const Scenario s = load_builtin("sphere-stereographic");
  const std::array<double, 2> p{0.2, -0.3};
  for (auto _ : state) benchmark::DoNotOptimize(coderivative_cof_at(*s.map, p).value);
}
BENCHMARK(BM_Coderivative);

void BM_CoderivativeFrame(benchmark::State& state) {
  const Scenario s = load_builtin("sphere-stereographic");
  const std::array<double, 2> p{0.2, -0.3};
  for (auto _ : state) benchmark::DoNotOptimize(coderivative_cof_frame_at(*s.map, p));
}
BENCHMARK(BM_CoderivativeFrame);

void BM_EnergyQuadrature(benchmark::State& state) {
  const Scenario s = load_builtin("sphere-stereographic");
  const QuadratureRule rule = tensor_gauss_legendre(s.source->box(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(energy(*s.map, rule));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rule.nodes.size()));
}
BENCHMARK(BM_EnergyQuadrature)->Arg(8)->Arg(16)->Arg(24);

void BM_FirstVariation(benchmark::State& state) {
  const Scenario s = load_builtin("sphere-stereographic");
  Rng rng = make_rng(3);
  const Variation var(s.map, VectorFieldOnChart(2, random_vector_field(s.source->box(), rng)));
  const QuadratureRule rule = tensor_gauss_legendre(s.source->box(), 16);
  for (auto _ : state) benchmark::DoNotOptimize(first_variation(var, rule));
}
BENCHMARK(BM_FirstVariation);

}  // namespace

BENCHMARK_MAIN();
