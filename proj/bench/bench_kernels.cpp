#include <benchmark/benchmark.h>

#include <cmath>

#include "vdlab/nevanlinna.hpp"

using namespace vdlab;

namespace {

const ProjectiveCurve& curve() {
  static const ProjectiveCurve f = ProjectiveCurve::parse(std::vector<std::string>{"1", "z", "exp(z)"});
  return f;
}

QuadratureOptions with(Exec e) {
  QuadratureOptions o;
  o.exec = e;
  return o;
}

void radial_profile_kernel(benchmark::State& state, Exec exec) {
  const auto nodes = radial_nodes(std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}, 8, 0.5,
                                  1.189207115002721);
  const auto density = [](cplx z) { return fs_pullback_density(curve(), z); };
  for (auto _ : state) benchmark::DoNotOptimize(radial_profile(density, nodes, {}, exec));
  state.counters["nodes"] = static_cast<double>(nodes.size());
}

void characteristic_kernel(benchmark::State& state, Exec exec) {
  const auto g = geometric_grid(2.0, std::pow(2.0, static_cast<double>(state.range(0))), 9);
  for (auto _ : state) benchmark::DoNotOptimize(characteristic(curve(), 1, g, with(exec)));
}

void proximity_kernel(benchmark::State& state, Exec exec) {
  const auto g = default_grid();
  const Divisor D = Divisor::parse("w2 - w1", 2);
  for (auto _ : state) benchmark::DoNotOptimize(proximity(curve(), D, g, with(exec)));
}

}  // namespace

BENCHMARK_CAPTURE(radial_profile_kernel, serial, Exec::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(radial_profile_kernel, parallel, Exec::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(characteristic_kernel, serial, Exec::Serial)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(characteristic_kernel, parallel, Exec::Parallel)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(proximity_kernel, serial, Exec::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(proximity_kernel, parallel, Exec::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
