#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "monotone_lab/analytic_map.hpp"
#include "monotone_lab/kernels.hpp"
#include "monotone_lab/triangulate.hpp"

using namespace monotone_lab;

namespace {

const Deformation& fixture() {
  static const Deformation def = [] {
    const AnalyticMap pinch = AnalyticMap::rectangle_pinch();
    auto mesh = std::make_shared<const TriMesh>(pinch.natural_mesh(0.02));
    return sample_analytic(pinch, mesh);
  }();
  return def;
}

const std::vector<Vec2>& queries() {
  static const std::vector<Vec2> ys = [] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(-2.0, 2.0);
    std::vector<Vec2> out(4096);
    for (Vec2& y : out) y = {ux(rng), uy(rng)};
    return out;
  }();
  return ys;
}

template <void (*Kernel)(const Deformation&, const EnergyParams&, std::span<double>)>
void energies(benchmark::State& state) {
  const Deformation& def = fixture();
  std::vector<double> out(def.mesh().num_triangles());
  for (auto _ : state) {
    Kernel(def, EnergyParams{2.0, 1.0}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * out.size());
}

template <void (*Kernel)(const Deformation&, const EnergyParams&, std::span<std::array<Vec2, 3>>)>
void gradients(benchmark::State& state) {
  const Deformation& def = fixture();
  std::vector<std::array<Vec2, 3>> out(def.mesh().num_triangles());
  for (auto _ : state) {
    Kernel(def, EnergyParams{3.0, 1.0}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * out.size());
}

template <std::vector<kernels::PointMultiplicity> (*Kernel)(const Deformation&, std::span<const Vec2>)>
void multiplicities(benchmark::State& state) {
  const Deformation& def = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(def, queries()));
  state.SetItemsProcessed(state.iterations() * queries().size());
}

template <std::vector<std::optional<int>> (*Kernel)(const Deformation&, std::span<const Vec2>)>
void degrees(benchmark::State& state) {
  const Deformation& def = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(def, queries()));
  state.SetItemsProcessed(state.iterations() * queries().size());
}

}  // namespace

BENCHMARK(energies<kernels::triangle_energies_serial>)->Name("energies/serial");
BENCHMARK(energies<kernels::triangle_energies_parallel>)->Name("energies/parallel");
BENCHMARK(gradients<kernels::triangle_gradients_serial>)->Name("gradients/serial");
BENCHMARK(gradients<kernels::triangle_gradients_parallel>)->Name("gradients/parallel");
BENCHMARK(multiplicities<kernels::multiplicity_batch_serial>)->Name("multiplicity/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(multiplicities<kernels::multiplicity_batch_parallel>)->Name("multiplicity/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(degrees<kernels::degree_batch_serial>)->Name("degree/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(degrees<kernels::degree_batch_parallel>)->Name("degree/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
