// Microbenchmarks for the segment propagator: fresh-decomposition throughput
// versus the cached path taken by periodic pulse trains.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qcbench/galerkin.hpp"
#include "qcbench/propagator.hpp"
#include "qcbench/synth.hpp"

namespace {

using namespace qcbench;

prop::PiecewiseConstantControl distinct_values_control(int segments) {
  std::vector<double> bp{0.0}, vals;
  for (int i = 0; i < segments; ++i) {
    bp.push_back(0.05 * (i + 1));
    vals.push_back(0.2 * std::sin(0.7 * i) + 0.01 * i);  // all distinct
  }
  return prop::PiecewiseConstantControl(bp, vals);
}

void BM_propagate_fresh_segments(benchmark::State& state) {
  int order = int(state.range(0));
  auto comp = galerkin::compress(spectral::make_planar_rotor(), order);
  auto u = distinct_values_control(100);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(order);
  psi0(0) = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop::propagate_final(comp, u, psi0));
  }
  state.SetItemsProcessed(state.iterations() * u.segments());
}
BENCHMARK(BM_propagate_fresh_segments)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_propagate_pulse_train(benchmark::State& state) {
  // A tiled pulse revisits the same 64 control values every period, so the
  // per-run eigenbasis cache turns segments into matvecs.
  int order = int(state.range(0));
  auto sys = spectral::make_planar_rotor();
  auto comp = galerkin::compress(sys, order);
  auto design = synth::design_transfer(sys, 1, 2, 0.2, synth::PulseShape::cosine);
  auto u = design.control;
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(order);
  psi0(0) = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop::propagate_final(comp, u, psi0));
  }
  state.SetItemsProcessed(state.iterations() * u.segments());
}
BENCHMARK(BM_propagate_pulse_train)->Arg(8)->Arg(16)->Arg(32);

void BM_anharmonic_compress(benchmark::State& state) {
  int order = int(state.range(0));
  auto sys = spectral::make_anharmonic(3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(galerkin::compress(sys, order));
  }
}
BENCHMARK(BM_anharmonic_compress)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
