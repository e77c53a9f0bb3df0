#include <benchmark/benchmark.h>

#include <cartanlab/cartan.hpp>
#include <cartanlab/developing.hpp>
#include <cartanlab/jets.hpp>
#include <cartanlab/presets.hpp>
#include <cartanlab/prolongation.hpp>
#include <cartanlab/sampling.hpp>

using namespace cartanlab;

namespace {

void bm_exp_log_roundtrip(benchmark::State& state, const char* name) {
  const MatrixRep rep = rep_preset(name);
  RandomStream rng(kDefaultSeed);
  const Vec x = rng.vector(rep.algebra().dim(), 0.4);
  for (auto _ : state) {
    const Mat g = group_exp(rep, x);
    benchmark::DoNotOptimize(group_log(rep, g));
  }
}
BENCHMARK_CAPTURE(bm_exp_log_roundtrip, so3, "so3");
BENCHMARK_CAPTURE(bm_exp_log_roundtrip, sl2, "sl2");

void bm_curvature_poly(benchmark::State& state) {
  const CartanConnection mc = maurer_cartan("so3/so2", 1.0);
  const FormField k = curvature(mc);
  const Vec x = Vec::Zero(k.chart_dim());
  const std::vector<Vec> args = {Vec::Unit(k.chart_dim(), 0), Vec::Unit(k.chart_dim(), 1)};
  for (auto _ : state) benchmark::DoNotOptimize(k.eval(x, args));
}
BENCHMARK(bm_curvature_poly);

void bm_curvature_sampled(benchmark::State& state) {
  const CartanConnection mc = maurer_cartan("so3/so2", 1.0);
  const FormField kappa = mc.kappa();
  const FormField opaque = FormField::sampled(kappa.domain(), 1, kappa.target_dim(),
                                              kappa.as_evaluator(), 2);
  const GeneralizedCartanConnection conn(mc.model(), opaque);
  const FormField k = curvature(conn);
  const Vec x = Vec::Zero(k.chart_dim());
  const std::vector<Vec> args = {Vec::Unit(k.chart_dim(), 0), Vec::Unit(k.chart_dim(), 1)};
  for (auto _ : state) benchmark::DoNotOptimize(k.eval(x, args));
}
BENCHMARK(bm_curvature_sampled);

void bm_develop(benchmark::State& state) {
  const CartanConnection mc = maurer_cartan("so3/so3", 1.0);
  const MatrixRep rep = rep_preset("so3");
  RandomStream rng(kDefaultSeed);
  const Path path =
      Path::polynomial({rng.vector(3, 0.25), rng.vector(3, 0.2), rng.vector(3, 0.2)});
  const Mat start = Mat::Identity(3, 3);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(develop(mc.kappa(), rep, path, start, steps).endpoint());
}
BENCHMARK(bm_develop)->Arg(256)->Arg(1024);

void bm_prolong(benchmark::State& state, const char* name) {
  const LinearLieAlgebra g = LinearLieAlgebra::from_rep(rep_preset(name));
  for (auto _ : state) benchmark::DoNotOptimize(prolong(g, 2));
}
BENCHMARK_CAPTURE(bm_prolong, co3, "co3");
BENCHMARK_CAPTURE(bm_prolong, gl2, "gl2");

void bm_jet_compose(benchmark::State& state) {
  RandomStream rng(kDefaultSeed);
  auto random_jet = [&rng] {
    std::vector<Polynomial> comp;
    for (int i = 0; i < 2; ++i) {
      Polynomial p(2);
      for (int v = 0; v < 2; ++v)
        p += Polynomial::variable(2, v) * ((v == i ? 1.0 : 0.0) + rng.uniform(-0.3, 0.3));
      for (int v = 0; v < 2; ++v)
        for (int w = v; w < 2; ++w)
          for (int u = w; u < 2; ++u)
            p += Polynomial::variable(2, v) * Polynomial::variable(2, w) *
                 Polynomial::variable(2, u) * rng.uniform(-0.3, 0.3);
      comp.push_back(p);
    }
    return JetElement(PolynomialMap{comp}, 3);
  };
  const JetElement a = random_jet(), b = random_jet();
  for (auto _ : state) benchmark::DoNotOptimize(jet_compose(a, b));
}
BENCHMARK(bm_jet_compose);

} // namespace

BENCHMARK_MAIN();
