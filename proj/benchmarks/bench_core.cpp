// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "aopt/forward.hpp"
#include "aopt/fractional.hpp"

namespace {

aopt::ReferenceDomain standard_domain() {
  aopt::ReferenceDomain dom;
  dom.Lx = 1.0;
  dom.H_fix = 0.25;
  dom.ell0 = 1.0;
  dom.Nx = 33;
  dom.Nz_fix = 9;
  dom.Nz_var = 33;
  return dom;
}

aopt::BoundaryProfile bumped(const aopt::ReferenceDomain& dom) {
  aopt::BoundaryProfile p = aopt::constant_profile(dom);
  for (int i = 2; i < dom.Nx - 2; ++i) {
    const double xf = static_cast<double>(i) / (dom.Nx - 1);
    p.ell[i] += 0.1 * std::pow(std::sin(M_PI * xf), 4);
  }
  return p;
}

void BM_mapped_operator_apply(benchmark::State& state) {
  const aopt::ReferenceDomain dom = standard_domain();
  const aopt::MappedCoefficients coeffs = aopt::transform_coefficients(bumped(dom), dom);
  const aopt::SparseOperator d2 = aopt::assemble_mapped_d2(coeffs);
  aopt::Vec x(dom.num_nodes(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(d2.apply(x));
  }
}
BENCHMARK(BM_mapped_operator_apply);

void BM_fractional_apply(benchmark::State& state) {
  const aopt::NeumannSpectrum spec(129, 1.0);
  aopt::Vec x(129, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spec.apply(x, 1.5));
  }
}
BENCHMARK(BM_fractional_apply);

void BM_forward_solve(benchmark::State& state) {
  const aopt::ReferenceDomain dom = standard_domain();
  aopt::PhysicalParams params;
  params.c = 1.0;
  params.b = 0.1;
  params.k = 0.5;
  params.beta_a = 1.0;
  aopt::TimeGrid tg;
  tg.T = 0.25;
  tg.Nt = 16;
  aopt::SpaceTimeField g(tg.Nt + 1, dom.Nx), h(tg.Nt + 1, dom.plate_nodes());
  for (int n = 2; n <= tg.Nt; ++n)
    for (int i = 0; i < dom.Nx; ++i)
      g.at(n, i) = 0.05 * std::sin(M_PI * n / double(tg.Nt)) * std::sin(M_PI * i / double(dom.Nx - 1));
  const aopt::BoundaryProfile prof = bumped(dom);
  const aopt::InitialData init = aopt::InitialData::zero(dom);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aopt::solve_forward(params, g, h, prof, dom, init, tg));
  }
}
BENCHMARK(BM_forward_solve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
