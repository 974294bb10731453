// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "uqoc/hessian.hpp"
#include "uqoc/parallel.hpp"
#include "uqoc/problem.hpp"
#include "uqoc/randeig.hpp"

namespace {

using namespace uqoc;

// Problems are cached per mesh so setup stays out of the timed loops.
const Problem &problem(int nx) {
  static std::map<int, Problem> cache;
  auto it = cache.find(nx);
  if (it == cache.end()) {
    ProblemSpec spec;
    spec.nx = nx;
    spec.ny = nx / 2;
    it = cache.emplace(nx, build_problem(spec)).first;
  }
  return it->second;
}

void BM_StateSolve(benchmark::State &st) {
  set_max_jobs(1);
  const Problem &pr = problem(static_cast<int>(st.range(0)));
  const Vec m = pr.prior->mean();
  for (auto _ : st) benchmark::DoNotOptimize(pr.model->solve_state(m, pr.z0));
}
BENCHMARK(BM_StateSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_HessianApply(benchmark::State &st) {
  set_max_jobs(1);
  const Problem &pr = problem(static_cast<int>(st.range(0)));
  const auto lp =
      std::make_shared<LinearizationPoint>(linearize(*pr.model, pr.prior->mean(), pr.z0));
  const HessOp hess(lp);
  Rng rng(1);
  const Vec dir = rng.normal_vector(pr.prior->dim());
  for (auto _ : st) benchmark::DoNotOptimize(hess.apply(dir));
}
BENCHMARK(BM_HessianApply)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_HessianGevp(benchmark::State &st) {
  set_max_jobs(1);
  const Problem &pr = problem(32);
  const auto lp =
      std::make_shared<LinearizationPoint>(linearize(*pr.model, pr.prior->mean(), pr.z0));
  const HessOp hess(lp);
  const int k = static_cast<int>(st.range(0));
  for (auto _ : st) {
    Rng rng(1);
    benchmark::DoNotOptimize(hessian_gevp(hess, *pr.prior, k, 10, rng));
  }
}
BENCHMARK(BM_HessianGevp)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
