#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "klfactor/correlation.hpp"
#include "klfactor/rng.hpp"
#include "klfactor/spectral.hpp"
#include "klfactor/weak_dist.hpp"

using namespace klfactor;

namespace {

SnapshotSet make_snapshots(Eigen::Index d, Eigen::Index m) {
  SubstreamRng rng(77, 0);
  Eigen::MatrixXd snaps(d, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) snaps(r, c) = rng.next_normal();
  }
  return SnapshotSet::uniform(std::move(snaps));
}

void BM_BuildCorrelation(benchmark::State& state) {
  const SnapshotSet snap = make_snapshots(state.range(0), state.range(0) / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_correlation(snap));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildCorrelation)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_EigDecompose(benchmark::State& state) {
  const SnapshotSet snap = make_snapshots(state.range(0), state.range(0) / 2);
  const CorrelationOp corr = build_correlation(snap);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eig_decompose(corr, snap));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigDecompose)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_PivotedCholesky(benchmark::State& state) {
  const SnapshotSet snap = make_snapshots(state.range(0), state.range(0) + 8);
  const CorrelationOp corr = build_correlation(snap);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cholesky_factor(corr));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PivotedCholesky)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_UnitaryConnect(benchmark::State& state) {
  const SnapshotSet snap = make_snapshots(state.range(0), state.range(0) + 4);
  const CorrelationOp corr = build_correlation(snap);
  const Factorization b1 = spectral_root(corr);
  const Factorization b2 = cholesky_factor(corr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(unitary_connect(b1, b2));
  }
}
BENCHMARK(BM_UnitaryConnect)->RangeMultiplier(2)->Range(16, 128);

void BM_GnsRep(benchmark::State& state) {
  SubstreamRng rng(13, 0);
  const Eigen::Index n = state.range(0);
  Eigen::MatrixXcd block(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      block(r, c) = Complex(rng.next_normal(), rng.next_normal());
    }
  }
  const ProbAlgebra alg = ProbAlgebra::matrix(
      (block * block.adjoint() +
       0.2 * Eigen::MatrixXcd::Identity(n, n)).eval(),
      "bench", true);
  const Element a = alg.element(block);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gns_rep(alg, a));
  }
}
BENCHMARK(BM_GnsRep)->DenseRange(2, 6, 2);

void BM_SynthStationary(benchmark::State& state) {
  const StationaryModel model = StationaryModel::create(
      0.05, 0.1, Eigen::VectorXd::Ones(state.range(0)), 5);
  std::vector<double> times;
  for (int i = 0; i < 128; ++i) times.push_back(0.05 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_stationary(model, times, 64));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SynthStationary)->RangeMultiplier(2)->Range(16, 256)->Complexity();

}  // namespace

BENCHMARK_MAIN();
