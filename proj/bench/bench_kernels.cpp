// Serial reference vs OpenMP kernels, plus one full NLS right-hand side.
//   bench_kernels [--benchmark_filter=...]   (OMP_NUM_THREADS sets the team size)
#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "sbpnls/kernels.hpp"
#include "sbpnls/nls.hpp"
#include "sbpnls/operators.hpp"

namespace k = sbpnls::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

k::CsrView view(const sbpnls::SparseMatrix& a) {
  return {static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), a.outerIndexPtr(),
          a.innerIndexPtr(), a.valuePtr()};
}

template <bool Parallel>
void BM_csr_apply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ops = sbpnls::make_central_fd(8, n, 0.0, 1.0);
  const auto* a = ops.d2->sparse();
  const auto x = random_vector(n, 1);
  std::vector<double> y(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::omp::csr_apply(view(*a), x, y);
    else
      k::serial::csr_apply(view(*a), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a->nonZeros()));
}

template <bool Parallel>
void BM_weighted_quartic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_vector(n, 2), v = random_vector(n, 3), w = random_vector(n, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? k::omp::weighted_quartic(m, v, w)
                                      : k::serial::weighted_quartic(m, v, w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_cubic_term(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto v = random_vector(n, 5), w = random_vector(n, 6);
  std::vector<double> ov(n), ow(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::omp::cubic_term(2.0, v, w, ov, ow);
    else
      k::serial::cubic_term(2.0, v, w, ov, ow);
    benchmark::DoNotOptimize(ov.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_combine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto base = random_vector(n, 7);
  std::vector<std::vector<double>> stages;
  std::vector<const double*> terms;
  for (unsigned j = 0; j < 8; ++j) stages.push_back(random_vector(n, 10 + j));
  for (const auto& s : stages) terms.push_back(s.data());
  const std::vector<double> coeffs{0.1, 0.2, 0.0, 0.3, 0.1, 0.05, 0.15, 0.1};
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::omp::combine(out, base, 0.01, coeffs, terms);
    else
      k::serial::combine(out, base, 0.01, coeffs, terms);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Whole right-hand side through the dispatching kernels.
void BM_nls_rhs_fd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  k::set_num_threads(threads);
  const auto p = sbpnls::make_nls_params(2.0, sbpnls::make_central_fd(6, n, -35.0, 35.0));
  const auto s = random_vector(2 * n, 8);
  std::vector<double> out(2 * n);
  for (auto _ : state) {
    sbpnls::nls_rhs(p, s, out);
    benchmark::DoNotOptimize(out.data());
  }
  k::set_num_threads(1);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

constexpr long kMin = 1 << 12, kMax = 1 << 20;

}  // namespace

BENCHMARK(BM_csr_apply<false>)->Name("csr_apply/serial")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_csr_apply<true>)->Name("csr_apply/omp")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_weighted_quartic<false>)->Name("weighted_quartic/serial")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_weighted_quartic<true>)->Name("weighted_quartic/omp")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_cubic_term<false>)->Name("cubic_term/serial")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_cubic_term<true>)->Name("cubic_term/omp")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_combine<false>)->Name("combine/serial")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_combine<true>)->Name("combine/omp")->RangeMultiplier(16)->Range(kMin, kMax);
BENCHMARK(BM_nls_rhs_fd)
    ->Name("nls_rhs_fd6")
    ->ArgsProduct({{1 << 14, 1 << 18}, {1, omp_get_max_threads()}});

BENCHMARK_MAIN();
