// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "magdirac/kernels.hpp"

namespace {

using namespace magdirac;
using kernels::cplx;

struct ModalData {
  kernels::ModalLayout lay;
  std::vector<double> profiles;
  std::vector<double> area_w;
  std::vector<cplx> coeffs;
  std::vector<cplx> radial;
};

// Synthetic profiles; the kernels only see arrays so the values do not matter.
ModalData make_modal(int K, int L, int Nr) {
  ModalData d;
  d.lay = {K, L, Nr};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  d.profiles.resize(static_cast<std::size_t>(2 * K + 1) * (L + 1) * Nr);
  for (auto& v : d.profiles) v = g(rng);
  d.area_w.assign(Nr, 1.0 / Nr);
  d.coeffs.resize(static_cast<std::size_t>(2 * K + 1) * (L + 1));
  for (auto& v : d.coeffs) v = {g(rng), g(rng)};
  d.radial.resize(static_cast<std::size_t>(2 * K + 1) * Nr);
  for (auto& v : d.radial) v = {g(rng), g(rng)};
  return d;
}

template <bool Parallel>
void BM_modes_to_radial(benchmark::State& st) {
  auto d = make_modal(24, 24, 512);
  std::vector<cplx> out(d.radial.size());
  for (auto _ : st) {
    if constexpr (Parallel)
      kernels::parallel::modes_to_radial(d.lay, d.profiles, d.coeffs, out);
    else
      kernels::serial::modes_to_radial(d.lay, d.profiles, d.coeffs, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_radial_to_modes(benchmark::State& st) {
  auto d = make_modal(24, 24, 512);
  std::vector<cplx> out(d.coeffs.size());
  for (auto _ : st) {
    if constexpr (Parallel)
      kernels::parallel::radial_to_modes(d.lay, d.profiles, d.area_w, d.radial, out);
    else
      kernels::serial::radial_to_modes(d.lay, d.profiles, d.area_w, d.radial, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_level_series(benchmark::State& st) {
  const int levels = static_cast<int>(st.range(0));
  std::vector<cplx> a(levels);
  for (int n = 0; n < levels; ++n) a[n] = std::polar(1.0, 0.37 * n);
  std::vector<double> s(4096);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.05 * i;
  std::vector<cplx> out(s.size());
  for (auto _ : st) {
    if constexpr (Parallel)
      kernels::parallel::level_series(a, s, out);
    else
      kernels::serial::level_series(a, s, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_mehler_apply(benchmark::State& st) {
  const auto grid = build_polar_grid(8.0, 128, 32);
  std::vector<cplx> f(grid.size());
  for (int i = 0; i < grid.Nr(); ++i)
    for (int j = 0; j < grid.Ntheta(); ++j)
      f[static_cast<std::size_t>(i) * grid.Ntheta() + j] = std::exp(-grid.r()[i] * grid.r()[i]);
  std::vector<kernels::Point> targets;
  for (int i = 0; i < 64; ++i) targets.push_back({0.05 * i, 0.02 * i});
  std::vector<cplx> out(targets.size());
  for (auto _ : st) {
    if constexpr (Parallel)
      kernels::parallel::mehler_apply(0.5, 1.0, grid, f, targets, out);
    else
      kernels::serial::mehler_apply(0.5, 1.0, grid, f, targets, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_modes_to_radial<false>)->Name("modes_to_radial/serial");
BENCHMARK(BM_modes_to_radial<true>)->Name("modes_to_radial/parallel");
BENCHMARK(BM_radial_to_modes<false>)->Name("radial_to_modes/serial");
BENCHMARK(BM_radial_to_modes<true>)->Name("radial_to_modes/parallel");
BENCHMARK(BM_level_series<false>)->Name("level_series/serial")->Arg(256)->Arg(4096);
BENCHMARK(BM_level_series<true>)->Name("level_series/parallel")->Arg(256)->Arg(4096);
BENCHMARK(BM_mehler_apply<false>)->Name("mehler_apply/serial");
BENCHMARK(BM_mehler_apply<true>)->Name("mehler_apply/parallel");

BENCHMARK_MAIN();
