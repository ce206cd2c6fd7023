#include <benchmark/benchmark.h>

#include <array>
#include <limits>
#include <random>

#include "nadqec/kernels.hpp"
#include "nadqec/protocol.hpp"

using namespace nadqec;

namespace {

Matrix random_matrix(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

Matrix random_density(int qubits, std::uint64_t seed) {
  const Matrix a = random_matrix(Eigen::Index{1} << qubits, seed);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

// Two-qubit Kraus operator on the middle of the register.
template <bool Parallel>
void BM_conjugate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix rho = random_density(n, 1);
  const Matrix k = random_matrix(4, 2);
  const std::array<int, 2> targets{n / 2 - 1, n / 2};
  for (auto _ : state) {
    Matrix out = Parallel ? kernels::conjugate_parallel(rho, k, targets, n) : kernels::conjugate_serial(rho, k, targets, n);
    benchmark::DoNotOptimize(out.data());
  }
}

ZzLindbladModel chain(int n) {
  ZzLindbladModel m;
  m.qubits = n;
  for (int i = 0; i < n; ++i) m.omegas.push_back(0.1 * i);
  for (int i = 0; i + 1 < n; ++i) m.couplings.push_back({{i, i + 1}, 0.05});
  m.t1_us.assign(n, 100.0);
  m.tphi_us.assign(n, 150.0);
  return m;
}

template <bool Parallel>
void BM_lindblad_rhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ZzLindbladModel m = chain(n);
  const Eigen::VectorXd e = m.energies();
  const Matrix rho = random_density(n, 3);
  Matrix out(rho.rows(), rho.cols());
  for (auto _ : state) {
    if (Parallel)
      kernels::lindblad_rhs_parallel(m, e, rho, out);
    else
      kernels::lindblad_rhs_serial(m, e, rho, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_rk4(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ZzLindbladModel m = chain(n);
  const Matrix rho = random_density(n, 4);
  for (auto _ : state) {
    Matrix out = rk4_evolve(m, rho, 1.0, 0.01, Parallel);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_conjugate<false>)->Name("conjugate/serial")->DenseRange(4, 8, 2);
BENCHMARK(BM_conjugate<true>)->Name("conjugate/parallel")->DenseRange(4, 8, 2);
BENCHMARK(BM_lindblad_rhs<false>)->Name("lindblad_rhs/serial")->DenseRange(3, 7, 2);
BENCHMARK(BM_lindblad_rhs<true>)->Name("lindblad_rhs/parallel")->DenseRange(3, 7, 2);
BENCHMARK(BM_rk4<false>)->Name("rk4_1us/serial")->Arg(5)->Arg(7);
BENCHMARK(BM_rk4<true>)->Name("rk4_1us/parallel")->Arg(5)->Arg(7);

BENCHMARK_MAIN();
