#include <doctest.h>

#include <array>
#include <random>
#include <vector>

#include "nadqec/kernels.hpp"
#include "oracles.hpp"

using namespace nadqec;

TEST_CASE("parallel conjugation matches the dense serial reference") {
  std::mt19937_64 rng(123);
  for (int n : {2, 4, 6, 7}) {
    const Matrix rho = oracle::random_density(1 << n, rng);
    std::vector<std::vector<int>> target_sets{{0}, {n - 1}, {n - 1, 0}};
    if (n >= 3) target_sets.push_back({1, n - 1, 0});
    for (const auto& t : target_sets) {
      const Matrix k = oracle::random_unitary(1 << t.size(), rng) * 0.7;
      const Matrix a = kernels::conjugate_serial(rho, k, t, n);
      const Matrix b = kernels::conjugate_parallel(rho, k, t, n);
      CHECK(max_abs(a - b) < 1e-13);
    }
  }
}

TEST_CASE("row application matches the embedded operator") {
  std::mt19937_64 rng(5);
  const int n = 5;
  const Matrix m = oracle::random_density(1 << n, rng);
  const Matrix op = oracle::random_unitary(4, rng);
  const std::array<int, 2> t{4, 2};
  Matrix s = m, p = m;
  kernels::apply_rows_serial(s, op, t, n);
  kernels::apply_rows_parallel(p, op, t, n);
  const Matrix ref = embed(op, t, n) * m;
  CHECK(max_abs(s - ref) < 1e-13);
  CHECK(max_abs(p - ref) < 1e-13);
}

TEST_CASE("kernels reject bad targets") {
  Matrix m = Matrix::Identity(4, 4);
  const std::array<int, 1> bad{2};
  CHECK_THROWS_AS(kernels::apply_rows_serial(m, Matrix::Identity(2, 2), bad, 2), InvalidArgument);
  const std::array<int, 2> dup{1, 1};
  CHECK_THROWS_AS(kernels::apply_rows_serial(m, Matrix::Identity(4, 4), dup, 2), InvalidArgument);
}
