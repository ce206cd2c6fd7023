#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "nadqec/noise.hpp"
#include "oracles.hpp"

using namespace nadqec;

TEST_CASE("gamma and p of t") {
  CHECK(gamma_of_t(0.0, 100.0) == 0.0);
  CHECK(gamma_of_t(1e6, 100.0) == doctest::Approx(1.0));
  CHECK(gamma_of_t(30.0, 200.0) == doctest::Approx(0.1393).epsilon(1e-3));
  CHECK(p_of_t(0.0, 50.0) == 0.0);
  CHECK(p_of_t(1e6, 50.0) == doctest::Approx(0.5));
  CHECK(p_of_t(50.0, 50.0) == doctest::Approx(0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(p_of_t(10.0, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(gamma_of_t(-1.0, 100.0), InvalidArgument);
  CHECK_THROWS_AS(p_of_t(-1.0, 100.0), InvalidArgument);
}

TEST_CASE("amplitude damping") {
  const std::array<int, 1> q{0};
  const DensityMatrix one = DensityMatrix::basis(1, 1);
  CHECK(max_abs(apply_channel(one, amplitude_damping(0.0), 0).matrix() - one.matrix()) < 1e-15);
  CHECK(max_abs(apply_channel(DensityMatrix::maximally_mixed(1), amplitude_damping(1.0), 0).matrix() -
                DensityMatrix::basis(1, 0).matrix()) < 1e-15);
  const DensityMatrix out = apply_channel(one, amplitude_damping(0.25), 0);
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.25));
  CHECK(out.matrix()(1, 1).real() == doctest::Approx(0.75));
  CHECK_THROWS_AS(amplitude_damping(1.1), InvalidArgument);
  CHECK_THROWS_AS(amplitude_damping(-0.1), InvalidArgument);
}

TEST_CASE("AD composition law over a grid") {
  std::mt19937_64 rng(1);
  const DensityMatrix rho(oracle::random_density(2, rng));
  for (double g1 : {0.0, 0.1, 0.35, 0.8}) {
    for (double g2 : {0.05, 0.2, 0.5, 1.0}) {
      const DensityMatrix two = apply_channel(apply_channel(rho, amplitude_damping(g1), 0), amplitude_damping(g2), 0);
      const DensityMatrix one = apply_channel(rho, amplitude_damping(g1 + g2 - g1 * g2), 0);
      CHECK(max_abs(two.matrix() - one.matrix()) < 1e-14);
    }
  }
  // gamma(t1 + t2) composes the same way.
  const double t1 = 100.0;
  const double a = gamma_of_t(12.0, t1), b = gamma_of_t(31.0, t1);
  CHECK(gamma_of_t(43.0, t1) == doctest::Approx(a + b - a * b).epsilon(1e-14));
}

TEST_CASE("dephasing") {
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const DensityMatrix p = DensityMatrix::from_pure(PureState(plus));
  CHECK(max_abs(apply_channel(p, dephasing(0.0), 0).matrix() - p.matrix()) < 1e-15);
  CHECK(max_abs(apply_channel(p, dephasing(0.5), 0).matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-15);
  std::mt19937_64 rng(2);
  const DensityMatrix rho(oracle::random_density(2, rng));
  for (double p1 : {0.01, 0.2, 0.45}) {
    for (double p2 : {0.03, 0.3}) {
      const DensityMatrix two = apply_channel(apply_channel(rho, dephasing(p1), 0), dephasing(p2), 0);
      const DensityMatrix one = apply_channel(rho, dephasing(p1 + p2 - 2 * p1 * p2), 0);
      CHECK(max_abs(two.matrix() - one.matrix()) < 1e-14);
      // off-diagonal scales by 1 - 2p
      const DensityMatrix d = apply_channel(rho, dephasing(p1), 0);
      CHECK(std::abs(d.matrix()(0, 1) - (1 - 2 * p1) * rho.matrix()(0, 1)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(dephasing(0.6), InvalidArgument);
}

TEST_CASE("depolarizing") {
  std::mt19937_64 rng(4);
  const DensityMatrix rho(oracle::random_density(2, rng));
  CHECK(max_abs(apply_channel(rho, depolarizing(0.0, 1), 0).matrix() - rho.matrix()) < 1e-15);
  // With weight p/3 per Pauli, p = 3/4 is the fully depolarizing point.
  CHECK(max_abs(apply_channel(rho, depolarizing(0.75, 1), 0).matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-14);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  const std::array<int, 2> pair{0, 1};
  CHECK(max_abs(apply_channel(mixed, depolarizing(0.6, 2), pair).matrix() - mixed.matrix()) < 1e-15);
  CHECK(depolarizing(0.3, 2).ops().size() == 16);
  CHECK_THROWS_AS(depolarizing(0.1, 3), InvalidArgument);
  CHECK_THROWS_AS(depolarizing(1.5, 1), InvalidArgument);
}

TEST_CASE("channel trace properties") {
  Matrix k = Matrix::Zero(2, 2);
  k(0, 0) = 0.5;
  CHECK_THROWS_AS(KrausChannel({k}, TraceProperty::preserving), InvalidArgument);
  const KrausChannel partial({k}, TraceProperty::non_increasing);
  const DensityMatrix out = apply_channel(DensityMatrix::maximally_mixed(1), partial, 0);
  CHECK(out.trace() <= 1.0);
  CHECK(!out.is_normalized());
  Matrix big = Matrix::Identity(2, 2) * 1.2;
  CHECK_THROWS_AS(KrausChannel({big}, TraceProperty::non_increasing), InvalidArgument);
  for (double g : {0.0, 0.3, 1.0}) CHECK(amplitude_damping(g).completeness_norm() == doctest::Approx(1.0));
}

TEST_CASE("AD on three qubits of |111>") {
  DensityMatrix rho = DensityMatrix::basis(3, 7);
  for (int q = 0; q < 3; ++q) rho = apply_channel(rho, amplitude_damping(0.1), q);
  CHECK(rho.matrix()(7, 7).real() == doctest::Approx(0.729).epsilon(1e-14));
  // brute-force tensor of single-qubit results
  Matrix one = Matrix::Zero(2, 2);
  one(0, 0) = 0.1;
  one(1, 1) = 0.9;
  CHECK(max_abs(rho.matrix() - oracle::kron3(one, one, one)) < 1e-15);
}

TEST_CASE("disjoint channels commute") {
  std::mt19937_64 rng(8);
  const DensityMatrix rho(oracle::random_density(8, rng));
  const auto ad = amplitude_damping(0.3);
  const auto dp = dephasing(0.2);
  const DensityMatrix a = apply_channel(apply_channel(rho, ad, 0), dp, 2);
  const DensityMatrix b = apply_channel(apply_channel(rho, dp, 2), ad, 0);
  CHECK(max_abs(a.matrix() - b.matrix()) < 1e-14);
}

TEST_CASE("readout flips") {
  OutcomeDistribution d{{0}, {1.0, 0.0}};
  CHECK(readout_flip(d, 0.0).probabilities == d.probabilities);
  CHECK(readout_flip(d, 0.02).probability(0) == doctest::Approx(0.98));
  // single-bit proxy: F* = F(1-E) + (1-F)E
  for (double f : {0.3, 0.9}) {
    OutcomeDistribution g{{0}, {f, 1.0 - f}};
    CHECK(readout_flip(g, 0.05).probability(0) == doctest::Approx(f * 0.95 + (1 - f) * 0.05));
  }
  OutcomeDistribution two{{0, 1}, {0.0, 0.0, 0.0, 1.0}};
  const auto r = readout_flip(two, ReadoutError{0.1, 0.2});
  CHECK(r.probability(0) == doctest::Approx(0.04));
  CHECK(r.probability(3) == doctest::Approx(0.64));
  CHECK(r.total() == doctest::Approx(1.0));
}

TEST_CASE("noise parameters") {
  QubitNoise q{100.0, 200.0};
  CHECK(std::isinf(q.tphi_us()));
  q.t2_us = 100.0;
  CHECK(q.tphi_us() == doctest::Approx(200.0));
  q.t2_us = 250.0;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  NoiseParams np;
  np.e_meas = 0.6;
  CHECK_THROWS_AS(np.validate(), InvalidArgument);
  np.e_meas = 0.01;
  CHECK_NOTHROW(np.validate());
  CHECK(&np.qubit(5) == &np.qubits.front());
}

TEST_CASE("idle noise is AD then dephasing") {
  const QubitNoise q{220.0, 300.0};
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = DensityMatrix::from_pure(PureState(plus));
  const DensityMatrix out = apply_idle(rho, 0, 25.0, q);
  // coherence decays as exp(-t/T2)
  CHECK(std::abs(out.matrix()(0, 1)) == doctest::Approx(0.5 * std::exp(-25.0 / 300.0)).epsilon(1e-12));
  CHECK(out.matrix()(1, 1).real() == doctest::Approx(0.5 * std::exp(-25.0 / 220.0)).epsilon(1e-12));
}
