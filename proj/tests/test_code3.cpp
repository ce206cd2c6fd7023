#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "nadqec/code3.hpp"
#include "oracles.hpp"

using namespace nadqec;
constexpr double pi = std::numbers::pi;

namespace {

DensityMatrix logical_rho(double theta, double phi) {
  return DensityMatrix::from_pure(encode_ideal({theta, phi}));
}

}  // namespace

TEST_CASE("codewords") {
  const PureState one = codeword(1), zero = codeword(0);
  CHECK(std::abs(one.amplitudes()[7] - 1.0) == 0.0);
  for (int k : {4, 2, 1}) CHECK(std::abs(zero.amplitudes()[k] - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(zero.amplitudes().dot(one.amplitudes())) == 0.0);
  CHECK_THROWS_AS(codeword(2), InvalidArgument);
}

TEST_CASE("logical states and encoder") {
  CHECK(max_abs(encode_ideal({0.0, 0.0}).amplitudes() - codeword(0).amplitudes()) < 1e-15);
  CHECK(max_abs(encode_ideal({pi, 0.0}).amplitudes() - codeword(1).amplitudes()) < 1e-15);
  const Vector plus = encode_ideal({pi / 2, 0.0}).amplitudes();
  CHECK(std::abs(plus.dot(codeword(0).amplitudes()) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(plus.dot(codeword(1).amplitudes()) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK_THROWS_AS(encode_ideal({4.0, 0.0}), InvalidArgument);

  const Matrix en = encoder_unitary();
  CHECK(is_unitary(en, 1e-13));
  const std::array<int, 1> q0{0};
  for (auto [th, ph] : {std::pair{0.3, 1.1}, std::pair{2.9, 5.0}, std::pair{pi / 2, 0.0}}) {
    const Vector in = embed(logical_prep({th, ph}), q0, 3).col(0);
    CHECK(max_abs(en * in - encode_ideal({th, ph}).amplitudes()) < 1e-14);
  }
}

TEST_CASE("recovery operators match their definitions") {
  for (double g : {0.0, 0.1, 0.37, 1.0}) {
    CHECK(max_abs(recovery_r0(g) - oracle::r0(g)) < 1e-15);
    CHECK(max_abs(recovery_r1(g) - oracle::r1(g)) < 1e-15);
    for (const Matrix& r : {recovery_r0(g), recovery_r1(g)}) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(r.adjoint() * r);
      CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    }
  }
  CHECK(max_abs(RecoveryMap::approximate().r0 - RecoveryMap::ideal(0.0).r0) == 0.0);
}

TEST_CASE("block dilation") {
  for (double g : {0.0, 0.2, 0.9}) {
    for (const Matrix& r : {recovery_r0(g), recovery_r1(g)}) {
      const Matrix w = block_dilation(r);
      CHECK(is_unitary(w, 1e-12));
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(std::abs(w(2 * i, 2 * j) - r(i, j)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(block_dilation(Matrix::Identity(2, 2) * 1.5), InvalidArgument);
}

TEST_CASE("syndrome extraction") {
  const std::array<int, 1> syn{3};
  auto ancilla_one = [&](const DensityMatrix& data) {
    const DensityMatrix out = syndrome_extract(tensor(data, DensityMatrix::basis(1, 0)));
    return measure_computational(out, syn).probability(1);
  };
  CHECK(ancilla_one(DensityMatrix::basis(3, 7)) == doctest::Approx(1.0));
  CHECK(ancilla_one(DensityMatrix::basis(3, 3)) == doctest::Approx(0.0));  // A1 on qubit 0 of |111>
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 5; ++k) CHECK(ancilla_one(logical_rho(pi * u(rng), 2 * pi * u(rng) * 0.999)) == doctest::Approx(1.0).epsilon(1e-14));
  // Native circuit agrees with the permutation.
  Circuit c = syndrome_circuit();
  const Matrix u4 = c.unitary();
  const DensityMatrix r(oracle::random_density(16, rng));
  const std::array<int, 4> all{0, 1, 2, 3};
  CHECK(max_abs(syndrome_extract(r).matrix() - run_circuit(r, c, all).matrix()) < 1e-13);
}

TEST_CASE("recover keeps the success branch and reports failure weight") {
  std::mt19937_64 rng(6);
  const DensityMatrix rho(oracle::random_density(8, rng));
  for (int s : {0, 1}) {
    const Matrix r = s == 1 ? oracle::r0(0.25) : oracle::r1(0.25);
    const RecoveryBranch b = recover(rho, s, RecoveryMap::ideal(0.25));
    CHECK(max_abs(b.success.matrix() - r * rho.matrix() * r.adjoint()) < 1e-13);
    const Matrix fail = Matrix::Identity(8, 8) - r.adjoint() * r;
    CHECK(b.failure_weight == doctest::Approx((fail * rho.matrix()).trace().real()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(recover(rho, 2, RecoveryMap::ideal(0.1)), InvalidArgument);
}

TEST_CASE("qec cycle against the brute-force Kraus enumeration") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double th = pi * u(rng), ph = 2 * pi * u(rng) * 0.999, g = 0.4 * u(rng), p = 0.2 * u(rng);
    for (bool approx : {false, true}) {
      const RecoveryMap map = approx ? RecoveryMap::approximate() : RecoveryMap::ideal(g);
      const QecOutcome out = qec_cycle(logical_rho(th, ph), {g, p}, map, encode_ideal({th, ph}));
      const double rg = approx ? 0.0 : g;
      const auto ref = oracle::brute_force_cycle(oracle::logical(th, ph), g, p, oracle::r0(rg), oracle::r1(rg));
      CHECK(out.success_probability == doctest::Approx(ref.p_success).epsilon(1e-12));
      CHECK(out.fidelity == doctest::Approx(ref.fidelity).epsilon(1e-12));
      CHECK(max_abs(out.conditional_state.matrix() - ref.branch / ref.p_success) < 1e-12);
    }
  }
}

TEST_CASE("pure damping fidelity and success probability") {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double th = pi * i / 9.0, g = 0.3 * j / 9.0;
      const QecOutcome out = qec_cycle(logical_rho(th, 0.0), {g, 0.0}, RecoveryMap::ideal(g), encode_ideal({th, 0.0}));
      CHECK(std::abs(out.fidelity - oracle_fidelity_ad(th, g)) < 1e-12);
      CHECK(std::abs(out.success_probability - oracle_success_probability(th, g, 0.0, SuccessForm::printed_full)) < 1e-12);
    }
  }
  const QecOutcome w = qec_cycle(logical_rho(pi, 0.0), {0.2, 0.0}, RecoveryMap::ideal(0.2), codeword(1));
  CHECK(w.fidelity == doctest::Approx(1.0 / 1.04).epsilon(1e-12));
  const QecOutcome h = qec_cycle(logical_rho(pi / 2, 0.0), {0.2, 0.0}, RecoveryMap::ideal(0.2), encode_ideal({pi / 2, 0.0}));
  CHECK(h.fidelity == doctest::Approx(1.01 / 1.02).epsilon(1e-12));
}

TEST_CASE("success probability: simulation matches the full printed form, not the short form sign") {
  const QecOutcome out = qec_cycle(logical_rho(pi, 0.0), {0.1, 0.0}, RecoveryMap::ideal(0.1));
  CHECK(out.success_probability == doctest::Approx(0.81 * 1.01).epsilon(1e-12));
  CHECK(oracle_success_probability(pi, 0.1, 0.0, SuccessForm::printed_short) == doctest::Approx(0.8019));
  CHECK(std::abs(out.success_probability - oracle_success_probability(pi, 0.1, 0.0, SuccessForm::printed_short)) > 1e-2);
  // theta = 0 reduces to (1-g)^2 for the noiseless-dephasing case
  const QecOutcome z = qec_cycle(logical_rho(0.0, 0.0), {0.15, 0.0}, RecoveryMap::ideal(0.15));
  CHECK(z.success_probability == doctest::Approx(0.85 * 0.85).epsilon(1e-12));
  CHECK(oracle_success_probability(0.0, 0.0, 0.0) == 1.0);
  CHECK(oracle_success_probability(0.0, 0.1, 0.05) == doctest::Approx(oracle_success_lower_bound(0.1, 0.05)).epsilon(1e-14));
  for (double th : {0.2, 1.0, 2.0, pi}) CHECK(oracle_success_probability(th, 0.1, 0.05) >= oracle_success_lower_bound(0.1, 0.05));
}

TEST_CASE("approximate map equals the ideal one at gamma = 0") {
  std::mt19937_64 rng(12);
  const DensityMatrix rho(oracle::random_density(8, rng));
  const DensityMatrix a = correct(rho, RecoveryMap::approximate());
  const DensityMatrix b = correct(rho, RecoveryMap::ideal(0.0));
  CHECK(max_abs(a.matrix() - b.matrix()) < 1e-15);
}

TEST_CASE("codewords under dephasing") {
  for (double p : {0.001, 0.005, 0.01}) {
    const double g = 0.0;
    const QecOutcome z = qec_cycle(logical_rho(0.0, 0.0), {g, p}, RecoveryMap::ideal(g), codeword(0));
    CHECK(std::abs(z.fidelity - 1.0) < 10 * p * p);
    const QecOutcome o = qec_cycle(logical_rho(pi, 0.0), {g, p}, RecoveryMap::ideal(g), codeword(1));
    CHECK(std::abs(o.fidelity - 1.0) < 10 * p * p);
  }
}

TEST_CASE("bystander qubits ride along") {
  std::mt19937_64 rng(14);
  const DensityMatrix data = logical_rho(1.1, 0.4);
  const DensityMatrix spect(oracle::random_density(2, rng));
  const DensityMatrix branch = correct(tensor(data, spect), RecoveryMap::ideal(0.1));
  const DensityMatrix ref = correct(data, RecoveryMap::ideal(0.1));
  CHECK(max_abs(branch.matrix() - kron(ref.matrix(), spect.matrix())) < 1e-13);
}

TEST_CASE("series coefficients") {
  // The published |+_L> shortcut is the theta = pi/2 case of the general printed form.
  for (double g : {0.0, 0.01, 0.03}) {
    for (double p : {0.0, 0.02}) {
      CHECK(oracle_fidelity_plus_printed(g, p, SeriesVariant::ideal) ==
            doctest::Approx(oracle_fidelity_series(pi / 2, g, p, SeriesVariant::ideal)).epsilon(1e-15));
      CHECK(oracle_fidelity_plus_printed(g, p, SeriesVariant::approximate) ==
            doctest::Approx(oracle_fidelity_series(pi / 2, g, p, SeriesVariant::approximate)).epsilon(1e-15));
    }
  }
  CHECK(oracle_fidelity_series(1.0, 0.0, 0.0, SeriesVariant::ideal) == 1.0);
  CHECK(oracle_fidelity_series(pi, 0.03, 0.0, SeriesVariant::ideal) == doctest::Approx(1 - 0.0009));
  CHECK(oracle_fidelity_series(pi / 2, 0.03, 0.0, SeriesVariant::approximate) == doctest::Approx(1 - 0.00045));

  // The consistent ideal gamma^2 coefficient is the Taylor term of the exact damping formula.
  for (double th : {0.3, 1.2, 2.5}) {
    const double g = 1e-4;
    const double exact_c2 = (oracle_fidelity_ad(th, g) - 1.0) / (g * g);
    CHECK(series_coefficients(th, SeriesVariant::ideal, SeriesForm::consistent).gg == doctest::Approx(exact_c2).epsilon(1e-6));
  }
}

TEST_CASE("time-domain series agree with the (gamma, p) substitution") {
  // The printed approximate-map time form is exactly the substituted (gamma, p) form.
  for (double th : {0.0, 0.7, pi / 2, 2.2, pi}) {
    for (auto [t1, t2] : {std::pair{220.0, 440.0}, std::pair{100.0, 120.0}, std::pair{300.0, 150.0}}) {
      for (double t : {1.0, 5.0, 12.0}) {
        const double printed = oracle_fidelity_series_time(th, t, t1, t2, SeriesVariant::approximate, SeriesForm::printed);
        const double derived = oracle_fidelity_series_time(th, t, t1, t2, SeriesVariant::approximate, SeriesForm::consistent);
        CHECK(std::abs(printed - derived) < 1e-13);
      }
    }
  }
}

TEST_CASE("consistent series tracks simulation to cubic order") {
  const std::array<double, 3> vals{0.005, 0.01, 0.02};
  for (int i = 0; i <= 12; ++i) {
    const double th = pi * i / 12.0;
    for (double g : vals) {
      for (double p : vals) {
        const double cubic = std::pow(std::max(g, p), 3);
        for (bool approx : {false, true}) {
          const RecoveryMap map = approx ? RecoveryMap::approximate() : RecoveryMap::ideal(g);
          const auto var = approx ? SeriesVariant::approximate : SeriesVariant::ideal;
          const QecOutcome out = qec_cycle(logical_rho(th, 0.0), {g, p}, map, encode_ideal({th, 0.0}));
          CHECK(std::abs(out.fidelity - oracle_fidelity_series(th, g, p, var, SeriesForm::consistent)) < 5 * cubic);
        }
      }
    }
  }
}
