#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nadqec/protocol.hpp"
#include "nadqec/synth.hpp"
#include "oracles.hpp"

using namespace nadqec;
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

namespace {

NoiseParams noise_t1(double t1, double t2) {
  NoiseParams n;
  n.qubits = {QubitNoise{t1, t2}};
  return n;
}

double phase_distance_to_identity(const Matrix& u) {
  const Complex ph = u(0, 0) / std::abs(u(0, 0));
  return max_abs(u / ph - Matrix::Identity(u.rows(), u.cols()));
}

}  // namespace

TEST_CASE("schedule_rounds") {
  CHECK(schedule_rounds(40, 30).delays_us() == std::vector<double>{30, 10});
  CHECK(schedule_rounds(30, 30).delays_us() == std::vector<double>{30});
  CHECK(schedule_rounds(0, 30).rounds() == 0);
  const Schedule s = schedule_rounds(100.1, 0.3);
  std::int64_t sum = 0;
  for (auto d : s.delays_ps) {
    CHECK(d > 0);
    CHECK(d <= to_ps(0.3));
    sum += d;
  }
  CHECK(sum == to_ps(100.1));
  CHECK(s.rounds() == 334);
  CHECK_THROWS_AS(schedule_rounds(-1, 30), InvalidArgument);
  CHECK_THROWS_AS(schedule_rounds(10, 0), InvalidArgument);
}

TEST_CASE("total evolution time") {
  CHECK(total_evolution_time(schedule_rounds(40, 30)) == 47.24);
  CHECK(total_evolution_time(Schedule{}) == 1.096);
  CHECK(total_evolution_time(schedule_rounds(30, 30)) == 34.168);
  // A 1 us second delay is shorter than the 2.72 us reset.
  CHECK(total_evolution_time(schedule_rounds(31, 30)) == doctest::Approx(1.096 + 31 + 2 * 3.072 + 1.72).epsilon(1e-14));
}

TEST_CASE("multi-QEC without noise is perfect") {
  ProtocolConfig c;
  c.logical = {1.1, 0.4};
  c.total_free_us = {0, 10, 45, 90};
  for (auto v : {RecoveryVariant::ideal, RecoveryVariant::approximate}) {
    c.variant = v;
    for (const auto& p : run_multiqec(c, noise_t1(inf, inf))) {
      CHECK(p.fidelity == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("single round of AD matches the closed form") {
  ProtocolConfig c;
  c.logical = {pi, 0.0};
  c.total_free_us = {5, 20, 30};
  const auto pts = run_multiqec(c, noise_t1(220, 440));
  for (const auto& p : pts) {
    CHECK(p.rounds == 1);
    const double g = 1.0 - std::exp(-p.total_free_us / 220.0);
    CHECK(std::abs(p.fidelity - 1.0 / (1.0 + g * g)) < 1e-10);
  }
}

TEST_CASE("n rounds compose as iterated cycles") {
  ProtocolConfig c;
  c.logical = {0.7, 1.3};
  c.total_free_us = {75};
  const NoiseParams nz = noise_t1(100, 150);
  const MultiQecPoint p = run_multiqec(c, nz).front();
  CHECK(p.rounds == 3);

  const PureState target = encode_ideal(c.logical);
  DensityMatrix rho = DensityMatrix::from_pure(target);
  double ps = 1.0;
  for (double d : {30.0, 30.0, 15.0}) {
    const NoiseStrength ns{1.0 - std::exp(-d / 100.0), p_of_t(d, nz.qubit(0).tphi_us())};
    const QecOutcome o = qec_cycle(rho, ns, RecoveryMap::ideal(ns.gamma));
    ps *= o.success_probability;
    rho = o.conditional_state;
  }
  CHECK(std::abs(p.fidelity - fidelity(rho, target)) < 1e-12);
  CHECK(std::abs(p.success_probability - ps) < 1e-12);
  CHECK(p.total_evolution_us == doctest::Approx(1.096 + 75 + 3 * 3.072));
}

TEST_CASE("decoded all-zero probability equals fidelity") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const LogicalStateSpec s{pi * u(rng), 2 * pi * u(rng)};
    const QecOutcome o = qec_cycle(DensityMatrix::from_pure(encode_ideal(s)), {0.3 * u(rng), 0.2 * u(rng)},
                                   RecoveryMap::approximate(), encode_ideal(s));
    CHECK(std::abs(decoded_all_zero_probability(o.conditional_state, s) - o.fidelity) < 1e-12);
  }
}

TEST_CASE("logical |1_L> outlives the physical T1") {
  ProtocolConfig c;
  c.logical = {pi, 0.0};
  for (int k = 0; k <= 10; ++k) c.total_free_us.push_back(30.0 * k);
  const auto pts = run_multiqec(c, noise_t1(220, 440));
  std::vector<double> t, f;
  for (const auto& p : pts) {
    t.push_back(p.total_evolution_us);
    f.push_back(p.fidelity);
  }
  CHECK(fit_exponential_lifetime(t, f).lifetime_us > 440.0);
}

TEST_CASE("lifetime fit recovers an exponential") {
  std::vector<double> t{0, 10, 20, 50}, f;
  for (double x : t) f.push_back(0.9 * std::exp(-x / 123.0));
  const LifetimeFit r = fit_exponential_lifetime(t, f);
  CHECK(r.lifetime_us == doctest::Approx(123.0));
  CHECK(r.amplitude == doctest::Approx(0.9));
}

TEST_CASE("csv output") {
  MultiQecPoint p;
  p.total_evolution_us = 47.24;
  p.fidelity = 0.123456789012345;
  p.rounds = 2;
  p.variant = RecoveryVariant::approximate;
  std::ostringstream os;
  write_multiqec_csv(os, std::span<const MultiQecPoint>(&p, 1));
  CHECK(os.str() ==
        "total_evolution_us,fidelity,success_probability,rounds,variant,chadd\n47.24,0.123456789,1,2,approximate,0\n");
}

TEST_CASE("CHaDD sign structure") {
  const ChaddSequence s = chadd_sequence(2, 1.0);
  CHECK(s.interval_count() == 8);
  const auto z1 = s.toggling_signs(0), z2 = s.toggling_signs(1);
  CHECK(z1 == std::vector<int>{1, -1, -1, 1, 1, -1, -1, 1});
  CHECK(z2 == std::vector<int>{1, 1, -1, -1, 1, 1, -1, -1});
  int s1 = 0, s2 = 0, s12 = 0;
  for (int k = 0; k < 8; ++k) {
    s1 += z1[static_cast<std::size_t>(k)];
    s2 += z2[static_cast<std::size_t>(k)];
    s12 += z1[static_cast<std::size_t>(k)] * z2[static_cast<std::size_t>(k)];
    // interval signs follow the assigned Hadamard rows
    CHECK(z1[static_cast<std::size_t>(k)] == s.sign_matrix(s.row_assignment[0], k % 4));
    CHECK(z2[static_cast<std::size_t>(k)] == s.sign_matrix(s.row_assignment[1], k % 4));
  }
  CHECK(s1 == 0);
  CHECK(s2 == 0);
  CHECK(s12 == 0);
  const Eigen::MatrixXi gram = s.sign_matrix * s.sign_matrix.transpose();
  CHECK(gram == 4 * Eigen::MatrixXi::Identity(4, 4));
  for (int r : s.row_assignment) {
    CHECK(r != 0);
    CHECK(s.sign_matrix.row(r).sum() == 0);
  }
  CHECK_THROWS_AS(chadd_sequence(3, 1.0), InvalidArgument);

  const ChaddSequence b = chadd_sequence(2, 1.0, false);
  CHECK(b.interval_count() == 4);
  CHECK(b.toggling_signs(0) == std::vector<int>{1, -1, -1, 1});
}

TEST_CASE("CHaDD closed-system propagator is a phase") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::array<int, 2> colors{0, 1};
  for (int i = 0; i < 10; ++i) {
    ZzLindbladModel m{2, {u(rng), u(rng)}, {{{0, 1}, u(rng)}}, {inf, inf}, {inf, inf}};
    const double tau = std::abs(u(rng)) + 0.1;
    CHECK(phase_distance_to_identity(chadd_cycle_propagator(m, chadd_sequence(2, tau), colors)) < 1e-8);
    CHECK(phase_distance_to_identity(chadd_cycle_propagator(m, chadd_sequence(2, tau, false), colors)) < 1e-8);
  }
  ZzLindbladModel m{2, {1.0, 2.0}, {{{0, 1}, 0.3}}, {inf, inf}, {inf, inf}};
  CHECK(phase_distance_to_identity(chadd_cycle_propagator(m, chadd_sequence(2, 0.0), colors)) < 1e-14);
  // Without pulses the same evolution is far from a phase.
  ChaddSequence none = chadd_sequence(2, 1.0);
  for (auto& p : none.pulses) p.color = 5;
  CHECK(phase_distance_to_identity(chadd_cycle_propagator(m, none, colors)) > 0.1);
}

TEST_CASE("two-coloring") {
  const std::array<std::pair<int, int>, 3> path{{{0, 1}, {1, 2}, {2, 3}}};
  CHECK(two_color(5, path) == std::vector<int>{0, 1, 0, 1, 0});
  const std::array<std::pair<int, int>, 3> tri{{{0, 1}, {1, 2}, {2, 0}}};
  CHECK_THROWS_AS(two_color(3, tri), InvalidArgument);
}

TEST_CASE("Lindblad kernels agree and match closed forms") {
  std::mt19937_64 rng(3);
  ZzLindbladModel m{4, {0.3, -0.7, 1.1, 0.2}, {{{0, 1}, 0.2}, {{2, 3}, -0.4}, {{1, 3}, 0.1}}, {50, 80, inf, 120},
                    {70, inf, 90, 200}};
  const Matrix rho = oracle::random_density(16, rng);
  const Eigen::VectorXd e = m.energies();
  Matrix a, b;
  kernels::lindblad_rhs_serial(m, e, rho, a);
  kernels::lindblad_rhs_parallel(m, e, rho, b);
  CHECK(max_abs(a - b) == 0.0);
  CHECK(std::abs(a.trace()) < 1e-14);

  // Independent dense generator: -i[H, rho] + sum D[L] rho.
  Matrix h = Matrix::Zero(16, 16);
  for (int j = 0; j < 16; ++j) h(j, j) = e[j];
  Matrix dense = Complex(0, -1) * (h * rho - rho * h);
  const Matrix sm = (Matrix(2, 2) << 0, 1, 0, 0).finished();
  const Matrix z = Operator::pauli_z().matrix();
  for (int q = 0; q < 4; ++q) {
    const std::array<int, 1> t{q};
    auto dissip = [&](const Matrix& l, double rate) {
      const Matrix L = embed(l, t, 4);
      dense += rate * (L * rho * L.adjoint() - 0.5 * (L.adjoint() * L * rho + rho * L.adjoint() * L));
    };
    if (!std::isinf(m.t1_us[q])) dissip(sm, 1.0 / m.t1_us[q]);
    if (!std::isinf(m.tphi_us[q])) dissip(z, 0.5 / m.tphi_us[q]);
  }
  CHECK(max_abs(a - dense) < 1e-13);

  // Single qubit: populations decay at 1/T1, coherence at 1/T2 with the Z rotation.
  ZzLindbladModel one{1, {0.8}, {}, {40}, {60}};
  Matrix r0(2, 2);
  r0 << 0.3, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.7;
  const double t = 25.0;
  const Matrix rt = rk4_evolve_checked(one, r0, t, {0.01});
  CHECK(std::abs(rt(1, 1).real() - 0.7 * std::exp(-t / 40)) < 1e-10);
  const Complex coh = r0(0, 1) * std::exp(-t * (1.0 / 80 + 1.0 / 60)) * std::exp(Complex(0, -0.8 * t));
  CHECK(std::abs(rt(0, 1) - coh) < 1e-10);
  CHECK(std::abs(rt.trace() - 1.0) < 1e-12);

  // A coarse step trips the convergence check.
  ZzLindbladModel fast{1, {40.0}, {}, {inf}, {inf}};
  CHECK_THROWS_AS(rk4_evolve_checked(fast, r0, 10.0, {0.05}), NumericalError);
}

TEST_CASE("crosstalk toy") {
  CrosstalkModel quiet;
  quiet.g = 0.0;
  quiet.t1_us = inf;
  quiet.tphi_us = inf;
  for (const auto& s : run_crosstalk_toy(quiet, ProbeState::one, true)) CHECK(std::abs(s.population_one - 1.0) < 1e-12);

  const CrosstalkModel def;
  const auto one_on = run_crosstalk_toy(def, ProbeState::one, true), one_off = run_crosstalk_toy(def, ProbeState::one, false);
  const auto zero_on = run_crosstalk_toy(def, ProbeState::zero, true),
             zero_off = run_crosstalk_toy(def, ProbeState::zero, false);
  CHECK(one_on.size() == 11);
  CHECK(one_on.back().t_us == doctest::Approx(80.0));
  CHECK(one_on.back().fidelity > one_off.back().fidelity);
  CHECK(zero_on.back().fidelity < zero_off.back().fidelity);
  // Free decay of |1> is exp(-t/T1).
  CHECK(std::abs(one_off.back().fidelity - std::exp(-0.8)) < 1e-9);
}

TEST_CASE("multi-QEC with CHaDD") {
  ProtocolConfig c;
  c.total_free_us = {30, 60};
  c.chadd_options.convergence_check = true;

  SUBCASE("free Lindblad evolution matches the discrete idle channels") {
    c.logical = {1.2, 0.5};
    const NoiseParams nz = noise_t1(100, 150);
    const auto discrete = run_multiqec(c, nz);
    const auto lind = run_multiqec_with_chadd(c, nz);
    for (std::size_t i = 0; i < discrete.size(); ++i) {
      CHECK(std::abs(discrete[i].fidelity - lind[i].fidelity) < 1e-8);
      CHECK(std::abs(discrete[i].success_probability - lind[i].success_probability) < 1e-8);
    }
  }
  SUBCASE("noiseless and uncoupled is perfect") {
    c.logical = {pi / 2, 0.0};
    c.chadd = true;
    c.chadd_options.spectators = 1;
    for (const auto& p : run_multiqec(c, noise_t1(inf, inf))) CHECK(std::abs(p.fidelity - 1.0) < 1e-10);
  }
  SUBCASE("|0_L> without couplings loses under CHaDD") {
    c.logical = {0.0, 0.0};
    const auto off = run_multiqec(c, noise_t1(220, 440));
    c.chadd = true;
    const auto on = run_multiqec(c, noise_t1(220, 440));
    for (std::size_t i = 0; i < on.size(); ++i) CHECK(on[i].fidelity < off[i].fidelity);
  }
  SUBCASE("|+_L> with a ZZ spectator gains under CHaDD") {
    c.logical = {pi / 2, 0.0};
    c.chadd_options.spectators = 1;
    c.chadd_options.couplings = {{{2, 3}, 0.05}};
    const auto off = run_multiqec(c, noise_t1(220, 440));
    c.chadd = true;
    const auto on = run_multiqec(c, noise_t1(220, 440));
    for (std::size_t i = 0; i < on.size(); ++i) CHECK(on[i].fidelity >= off[i].fidelity);
  }
  SUBCASE("register cap") {
    c.chadd = true;
    c.chadd_options.spectators = 3;
    CHECK_THROWS_AS(run_multiqec(c, noise_t1(220, 440)), InvalidArgument);
  }
}

TEST_CASE("synthesized recovery path matches the approximate map") {
  const SynthesizedRecovery s = synthesize_approximate_recovery(2024);
  ProtocolConfig c;
  c.logical = {2.0, 0.3};
  c.total_free_us = {20, 70};
  c.variant = RecoveryVariant::approximate;
  const auto ref = run_multiqec(c, noise_t1(220, 440));
  c.variant = RecoveryVariant::synthesized;
  c.recovery_circuit = s.recovery;
  const auto syn = run_multiqec(c, noise_t1(220, 440));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(std::abs(ref[i].fidelity - syn[i].fidelity) < 1e-5);
    CHECK(std::abs(ref[i].success_probability - syn[i].success_probability) < 1e-5);
  }
  c.recovery_circuit.reset();
  CHECK_THROWS_AS(run_multiqec(c, noise_t1(220, 440)), InvalidArgument);
}
