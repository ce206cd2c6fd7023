#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nadqec/circuit.hpp"
#include "oracles.hpp"

using namespace nadqec;
constexpr double pi = std::numbers::pi;

namespace {

/// |<A, B>| / dim == 1 iff A and B agree up to a global phase.
double phase_distance(const Matrix& a, const Matrix& b) {
  const Complex overlap = (a.adjoint() * b).trace();
  const Complex phase = overlap / std::abs(overlap);
  return max_abs(a * phase - b);
}

}  // namespace

TEST_CASE("gate matrices follow exp(-i a sigma/2)") {
  const Complex i{0, 1};
  const double a = 0.37;
  const Matrix x = Operator::pauli_x().matrix(), y = Operator::pauli_y().matrix(), z = Operator::pauli_z().matrix();
  const Matrix id = Matrix::Identity(2, 2);
  CHECK(max_abs(Gate{GateKind::rx, {0}, a}.matrix() - (std::cos(a / 2) * id - i * std::sin(a / 2) * x)) < 1e-15);
  CHECK(max_abs(Gate{GateKind::ry, {0}, a}.matrix() - (std::cos(a / 2) * id - i * std::sin(a / 2) * y)) < 1e-15);
  CHECK(max_abs(Gate{GateKind::rz, {0}, a}.matrix() - (std::cos(a / 2) * id - i * std::sin(a / 2) * z)) < 1e-15);
  const Matrix sx = Gate{GateKind::sx, {0}}.matrix();
  CHECK(max_abs(sx * sx - x) < 1e-15);
  const Matrix zz = oracle::kron(z, z);
  CHECK(max_abs(Gate{GateKind::rzz, {0, 1}, a}.matrix() -
                (std::cos(a / 2) * Matrix::Identity(4, 4) - i * std::sin(a / 2) * zz)) < 1e-15);
}

TEST_CASE("native CNOT and Hadamard") {
  Circuit c(2);
  c.cnot(0, 1);
  Matrix cx = Matrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  CHECK(phase_distance(c.unitary(), cx) < 1e-14);
  Circuit h(1);
  h.hadamard(0);
  CHECK(phase_distance(h.unitary(), Operator::hadamard().matrix()) < 1e-14);
}

TEST_CASE("MCRY fires only on all-ones controls") {
  Circuit c(3);
  c.add(GateKind::mcry, {2, 0, 1}, pi);  // controls 2 and 0, target 1
  const Matrix u = c.unitary();
  // |101> (q0=1, q1=0, q2=1) -> |111>
  CHECK(std::abs(u(7, 5) - 1.0) < 1e-15);
  CHECK(std::abs(u(4, 4) - 1.0) < 1e-15);  // q2 = 0: untouched
}

TEST_CASE("inverse undoes the circuit up to phase") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-pi, pi);
  Circuit c(3);
  c.rx(0, u(rng)).sx(1).rz(2, u(rng)).cz(0, 2).ry(1, u(rng)).add(GateKind::rzz, {1, 2}, u(rng)).x(0);
  c.add(GateKind::mcry, {0, 1, 2}, u(rng));
  const Matrix prod = c.inverse().unitary() * c.unitary();
  CHECK(phase_distance(prod, Matrix::Identity(8, 8)) < 1e-13);
}

TEST_CASE("text serialization round-trips exactly") {
  Circuit c(5);
  c.rx(0, 0.1).rz(4, -1.0 / 3.0).cz(1, 3).sx(2).x(0).add(GateKind::mcry, {0, 1, 4}, std::sqrt(2.0));
  c.add(GateKind::delay, {3}, 2.72).add(GateKind::rzz, {0, 4}, 1e-17).add(GateKind::id, {2});
  const Circuit back = Circuit::from_text(c.to_text());
  CHECK(back == c);
  CHECK(back.to_text() == c.to_text());
  CHECK_THROWS_AS(Circuit::from_text("RX 0 0.1\n"), InvalidArgument);
  CHECK_THROWS_AS(Circuit::from_text("# qubits 2\nFOO 0\n"), InvalidArgument);
  CHECK_THROWS_AS(Circuit::from_text("# qubits 2\nCZ 0,5\n"), InvalidArgument);
}

TEST_CASE("counts and duration") {
  GateDurations d;
  Circuit c(3);
  CHECK(c.duration(d) == 0.0);
  c.rx(0, 0.1).rx(1, 0.2);  // one layer
  CHECK(c.duration(d) == doctest::Approx(d.single_qubit));
  c.cz(0, 1);
  CHECK(c.duration(d) == doctest::Approx(d.single_qubit + d.two_qubit));
  c.rx(2, 0.3);  // fits in the first layer
  CHECK(c.duration(d) == doctest::Approx(d.single_qubit + d.two_qubit));
  double last = c.duration(d);
  for (int k = 0; k < 10; ++k) {
    c.cz(k % 3, (k + 1) % 3).sx(k % 3);
    CHECK(c.duration(d) >= last);
    last = c.duration(d);
  }
  CHECK(c.count(GateKind::cz) == 11);
  CHECK(c.two_qubit_count() == 11);
}

TEST_CASE("run_circuit equals unitary conjugation without noise") {
  std::mt19937_64 rng(21);
  Circuit c(2);
  c.rx(0, 0.4).cz(0, 1).sx(1).ry(0, -1.2);
  const DensityMatrix rho(oracle::random_density(8, rng));
  const std::array<int, 2> map{2, 0};
  const DensityMatrix out = run_circuit(rho, c, map);
  const Matrix full = embed(c.unitary(), map, 3);
  CHECK(max_abs(out.matrix() - full * rho.matrix() * full.adjoint()) < 1e-13);
  const DensityMatrix noisy = run_circuit(rho, c, map, 0.01, 0.02);
  CHECK(noisy.trace() == doctest::Approx(1.0));
  CHECK(max_abs(noisy.matrix() - out.matrix()) > 1e-4);
}

TEST_CASE("gate validation") {
  Circuit c(2);
  CHECK_THROWS_AS(c.cz(0, 0), InvalidArgument);
  CHECK_THROWS_AS(c.rx(2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(c.add(GateKind::mcry, {0}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(c.add(GateKind::delay, {0}, -1.0), InvalidArgument);
}
