#pragma once

#include <span>
#include <string>
#include <vector>

#include "nadqec/noise.hpp"
#include "nadqec/qcore.hpp"

namespace nadqec {

/// Rotations follow exp(-i angle sigma / 2). `delay` stores its duration in
/// `angle` (microseconds). `mcry` lists its controls first and its target
/// last; it fires when every control reads 1.
enum class GateKind { rx, ry, rz, sx, x, cz, rzz, id, delay, mcry };

const char* gate_name(GateKind kind);
bool is_two_qubit(GateKind kind);

struct Gate {
  GateKind kind;
  std::vector<int> qubits;
  double angle = 0.0;

  Matrix matrix() const;
  bool operator==(const Gate&) const = default;
};

class Circuit {
 public:
  explicit Circuit(int n_qubits);

  int qubit_count() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::vector<Gate>& gates() { return gates_; }

  Circuit& add(GateKind kind, std::vector<int> qubits, double angle = 0.0);
  Circuit& rx(int q, double a) { return add(GateKind::rx, {q}, a); }
  Circuit& ry(int q, double a) { return add(GateKind::ry, {q}, a); }
  Circuit& rz(int q, double a) { return add(GateKind::rz, {q}, a); }
  Circuit& sx(int q) { return add(GateKind::sx, {q}); }
  Circuit& x(int q) { return add(GateKind::x, {q}); }
  Circuit& cz(int a, int b) { return add(GateKind::cz, {a, b}); }
  /// Native decomposition: H CZ H on the target, H = RZ(pi/2) SX RZ(pi/2) up to phase.
  Circuit& cnot(int control, int target);
  Circuit& hadamard(int q);

  /// Appends `other`, relabelling its qubit i to `mapping[i]`.
  Circuit& append(const Circuit& other, std::span<const int> mapping);
  Circuit& append(const Circuit& other);

  Matrix unitary() const;
  /// Reversed gate list with negated angles; SX becomes RX(-pi/2), so the
  /// result inverts the circuit up to a global phase.
  Circuit inverse() const;

  std::size_t count(GateKind kind) const;
  std::size_t two_qubit_count() const;
  /// Gates are packed into ASAP layers; the estimate sums the longest gate per layer.
  double duration(const GateDurations& d) const;

  /// One gate per line: `GATE q[,q2...] [angle]`, preceded by `# qubits n`.
  std::string to_text() const;
  static Circuit from_text(const std::string& text);

  bool operator==(const Circuit&) const = default;

 private:
  int n_;
  std::vector<Gate> gates_;
};

double gate_duration(const Gate& g, const GateDurations& d);

/// Runs the circuit on `rho`, mapping circuit qubit i to register qubit
/// `mapping[i]`. Each gate is followed by depolarizing noise at the given
/// rates (1q or 2q by arity; multi-controlled gates use the 2q rate on every
/// pair with the target).
DensityMatrix run_circuit(const DensityMatrix& rho, const Circuit& c, std::span<const int> mapping,
                          double depolarizing_1q = 0.0, double depolarizing_2q = 0.0);

}  // namespace nadqec
