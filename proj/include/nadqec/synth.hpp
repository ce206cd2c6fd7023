#pragma once

// Variational synthesis of the encoder and recovery factors into native gates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nadqec/circuit.hpp"
#include "nadqec/code3.hpp"
#include "nadqec/optimize.hpp"

namespace nadqec {

/// Undirected coupling graph.
struct Connectivity {
  int qubits = 0;
  std::vector<std::pair<int, int>> edges;

  bool connected(int a, int b) const;
  static Connectivity line(int n);
  /// [d0, d1, d2, syn, rec]: data on a line, syn coupled to every data
  /// qubit, rec coupled to d0 and d1.
  static Connectivity recovery_register();
};

struct NativeGateSet {
  Connectivity connectivity;

  bool allows(const Gate& g) const;
  bool allows(const Circuit& c) const;
};

/// A circuit template whose rotation angles are either fixed or read from
/// the parameter vector.
class Ansatz {
 public:
  struct Slot {
    GateKind kind;
    std::vector<int> qubits;
    int param = -1;  // -1 = fixed angle
    double fixed = 0.0;
  };

  Ansatz(int n_qubits, std::string name);

  /// Layers of RZ RX RZ on every qubit, each followed by CZ on every edge,
  /// closed by a final rotation layer.
  static Ansatz hardware_efficient(const Connectivity& conn, int layers);
  /// Five CZs alternating (c1, t), (c0, t), ... with Euler rotations on the
  /// target between them and rotation frames on both controls at the ends.
  /// Qubit order is [c0, c1, t].
  static Ansatz margolus();

  int qubit_count() const { return n_; }
  int parameter_count() const { return n_params_; }
  const std::string& name() const { return name_; }
  const std::vector<Slot>& slots() const { return slots_; }

  void add_fixed(GateKind kind, std::vector<int> qubits, double angle = 0.0);
  void add_param(GateKind kind, std::vector<int> qubits);

  Circuit build(std::span<const double> params) const;
  /// Action on the given columns of the identity, without building the circuit.
  Matrix apply_to_columns(std::span<const double> params, std::span<const int> columns) const;

 private:
  int n_;
  int n_params_ = 0;
  std::string name_;
  std::vector<Slot> slots_;
};

struct Mask {
  enum class Kind { full, columns, entries };
  Kind kind = Kind::full;
  std::vector<int> columns;
  std::vector<std::pair<int, int>> entries;

  static Mask full() { return {}; }
  static Mask of_columns(std::vector<int> cols) { return {Kind::columns, std::move(cols), {}}; }
  static Mask of_entries(std::vector<std::pair<int, int>> e) { return {Kind::entries, {}, std::move(e)}; }
};

struct SynthesisProblem {
  Matrix target;
  Mask mask;
  Ansatz ansatz;
  double tolerance = 1e-6;
  /// Minimize over a global phase before comparing. Off by default.
  bool phase_aligned = false;

  void validate() const;
};

/// Sum over masked entries of |O_ij - U_ij(params)|^2.
double cost(const SynthesisProblem& problem, std::span<const double> params);

struct SynthesisResult {
  std::vector<double> params;
  double cost = 0.0;
  bool converged = false;
  Circuit circuit{1};
  int restarts_run = 0;
  std::string ansatz_name;
};

SynthesisResult optimize(const SynthesisProblem& problem, std::uint64_t seed, const OptimizeOptions& options = {});

/// Hardware-efficient synthesis with depth growth: start at `min_layers`,
/// add a layer after each failure, stop at `max_layers`.
SynthesisResult synthesize_growing(const Matrix& target, const Mask& mask, const Connectivity& conn, std::uint64_t seed,
                                   int min_layers = 3, int max_layers = 8, const OptimizeOptions& options = {});

// ---- recovery factors ---------------------------------------------------

struct SvdSplit {
  Matrix u;
  Eigen::VectorXd d;  // descending
  Matrix v;

  Matrix d_matrix() const;
  Matrix reconstruct() const { return u * d_matrix() * v.adjoint(); }
};

/// SVD with a canonical gauge: within each group of equal singular values
/// the columns of U come from Gram-Schmidt over the group projector applied
/// to e_0, e_1, ... with the first nonzero entry made real positive;
/// V = R† U / sigma on nonzero singular values and is gauged the same way on
/// the null space.
SvdSplit svd_split(const Matrix& r);

/// X on every data qubit.
Matrix x_all(int n_qubits);

/// Target columns for the U factor: |000> -> |1_L>, |001> -> |0_L>.
Matrix recovery_u_target();
/// Target columns for the encoder: |000> -> |0_L>, |100> -> |1_L>.
Matrix encoder_target();
/// D-block target on [d0, d1, rec]: ancilla-0 block equal to |00><00|.
SynthesisProblem margolus_problem();

enum class BlockMode { exact, approx };

/// (n+1)-qubit circuit, ancilla last, whose ancilla-0 block equals diag(d).
/// exact: RY(pi) on the ancilla then one MCRY(2 arccos d_k - pi) per
/// nonzero entry. approx: entries rounded to {0, 1}; the support must be a
/// subcube with two fixed qubits, realized by the Margolus circuit.
Circuit block_encode_diagonal(const Eigen::VectorXd& d, BlockMode mode, const Circuit* margolus = nullptr,
                              std::uint64_t seed = 7);

/// Recovery on [d0, d1, d2, syn, rec]:
///   open-controlled X^3, U†, open-controlled X on d2, D block, U.
/// `u` acts on the data; `d_block` acts on [d0, d1, d2, rec].
Circuit assemble_recovery_circuit(const Circuit& u, const Circuit& d_block);

struct RecoveryReport {
  double max_deviation = 0.0;
  double syndrome_leakage = 0.0;
  std::size_t cz_count = 0;
  double duration_us = 0.0;
  bool passed = false;
};

/// Compares the rec-0 blocks of the circuit, per syndrome value, with the
/// map's R0 and R1 (one shared global phase). Leakage counts amplitude that
/// changes the syndrome bit.
RecoveryReport verify_recovery_circuit(const Circuit& circ, const RecoveryMap& map, double tolerance = 1e-6,
                                       const GateDurations& durations = {});

struct SynthesizedRecovery {
  SynthesisResult encoder;
  SynthesisResult u;
  SynthesisResult margolus;
  Circuit d_block{4};
  Circuit recovery{5};
  RecoveryReport report;
};

/// End-to-end synthesis of the encoder and the approximate recovery circuit.
SynthesizedRecovery synthesize_approximate_recovery(std::uint64_t seed, const OptimizeOptions& options = {});

/// Angles as multiples of pi, e.g. "0.25π".
std::string format_angle_pi(double radians);

}  // namespace nadqec
