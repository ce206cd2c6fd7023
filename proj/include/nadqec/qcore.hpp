#pragma once

// Dense complex linear algebra for small registers.
//
// Qubit index convention: qubit 0 is the MOST significant bit of a basis
// index. On a 3-qubit register, |100> is index 4 and |001> is index 1. Every
// module in this library follows this convention.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nadqec/tolerances.hpp"

namespace nadqec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised for malformed inputs (wrong dimensions, bad indices, values out of range).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot meet its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log2(dim); throws unless dim is a power of two >= 2.
int qubit_count_for_dim(Eigen::Index dim);

inline std::uint64_t bit_of(int qubit, int n_qubits) {
  return std::uint64_t{1} << (n_qubits - 1 - qubit);
}

class PureState {
 public:
  explicit PureState(Vector amplitudes);

  static PureState basis(int n_qubits, std::uint64_t index);

  const Vector& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }
  int qubit_count() const { return n_; }

 private:
  Vector amps_;
  int n_;
};

enum class OperatorKind { unitary, non_unitary, hermitian };

class Operator {
 public:
  Operator(Matrix m, OperatorKind kind);

  static Operator identity(int n_qubits);
  static Operator pauli_x();
  static Operator pauli_y();
  static Operator pauli_z();
  static Operator hadamard();

  const Matrix& matrix() const { return m_; }
  OperatorKind kind() const { return kind_; }
  Eigen::Index dim() const { return m_.rows(); }
  int qubit_count() const { return n_; }

 private:
  Matrix m_;
  OperatorKind kind_;
  int n_;
};

enum class Normalization { normalized, sub_normalized };

/// Hermitian, PSD matrix. Sub-normalized instances carry a post-selection
/// branch weight in their trace.
class DensityMatrix {
 public:
  DensityMatrix(Matrix m, Normalization norm = Normalization::normalized);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix basis(int n_qubits, std::uint64_t index);
  static DensityMatrix maximally_mixed(int n_qubits);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int qubit_count() const { return n_; }
  bool is_normalized() const { return norm_ == Normalization::normalized; }
  double trace() const { return m_.trace().real(); }

  /// Rescaled copy with unit trace; throws NumericalError on a zero-weight branch.
  DensityMatrix normalized() const;
  double min_eigenvalue() const;
  bool is_positive_semidefinite(double floor = tol::psd_floor) const;

 private:
  Matrix m_;
  Normalization norm_;
  int n_;
};

Matrix kron(const Matrix& a, const Matrix& b);
Operator tensor(const Operator& a, const Operator& b);
PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state on `keep` (ascending order). The result is sub-normalized iff the input is.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const PureState& psi);

/// Outcome probabilities over a list of measured qubits; the first listed
/// qubit is the most significant bit of the outcome index.
struct OutcomeDistribution {
  std::vector<int> qubits;
  std::vector<double> probabilities;

  double probability(std::uint64_t outcome) const { return probabilities.at(outcome); }
  double total() const;
};

OutcomeDistribution measure_computational(const DensityMatrix& rho, std::span<const int> qubits);

/// (I ⊗ op ⊗ I) with `op` acting on `targets` (op's first qubit = targets[0]).
/// Dense reference construction used by tests and the serial kernels.
Matrix embed(const Matrix& op, std::span<const int> targets, int n_qubits);

/// U rho U† for a local unitary on `targets`; trace and spectrum preserved.
DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u, std::span<const int> targets);

/// K rho K† for an arbitrary local operator; the result is sub-normalized.
DensityMatrix apply_operator(const DensityMatrix& rho, const Matrix& k, std::span<const int> targets);

/// Projects `qubit` onto |value> without renormalizing.
DensityMatrix project_qubit(const DensityMatrix& rho, int qubit, int value);

bool is_unitary(const Matrix& m, double tolerance = tol::structural);
double max_abs(const Matrix& m);

}  // namespace nadqec
