#include "nadqec/qcore.hpp"

#include <algorithm>
#include <cmath>

#include "nadqec/kernels.hpp"

namespace nadqec {

int qubit_count_for_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw InvalidArgument("dimension must be a power of two >= 2, got " + std::to_string(dim));
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_unitary(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  const Matrix gram = m.adjoint() * m;
  return max_abs(gram - Matrix::Identity(m.rows(), m.cols())) <= tolerance;
}

// ---------------------------------------------------------------- PureState

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)), n_(qubit_count_for_dim(amps_.size())) {
  if (std::abs(amps_.norm() - 1.0) > tol::arithmetic) {
    throw InvalidArgument("pure state is not normalized (norm " + std::to_string(amps_.norm()) + ")");
  }
}

PureState PureState::basis(int n_qubits, std::uint64_t index) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (index >= static_cast<std::uint64_t>(dim)) throw InvalidArgument("basis index out of range");
  Vector v = Vector::Zero(dim);
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return PureState(std::move(v));
}

// ----------------------------------------------------------------- Operator

Operator::Operator(Matrix m, OperatorKind kind) : m_(std::move(m)), kind_(kind) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("operator must be square");
  n_ = qubit_count_for_dim(m_.rows());
  if (kind_ == OperatorKind::unitary && !is_unitary(m_)) throw InvalidArgument("operator marked unitary is not unitary");
  if (kind_ == OperatorKind::hermitian && max_abs(m_ - m_.adjoint()) > tol::arithmetic) {
    throw InvalidArgument("operator marked hermitian is not hermitian");
  }
}

Operator Operator::identity(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return Operator(Matrix::Identity(dim, dim), OperatorKind::unitary);
}

Operator Operator::pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Operator(m, OperatorKind::unitary);
}

Operator Operator::pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return Operator(m, OperatorKind::unitary);
}

Operator Operator::pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return Operator(m, OperatorKind::unitary);
}

Operator Operator::hadamard() {
  Matrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return Operator(m, OperatorKind::unitary);
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(Matrix m, Normalization norm) : m_(std::move(m)), norm_(norm) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("density matrix must be square");
  n_ = qubit_count_for_dim(m_.rows());
  // Scale-aware so that heavily damped sub-normalized branches still pass.
  const double scale = std::max(1.0, max_abs(m_));
  if (max_abs(m_ - m_.adjoint()) > tol::arithmetic * scale) throw InvalidArgument("density matrix is not hermitian");
  if (norm_ == Normalization::normalized && std::abs(trace() - 1.0) > tol::arithmetic) {
    throw InvalidArgument("density matrix marked normalized has trace " + std::to_string(trace()));
  }
  if (norm_ == Normalization::sub_normalized && trace() > 1.0 + tol::structural) {
    throw InvalidArgument("sub-normalized density matrix has trace above one");
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const Vector& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::basis(int n_qubits, std::uint64_t index) {
  return from_pure(PureState::basis(n_qubits, index));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw NumericalError("cannot normalize a zero-weight branch");
  Matrix m = m_ / t;
  // Restore exact hermiticity lost to rounding in long products.
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_positive_semidefinite(double floor) const { return min_eigenvalue() >= floor; }

// -------------------------------------------------------------- composition

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  const OperatorKind kind = (a.kind() == b.kind()) ? a.kind() : OperatorKind::non_unitary;
  return Operator(kron(a.matrix(), b.matrix()), kind);
}

PureState tensor(const PureState& a, const PureState& b) {
  Vector v(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) v.segment(i * b.dim(), b.dim()) = a.amplitudes()[i] * b.amplitudes();
  return PureState(std::move(v));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const bool normalized = a.is_normalized() && b.is_normalized();
  return DensityMatrix(kron(a.matrix(), b.matrix()),
                       normalized ? Normalization::normalized : Normalization::sub_normalized);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.qubit_count();
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) throw InvalidArgument("partial_trace needs at least one kept qubit");
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) throw InvalidArgument("duplicate kept qubit");
  for (int q : kept) {
    if (q < 0 || q >= n) throw InvalidArgument("kept qubit index out of range");
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }

  const int nk = static_cast<int>(kept.size());
  const int nt = static_cast<int>(traced.size());
  const Eigen::Index dk = Eigen::Index{1} << nk;
  const Eigen::Index dt = Eigen::Index{1} << nt;

  auto spread = [n](std::span<const int> qubits, Eigen::Index local) {
    const int k = static_cast<int>(qubits.size());
    Eigen::Index idx = 0;
    for (int q = 0; q < k; ++q) {
      if ((local >> (k - 1 - q)) & 1) idx |= static_cast<Eigen::Index>(bit_of(qubits[q], n));
    }
    return idx;
  };

  std::vector<Eigen::Index> kept_idx(static_cast<std::size_t>(dk));
  std::vector<Eigen::Index> traced_idx(static_cast<std::size_t>(dt));
  for (Eigen::Index i = 0; i < dk; ++i) kept_idx[static_cast<std::size_t>(i)] = spread(kept, i);
  for (Eigen::Index i = 0; i < dt; ++i) traced_idx[static_cast<std::size_t>(i)] = spread(traced, i);

  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index e = 0; e < dt; ++e) {
        const auto te = traced_idx[static_cast<std::size_t>(e)];
        acc += m(kept_idx[static_cast<std::size_t>(i)] | te, kept_idx[static_cast<std::size_t>(j)] | te);
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(std::move(out), rho.is_normalized() ? Normalization::normalized : Normalization::sub_normalized);
}

double fidelity(const DensityMatrix& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw InvalidArgument("fidelity: dimension mismatch");
  const Vector& a = psi.amplitudes();
  const Complex f = a.dot(rho.matrix() * a);  // Eigen's dot conjugates the left operand
  return f.real();
}

double OutcomeDistribution::total() const {
  double s = 0.0;
  for (double p : probabilities) s += p;
  return s;
}

OutcomeDistribution measure_computational(const DensityMatrix& rho, std::span<const int> qubits) {
  if (qubits.empty()) throw InvalidArgument("measure_computational: empty qubit set");
  const int n = rho.qubit_count();
  const int k = static_cast<int>(qubits.size());
  for (int q : qubits) {
    if (q < 0 || q >= n) throw InvalidArgument("measured qubit out of range");
  }
  OutcomeDistribution dist;
  dist.qubits.assign(qubits.begin(), qubits.end());
  dist.probabilities.assign(std::size_t{1} << k, 0.0);
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    std::uint64_t outcome = 0;
    for (int q = 0; q < k; ++q) {
      if (static_cast<std::uint64_t>(i) & bit_of(qubits[q], n)) outcome |= std::uint64_t{1} << (k - 1 - q);
    }
    dist.probabilities[outcome] += rho.matrix()(i, i).real();
  }
  return dist;
}

Matrix embed(const Matrix& op, std::span<const int> targets, int n_qubits) {
  const int k = static_cast<int>(targets.size());
  if (op.rows() != (Eigen::Index{1} << k)) throw InvalidArgument("embed: operator does not match target count");
  std::uint64_t mask = 0;
  for (int t : targets) {
    if (t < 0 || t >= n_qubits) throw InvalidArgument("embed: target out of range");
    if (mask & bit_of(t, n_qubits)) throw InvalidArgument("embed: duplicate target");
    mask |= bit_of(t, n_qubits);
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  auto local_index = [&](Eigen::Index i) {
    Eigen::Index l = 0;
    for (int q = 0; q < k; ++q) {
      if (static_cast<std::uint64_t>(i) & bit_of(targets[q], n_qubits)) l |= Eigen::Index{1} << (k - 1 - q);
    }
    return l;
  };
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if ((static_cast<std::uint64_t>(i) & ~mask) != (static_cast<std::uint64_t>(j) & ~mask)) continue;
      out(i, j) = op(local_index(i), local_index(j));
    }
  }
  return out;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u, std::span<const int> targets) {
  Matrix m = kernels::conjugate(rho.matrix(), u, targets, rho.qubit_count());
  return DensityMatrix(std::move(m), rho.is_normalized() ? Normalization::normalized : Normalization::sub_normalized);
}

DensityMatrix apply_operator(const DensityMatrix& rho, const Matrix& k, std::span<const int> targets) {
  Matrix m = kernels::conjugate(rho.matrix(), k, targets, rho.qubit_count());
  return DensityMatrix(std::move(m), Normalization::sub_normalized);
}

DensityMatrix project_qubit(const DensityMatrix& rho, int qubit, int value) {
  if (value != 0 && value != 1) throw InvalidArgument("projection value must be 0 or 1");
  const int n = rho.qubit_count();
  if (qubit < 0 || qubit >= n) throw InvalidArgument("projected qubit out of range");
  const auto b = bit_of(qubit, n);
  Matrix m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const bool row_ok = ((static_cast<std::uint64_t>(i) & b) != 0) == (value == 1);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const bool col_ok = ((static_cast<std::uint64_t>(j) & b) != 0) == (value == 1);
      if (!row_ok || !col_ok) m(i, j) = 0.0;
    }
  }
  return DensityMatrix(std::move(m), Normalization::sub_normalized);
}

}  // namespace nadqec
