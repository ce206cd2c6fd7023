#include "nadqec/kernels.hpp"

#include <omp.h>

#include <vector>

namespace nadqec::kernels {
namespace {

struct LocalLayout {
  std::vector<Eigen::Index> bases;    // indices with every target bit cleared
  std::vector<Eigen::Index> offsets;  // offset of local basis state j
};

LocalLayout make_layout(std::span<const int> targets, int n_qubits) {
  const int k = static_cast<int>(targets.size());
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const Eigen::Index local = Eigen::Index{1} << k;

  std::uint64_t mask = 0;
  for (int t : targets) {
    if (t < 0 || t >= n_qubits) throw InvalidArgument("target qubit out of range");
    const auto b = bit_of(t, n_qubits);
    if (mask & b) throw InvalidArgument("duplicate target qubit");
    mask |= b;
  }

  LocalLayout layout;
  layout.offsets.resize(static_cast<std::size_t>(local));
  for (Eigen::Index j = 0; j < local; ++j) {
    Eigen::Index off = 0;
    for (int q = 0; q < k; ++q) {
      if ((j >> (k - 1 - q)) & 1) off |= static_cast<Eigen::Index>(bit_of(targets[q], n_qubits));
    }
    layout.offsets[static_cast<std::size_t>(j)] = off;
  }
  layout.bases.reserve(static_cast<std::size_t>(dim / local));
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((static_cast<std::uint64_t>(i) & mask) == 0) layout.bases.push_back(i);
  }
  return layout;
}

void check_shapes(const Matrix& m, const Matrix& op, std::span<const int> targets, int n_qubits) {
  if (m.rows() != (Eigen::Index{1} << n_qubits)) throw InvalidArgument("matrix does not match register size");
  if (op.rows() != op.cols() || op.rows() != (Eigen::Index{1} << targets.size())) {
    throw InvalidArgument("local operator does not match target count");
  }
}

void apply_rows_impl(Matrix& m, const Matrix& op, std::span<const int> targets, int n_qubits, bool parallel) {
  check_shapes(m, op, targets, n_qubits);
  const LocalLayout layout = make_layout(targets, n_qubits);
  const Eigen::Index local = op.rows();
  const Eigen::Index cols = m.cols();
  const auto nb = static_cast<Eigen::Index>(layout.bases.size());
  const bool fork = parallel && !omp_in_parallel() && m.rows() >= parallel_dim_threshold;

#pragma omp parallel if (fork)
  {
    Vector gathered(local);
#pragma omp for schedule(static)
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index b = 0; b < nb; ++b) {
        const Eigen::Index base = layout.bases[static_cast<std::size_t>(b)];
        for (Eigen::Index j = 0; j < local; ++j) gathered[j] = m(base + layout.offsets[static_cast<std::size_t>(j)], c);
        for (Eigen::Index i = 0; i < local; ++i) {
          Complex acc{0.0, 0.0};
          for (Eigen::Index j = 0; j < local; ++j) acc += op(i, j) * gathered[j];
          m(base + layout.offsets[static_cast<std::size_t>(i)], c) = acc;
        }
      }
    }
  }
}

}  // namespace

void apply_rows_serial(Matrix& m, const Matrix& op, std::span<const int> targets, int n_qubits) {
  apply_rows_impl(m, op, targets, n_qubits, false);
}

void apply_rows_parallel(Matrix& m, const Matrix& op, std::span<const int> targets, int n_qubits) {
  apply_rows_impl(m, op, targets, n_qubits, true);
}

Matrix conjugate_serial(const Matrix& rho, const Matrix& k, std::span<const int> targets, int n_qubits) {
  check_shapes(rho, k, targets, n_qubits);
  const Matrix full = embed(k, targets, n_qubits);
  return full * rho * full.adjoint();
}

Matrix conjugate_parallel(const Matrix& rho, const Matrix& k, std::span<const int> targets, int n_qubits) {
  // K rho K† = (K (K rho)†)†, so two row applications suffice.
  Matrix a = rho;
  apply_rows_parallel(a, k, targets, n_qubits);
  Matrix b = a.adjoint();
  apply_rows_parallel(b, k, targets, n_qubits);
  return b.adjoint();
}

}  // namespace nadqec::kernels
