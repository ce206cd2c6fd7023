#pragma once

// Hot loops of the simulator. Each kernel has a serial reference kept for
// testing and an OpenMP variant used by the library. The OpenMP variants
// run serially when called from inside an active parallel region so that
// sweep-level parallelism never nests.

#include <span>

#include "nadqec/qcore.hpp"

namespace nadqec::kernels {

/// m <- (I ⊗ op ⊗ I) m, op acting on `targets`. Serial strided loop.
void apply_rows_serial(Matrix& m, const Matrix& op, std::span<const int> targets, int n_qubits);
void apply_rows_parallel(Matrix& m, const Matrix& op, std::span<const int> targets, int n_qubits);

/// K rho K†. The serial variant builds the dense embedding and multiplies;
/// it is the reference the parallel strided variant is checked against.
Matrix conjugate_serial(const Matrix& rho, const Matrix& k, std::span<const int> targets, int n_qubits);
Matrix conjugate_parallel(const Matrix& rho, const Matrix& k, std::span<const int> targets, int n_qubits);

inline Matrix conjugate(const Matrix& rho, const Matrix& k, std::span<const int> targets, int n_qubits) {
  return conjugate_parallel(rho, k, targets, n_qubits);
}

/// Below this dimension the parallel kernels do not fork threads.
inline constexpr Eigen::Index parallel_dim_threshold = 32;

}  // namespace nadqec::kernels
