#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's channel, kernel or code3 machinery: Kraus products are built
// from explicit 2x2 matrices and composed with plain dense algebra.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline M kron3(const M& a, const M& b, const M& c) { return kron(kron(a, b), c); }

/// The eight single-qubit AD x dephasing Kraus products, flattened:
/// index = 2*ad + dephase.
inline std::array<M, 4> local_kraus(double gamma, double p) {
  M a0 = M::Zero(2, 2), a1 = M::Zero(2, 2), d0 = M::Identity(2, 2), d1 = M::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - gamma);
  a1(0, 1) = std::sqrt(gamma);
  d0 *= std::sqrt(1.0 - p);
  d1(0, 0) = std::sqrt(p);
  d1(1, 1) = -std::sqrt(p);
  return {d0 * a0, d1 * a0, d0 * a1, d1 * a1};
}

inline V codeword0() {
  V v = V::Zero(8);
  v[4] = v[2] = v[1] = 1.0 / std::sqrt(3.0);
  return v;
}

inline V codeword1() {
  V v = V::Zero(8);
  v[7] = 1.0;
  return v;
}

inline V w2() {
  V v = V::Zero(8);
  v[3] = v[5] = v[6] = 1.0 / std::sqrt(3.0);
  return v;
}

inline V logical(double theta, double phi) {
  return std::cos(theta / 2) * codeword0() + std::polar(std::sin(theta / 2), phi) * codeword1();
}

inline M r0(double g) { return (1.0 - g) * codeword0() * codeword0().adjoint() + codeword1() * codeword1().adjoint(); }

inline M r1(double g) {
  V e0 = V::Zero(8);
  e0[0] = 1.0;
  return (1.0 - g) * codeword0() * e0.adjoint() + codeword1() * w2().adjoint();
}

/// Projector onto data states with the given excitation parity.
inline M parity_projector(int parity) {
  M p = M::Zero(8, 8);
  for (int i = 0; i < 8; ++i) {
    const int par = ((i >> 2) ^ (i >> 1) ^ i) & 1;
    if (par == parity) p(i, i) = 1.0;
  }
  return p;
}

struct Result {
  M branch;  // sub-normalized success branch
  double p_success;
  double fidelity;
};

/// Enumerates all 4^3 local Kraus products, routes each by parity to R0
/// (odd) or R1 (even), and sums the branches.
inline Result brute_force_cycle(const V& psi, double gamma, double p, const M& rr0, const M& rr1) {
  const auto k = local_kraus(gamma, p);
  const M rho = psi * psi.adjoint();
  M noisy = M::Zero(8, 8);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const M e = kron3(k[a], k[b], k[c]);
        noisy += e * rho * e.adjoint();
      }
  const M p1 = parity_projector(1), p0 = parity_projector(0);
  M branch = rr0 * p1 * noisy * p1 * rr0.adjoint() + rr1 * p0 * noisy * p0 * rr1.adjoint();
  const double ps = branch.trace().real();
  const double f = (psi.adjoint() * branch * psi)(0, 0).real() / ps;
  return {branch, ps, f};
}

inline M random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  M g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = C(n(rng), n(rng));
  M rho = g * g.adjoint();
  return rho / rho.trace();
}

inline M random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  M g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = C(n(rng), n(rng));
  Eigen::HouseholderQR<M> qr(g);
  return qr.householderQ();
}

}  // namespace oracle
