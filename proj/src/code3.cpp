#include "nadqec/code3.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "nadqec/kernels.hpp"

namespace nadqec {
namespace {

constexpr double kPi = std::numbers::pi;

Matrix outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }

Vector basis_vector(Eigen::Index dim, Eigen::Index k) {
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return v;
}

Vector w2_state() {
  Vector v = Vector::Zero(8);
  const double a = 1.0 / std::sqrt(3.0);
  v[3] = a;
  v[5] = a;
  v[6] = a;
  return v;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) ev[k] = std::sqrt(std::max(ev[k], 0.0));
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix syndrome_permutation() {
  // |d0 d1 d2 s> -> |d0 d1 d2, s xor parity(d)>
  Matrix p = Matrix::Zero(16, 16);
  for (int in = 0; in < 16; ++in) {
    const int d = in >> 1;
    const int parity = ((d >> 2) ^ (d >> 1) ^ d) & 1;
    p(in ^ parity, in) = 1.0;
  }
  return p;
}

/// |0><0|_syn (x) Dil(R1) + |1><1|_syn (x) Dil(R0) on [d0, d1, d2, syn, rec].
Matrix controlled_recovery(const RecoveryMap& map) {
  const std::array<Matrix, 2> dil{block_dilation(map.r1), block_dilation(map.r0)};
  Matrix w = Matrix::Zero(32, 32);
  for (int syn = 0; syn < 2; ++syn) {
    const Matrix& d = dil[static_cast<std::size_t>(syn)];
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        // Dilation index = data*2 + rec; register index = data*4 + syn*2 + rec.
        const int ri = ((i >> 1) << 2) | (syn << 1) | (i & 1);
        const int rj = ((j >> 1) << 2) | (syn << 1) | (j & 1);
        w(ri, rj) = d(i, j);
      }
    }
  }
  return w;
}

double sin_half_sq(double theta) {
  const double s = std::sin(theta / 2);
  return s * s;
}

}  // namespace

void LogicalStateSpec::validate() const {
  if (!(theta >= 0.0 && theta <= kPi)) throw InvalidArgument("theta must lie in [0, pi]");
  if (!(phi >= 0.0 && phi < 2 * kPi)) throw InvalidArgument("phi must lie in [0, 2pi)");
}

PureState codeword(int which) {
  if (which == 1) return PureState::basis(3, 7);
  if (which != 0) throw InvalidArgument("codeword index must be 0 or 1");
  Vector v = Vector::Zero(8);
  const double a = 1.0 / std::sqrt(3.0);
  v[4] = a;
  v[2] = a;
  v[1] = a;
  return PureState(v);
}

PureState encode_ideal(const LogicalStateSpec& spec) {
  spec.validate();
  const Vector v = std::cos(spec.theta / 2) * codeword(0).amplitudes() +
                   std::polar(std::sin(spec.theta / 2), spec.phi) * codeword(1).amplitudes();
  return PureState(v);
}

Matrix logical_prep(const LogicalStateSpec& spec) {
  const double c = std::cos(spec.theta / 2), s = std::sin(spec.theta / 2);
  Matrix g(2, 2);
  g << c, -std::polar(s, -spec.phi), std::polar(s, spec.phi), c;
  return g;
}

Matrix encoder_unitary() {
  Matrix u = Matrix::Zero(8, 8);
  u.col(0) = codeword(0).amplitudes();
  u.col(4) = codeword(1).amplitudes();
  // Complete the remaining columns by Gram-Schmidt over the computational basis.
  std::vector<Vector> basis{u.col(0), u.col(4)};
  int candidate = 0;
  for (int col = 0; col < 8; ++col) {
    if (col == 0 || col == 4) continue;
    for (;; ++candidate) {
      Vector v = basis_vector(8, candidate);
      for (const Vector& b : basis) v -= b.dot(v) * b;
      if (v.norm() > 1e-6) {
        v.normalize();
        u.col(col) = v;
        basis.push_back(v);
        ++candidate;
        break;
      }
    }
  }
  return u;
}

Matrix recovery_r0(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma outside [0, 1]");
  const Vector l0 = codeword(0).amplitudes(), l1 = codeword(1).amplitudes();
  return (1.0 - gamma) * outer(l0, l0) + outer(l1, l1);
}

Matrix recovery_r1(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma outside [0, 1]");
  const Vector l0 = codeword(0).amplitudes(), l1 = codeword(1).amplitudes();
  return (1.0 - gamma) * outer(l0, basis_vector(8, 0)) + outer(l1, w2_state());
}

Matrix block_dilation(const Matrix& r) {
  const Eigen::Index d = r.rows();
  if (r.cols() != d) throw InvalidArgument("block_dilation: operator must be square");
  const Matrix id = Matrix::Identity(d, d);
  const Matrix rr = r * r.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rr + rr.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > 1.0 + tol::structural) throw InvalidArgument("block_dilation: operator norm exceeds 1");
  const Matrix top_right = psd_sqrt(id - rr);
  const Matrix bottom_left = psd_sqrt(id - r.adjoint() * r);
  Matrix w(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      w(2 * i, 2 * j) = r(i, j);
      w(2 * i, 2 * j + 1) = top_right(i, j);
      w(2 * i + 1, 2 * j) = bottom_left(i, j);
      w(2 * i + 1, 2 * j + 1) = -std::conj(r(j, i));
    }
  }
  return w;
}

RecoveryMap RecoveryMap::ideal(double gamma) {
  return RecoveryMap{RecoveryVariant::ideal, gamma, recovery_r0(gamma), recovery_r1(gamma), std::nullopt};
}

RecoveryMap RecoveryMap::approximate() {
  return RecoveryMap{RecoveryVariant::approximate, 0.0, recovery_r0(0.0), recovery_r1(0.0), std::nullopt};
}

RecoveryMap RecoveryMap::synthesized(Circuit circuit, double design_gamma) {
  if (circuit.qubit_count() != 5) throw InvalidArgument("synthesized recovery must act on [d0, d1, d2, syn, rec]");
  return RecoveryMap{RecoveryVariant::synthesized, design_gamma, recovery_r0(design_gamma), recovery_r1(design_gamma),
                     std::move(circuit)};
}

const char* variant_name(RecoveryVariant v) {
  switch (v) {
    case RecoveryVariant::ideal:
      return "ideal";
    case RecoveryVariant::approximate:
      return "approximate";
    case RecoveryVariant::synthesized:
      return "synthesized";
  }
  return "?";
}

Circuit syndrome_circuit() {
  Circuit c(4);
  c.cnot(0, 3).cnot(1, 3).cnot(2, 3);
  return c;
}

DensityMatrix syndrome_extract(const DensityMatrix& rho) {
  if (rho.qubit_count() != 4) throw InvalidArgument("syndrome_extract expects [d0, d1, d2, syn]");
  const std::array<int, 4> t{0, 1, 2, 3};
  return apply_unitary(rho, syndrome_permutation(), t);
}

RecoveryBranch recover(const DensityMatrix& rho, int syndrome, const RecoveryMap& map) {
  if (syndrome != 0 && syndrome != 1) throw InvalidArgument("syndrome bit must be 0 or 1");
  if (rho.qubit_count() != 3) throw InvalidArgument("recover expects a 3-qubit data state");
  const Matrix& r = syndrome == 1 ? map.r0 : map.r1;
  const DensityMatrix extended = tensor(rho, DensityMatrix::basis(1, 0));
  const std::array<int, 4> t{0, 1, 2, 3};
  const DensityMatrix after = apply_unitary(extended, block_dilation(r), t);
  const std::array<int, 3> keep{0, 1, 2};
  const DensityMatrix success = partial_trace(project_qubit(after, 3, 0), keep);
  const double failure = partial_trace(project_qubit(after, 3, 1), keep).trace();
  return RecoveryBranch{success, failure};
}

DensityMatrix correct(const DensityMatrix& rho, const RecoveryMap& map, const GateNoise& gate_noise) {
  const int n = rho.qubit_count();
  if (n < 3) throw InvalidArgument("correct: register must hold at least the three data qubits");
  DensityMatrix reg = tensor(rho, DensityMatrix::basis(2, 0));
  const int syn = n, rec = n + 1;
  const std::array<int, 5> targets{0, 1, 2, syn, rec};

  if (map.variant == RecoveryVariant::synthesized) {
    if (!map.circuit) throw InvalidArgument("synthesized recovery map lacks its circuit");
    const std::array<int, 4> syn_targets{0, 1, 2, syn};
    reg = run_circuit(reg, syndrome_circuit(), syn_targets, gate_noise.depolarizing_1q, gate_noise.depolarizing_2q);
    reg = run_circuit(reg, *map.circuit, targets, gate_noise.depolarizing_1q, gate_noise.depolarizing_2q);
  } else {
    const std::array<int, 4> syn_targets{0, 1, 2, syn};
    reg = apply_unitary(reg, syndrome_permutation(), syn_targets);
    reg = apply_unitary(reg, controlled_recovery(map), targets);
  }

  std::vector<int> keep(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) keep[static_cast<std::size_t>(q)] = q;
  return partial_trace(project_qubit(reg, rec, 0), keep);
}

QecOutcome qec_cycle(const DensityMatrix& rho, NoiseStrength noise, const RecoveryMap& map,
                     const std::optional<PureState>& target, const GateNoise& gate_noise) {
  if (rho.qubit_count() < 3) throw InvalidArgument("qec_cycle needs the three data qubits");
  DensityMatrix noisy = rho;
  const KrausChannel ad = amplitude_damping(noise.gamma);
  const KrausChannel dp = dephasing(noise.p);
  for (int q = 0; q < 3; ++q) {
    noisy = apply_channel(noisy, ad, q);
    if (noise.p > 0.0) noisy = apply_channel(noisy, dp, q);
  }
  const DensityMatrix branch = correct(noisy, map, gate_noise);
  const double ps = branch.trace() / rho.trace();
  const DensityMatrix conditional = branch.normalized();
  double f = std::numeric_limits<double>::quiet_NaN();
  if (target) {
    if (conditional.qubit_count() == 3) {
      f = fidelity(conditional, *target);
    } else {
      const std::array<int, 3> data{0, 1, 2};
      f = fidelity(partial_trace(conditional, data), *target);
    }
  }
  return QecOutcome{conditional, ps, f};
}

double oracle_fidelity_ad(double theta, double gamma) {
  const double s2 = sin_half_sq(theta);
  const double c2 = 1.0 - s2;
  const double g2 = gamma * gamma;
  return (1.0 + g2 * s2 * c2) / (1.0 + g2 * s2);
}

SeriesCoefficients series_coefficients(double theta, SeriesVariant variant, SeriesForm form) {
  const double c = std::cos(theta);
  const double sn2 = std::sin(theta) * std::sin(theta);
  const double sh2 = sin_half_sq(theta);
  SeriesCoefficients k{};
  k.p = -(4.0 / 3.0) * sn2;
  k.pp = -(4.0 / 9.0) * sn2 * (4.0 * c + 1.0);
  if (variant == SeriesVariant::approximate) {
    k.pg = (4.0 / 3.0) * c * sn2;
    k.gg = 0.5 * (c - 1.0);
  } else if (form == SeriesForm::printed) {
    k.pg = (1.0 / 3.0) * (2.0 * c - 1.0) * sn2;
    k.gg = (1.0 / 8.0) * (3.0 * c - 5.0) * sh2;
  } else {
    k.pg = -(2.0 / 3.0) * sn2;
    k.gg = -sh2 * sh2;
  }
  return k;
}

double oracle_fidelity_series(double theta, double gamma, double p, SeriesVariant variant, SeriesForm form) {
  const SeriesCoefficients k = series_coefficients(theta, variant, form);
  return 1.0 + k.p * p + k.pp * p * p + k.pg * p * gamma + k.gg * gamma * gamma;
}

double oracle_fidelity_series_time(double theta, double t, double t1, double t2, SeriesVariant variant,
                                   SeriesForm form) {
  const double c = std::cos(theta);
  const double c2t = std::cos(2.0 * theta);
  const double sn2 = std::sin(theta) * std::sin(theta);
  const double sh2 = sin_half_sq(theta);
  const double linear = (2.0 * t1 - t2) * sn2 / (3.0 * t1 * t2);

  if (form == SeriesForm::printed) {
    double quad = 0.0;
    if (variant == SeriesVariant::ideal) {
      quad = (45.0 * t2 * t2 + (32.0 * t1 * t1 - 56.0 * t1 * t2 - 7.0 * t2 * t2) * c -
              4.0 * (2.0 * t1 - t2) * (-4.0 * t1 + 5.0 * t2) * c2t) *
             sh2 / (72.0 * t1 * t1 * t2 * t2);
    } else {
      quad = (6.0 * t2 * (-t1 + 2.0 * t2) + (2.0 * t1 - t2) * ((2.0 * t1 - 7.0 * t2) * c + 2.0 * (t1 - 2.0 * t2) * c2t)) *
             sh2 / (9.0 * t1 * t1 * t2 * t2);
    }
    return 1.0 - linear * t - quad * t * t;
  }

  // gamma = t/T1 - t^2/(2 T1^2) + ..., p = r t/2 - r^2 t^2/4 + ..., r = 1/Tphi.
  const SeriesCoefficients k = series_coefficients(theta, variant, SeriesForm::consistent);
  const double r = 1.0 / t2 - 1.0 / (2.0 * t1);
  const double a1 = k.p * r / 2.0;
  const double a2 = -k.p * r * r / 4.0 + k.pp * r * r / 4.0 + k.pg * r / (2.0 * t1) + k.gg / (t1 * t1);
  return 1.0 + a1 * t + a2 * t * t;
}

double oracle_fidelity_plus_printed(double gamma, double p, SeriesVariant variant) {
  if (variant == SeriesVariant::ideal) return 1.0 - (4.0 + gamma) * p / 3.0 - 4.0 * p * p / 9.0 - 5.0 * gamma * gamma / 16.0;
  return 1.0 - 4.0 * p / 3.0 - 4.0 * p * p / 9.0 - gamma * gamma / 2.0;
}

double oracle_success_probability(double theta, double gamma, double p, SuccessForm form) {
  const double s2 = sin_half_sq(theta);
  const double c2 = 1.0 - s2;
  const double a = (1.0 - gamma) * (1.0 - gamma);
  const double g2 = gamma * gamma;
  switch (form) {
    case SuccessForm::printed_short:
      return a * (1.0 - g2 * s2);
    case SuccessForm::printed_full:
    case SuccessForm::consistent:
      return a * (1.0 + g2 * s2 + (8.0 / 3.0) * p * (p - 1.0) * (1.0 - gamma) * c2);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double oracle_success_lower_bound(double gamma, double p) {
  return (1.0 - gamma) * (1.0 - gamma) * (1.0 + (8.0 * p / 3.0) * (gamma + p - 1.0 - gamma * p));
}

}  // namespace nadqec
