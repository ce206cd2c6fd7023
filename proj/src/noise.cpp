#include "nadqec/noise.hpp"

#include "nadqec/kernels.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace nadqec {

KrausChannel::KrausChannel(std::vector<Matrix> ops, TraceProperty property)
    : ops_(std::move(ops)), property_(property) {
  if (ops_.empty()) throw InvalidArgument("Kraus channel needs at least one operator");
  const Eigen::Index dim = ops_.front().rows();
  for (const Matrix& k : ops_) {
    if (k.rows() != dim || k.cols() != dim) throw InvalidArgument("Kraus operators must share one square shape");
  }
  arity_ = qubit_count_for_dim(dim);

  Matrix sum = Matrix::Zero(dim, dim);
  for (const Matrix& k : ops_) sum += k.adjoint() * k;
  if (property_ == TraceProperty::preserving) {
    if (max_abs(sum - Matrix::Identity(dim, dim)) > tol::structural) {
      throw InvalidArgument("channel declared trace-preserving violates completeness");
    }
  } else if (completeness_norm() > 1.0 + tol::structural) {
    throw InvalidArgument("channel declared trace-non-increasing has sum K†K above identity");
  }
}

double KrausChannel::completeness_norm() const {
  const Eigen::Index dim = ops_.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const Matrix& k : ops_) sum += k.adjoint() * k;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double gamma_of_t(double t_us, double t1_us) {
  if (t_us < 0.0) throw InvalidArgument("gamma_of_t: negative time");
  if (!(t1_us > 0.0)) throw InvalidArgument("gamma_of_t: T1 must be positive");
  return -std::expm1(-t_us / t1_us);
}

double p_of_t(double t_us, double tphi_us) {
  if (t_us < 0.0) throw InvalidArgument("p_of_t: negative time");
  if (!(tphi_us > 0.0)) throw InvalidArgument("p_of_t: Tphi must be positive");
  if (std::isinf(tphi_us)) return 0.0;
  return -0.5 * std::expm1(-t_us / tphi_us);
}

KrausChannel amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("amplitude_damping: gamma outside [0, 1]");
  Matrix a0 = Matrix::Zero(2, 2);
  Matrix a1 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - gamma);
  a1(0, 1) = std::sqrt(gamma);
  return KrausChannel({a0, a1}, TraceProperty::preserving);
}

KrausChannel dephasing(double p) {
  if (!(p >= 0.0 && p <= 0.5)) throw InvalidArgument("dephasing: p outside [0, 0.5]");
  Matrix k0 = std::sqrt(1.0 - p) * Matrix::Identity(2, 2);
  Matrix k1 = std::sqrt(p) * Operator::pauli_z().matrix();
  return KrausChannel({k0, k1}, TraceProperty::preserving);
}

KrausChannel depolarizing(double p, int arity) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("depolarizing: p outside [0, 1]");
  if (arity != 1 && arity != 2) throw InvalidArgument("depolarizing: arity must be 1 or 2");
  const std::array<Matrix, 4> paulis{Matrix::Identity(2, 2), Operator::pauli_x().matrix(),
                                     Operator::pauli_y().matrix(), Operator::pauli_z().matrix()};
  const int terms = arity == 1 ? 4 : 16;
  const double others = static_cast<double>(terms - 1);
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(terms));
  for (int t = 0; t < terms; ++t) {
    const double w = (t == 0) ? 1.0 - p : p / others;
    const Matrix pauli = arity == 1 ? paulis[static_cast<std::size_t>(t)]
                                    : kron(paulis[static_cast<std::size_t>(t / 4)], paulis[static_cast<std::size_t>(t % 4)]);
    ops.push_back(std::sqrt(w) * pauli);
  }
  return KrausChannel(std::move(ops), TraceProperty::preserving);
}

KrausChannel identity_channel(int arity) {
  const Eigen::Index dim = Eigen::Index{1} << arity;
  return KrausChannel({Matrix::Identity(dim, dim)}, TraceProperty::preserving);
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, int target) {
  const std::array<int, 1> t{target};
  return apply_channel(rho, ch, std::span<const int>(t));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != ch.arity()) throw InvalidArgument("apply_channel: target count != channel arity");
  for (int t : targets) {
    if (t < 0 || t >= rho.qubit_count()) throw InvalidArgument("apply_channel: target out of range");
  }
  Matrix acc = Matrix::Zero(rho.dim(), rho.dim());
  for (const Matrix& k : ch.ops()) acc += kernels::conjugate(rho.matrix(), k, targets, rho.qubit_count());
  const bool keeps_norm = rho.is_normalized() && ch.trace_property() == TraceProperty::preserving;
  if (keeps_norm) acc = 0.5 * (acc + acc.adjoint()).eval();
  return DensityMatrix(std::move(acc), keeps_norm ? Normalization::normalized : Normalization::sub_normalized);
}

OutcomeDistribution readout_flip(const OutcomeDistribution& dist, double e_meas) {
  return readout_flip(dist, ReadoutError::symmetric(e_meas));
}

OutcomeDistribution readout_flip(const OutcomeDistribution& dist, const ReadoutError& err) {
  if (!(err.p01 >= 0.0 && err.p01 <= 1.0 && err.p10 >= 0.0 && err.p10 <= 1.0)) {
    throw InvalidArgument("readout error probabilities must lie in [0, 1]");
  }
  const int k = static_cast<int>(dist.qubits.size());
  std::vector<double> probs = dist.probabilities;
  // Bits flip independently, so convolve one bit at a time.
  for (int q = 0; q < k; ++q) {
    const std::uint64_t b = std::uint64_t{1} << (k - 1 - q);
    std::vector<double> next(probs.size(), 0.0);
    for (std::uint64_t o = 0; o < probs.size(); ++o) {
      const bool one = (o & b) != 0;
      const double flip = one ? err.p10 : err.p01;
      next[o] += probs[o] * (1.0 - flip);
      next[o ^ b] += probs[o] * flip;
    }
    probs = std::move(next);
  }
  return OutcomeDistribution{dist.qubits, std::move(probs)};
}

double QubitNoise::tphi_us() const {
  const double inv = 1.0 / t2_us - 1.0 / (2.0 * t1_us);
  if (inv <= 1e-15 / t2_us) return std::numeric_limits<double>::infinity();
  return 1.0 / inv;
}

void QubitNoise::validate() const {
  if (!(t1_us > 0.0)) throw InvalidArgument("T1 must be positive");
  if (!(t2_us > 0.0)) throw InvalidArgument("T2 must be positive");
  if (t2_us > 2.0 * t1_us * (1.0 + 1e-12)) throw InvalidArgument("T2 must not exceed 2*T1");
}

const QubitNoise& NoiseParams::qubit(int i) const {
  if (qubits.empty()) throw InvalidArgument("NoiseParams has no qubit entries");
  if (qubits.size() == 1) return qubits.front();
  return qubits.at(static_cast<std::size_t>(i));
}

void NoiseParams::validate() const {
  if (qubits.empty()) throw InvalidArgument("NoiseParams has no qubit entries");
  for (const auto& q : qubits) q.validate();
  if (!(e_meas >= 0.0 && e_meas <= 0.5)) throw InvalidArgument("E_meas must lie in [0, 0.5]");
  if (readout && !(readout->p01 >= 0.0 && readout->p01 <= 0.5 && readout->p10 >= 0.0 && readout->p10 <= 0.5)) {
    throw InvalidArgument("readout error rates must lie in [0, 0.5]");
  }
  if (!(depolarizing_1q >= 0.0 && depolarizing_1q <= 1.0)) throw InvalidArgument("depolarizing_1q outside [0, 1]");
  if (!(depolarizing_2q >= 0.0 && depolarizing_2q <= 1.0)) throw InvalidArgument("depolarizing_2q outside [0, 1]");
}

DensityMatrix apply_idle(const DensityMatrix& rho, int qubit, double dt_us, const QubitNoise& q) {
  if (dt_us == 0.0) return rho;
  DensityMatrix out = apply_channel(rho, amplitude_damping(gamma_of_t(dt_us, q.t1_us)), qubit);
  const double p = p_of_t(dt_us, q.tphi_us());
  if (p > 0.0) out = apply_channel(out, dephasing(p), qubit);
  return out;
}

}  // namespace nadqec
