#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nadqec/qcore.hpp"

namespace nadqec {

enum class TraceProperty { preserving, non_increasing };

/// A CP map given by Kraus operators on `arity` qubits. Construction
/// verifies the declared trace property.
class KrausChannel {
 public:
  KrausChannel(std::vector<Matrix> ops, TraceProperty property);

  const std::vector<Matrix>& ops() const { return ops_; }
  TraceProperty trace_property() const { return property_; }
  int arity() const { return arity_; }

  /// Largest eigenvalue of sum K†K.
  double completeness_norm() const;

 private:
  std::vector<Matrix> ops_;
  TraceProperty property_;
  int arity_;
};

/// 1 - exp(-t/T1).
double gamma_of_t(double t_us, double t1_us);

/// (1 - exp(-t/Tphi)) / 2. An infinite Tphi gives 0.
double p_of_t(double t_us, double tphi_us);

/// A0 = |0><0| + sqrt(1-g)|1><1|, A1 = sqrt(g)|0><1|.
KrausChannel amplitude_damping(double gamma);

/// {sqrt(1-p) I, sqrt(p) Z}; off-diagonals scale by (1 - 2p).
KrausChannel dephasing(double p);

/// Uniform Pauli mixture: weight 1-p on identity, p/(4^arity - 1) on each other Pauli string.
KrausChannel depolarizing(double p, int arity);

KrausChannel identity_channel(int arity);

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, int target);
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, std::span<const int> targets);

/// Per-bit readout error; `p01` is P(read 1 | true 0), `p10` is P(read 0 | true 1).
struct ReadoutError {
  double p01 = 0.0;
  double p10 = 0.0;

  static ReadoutError symmetric(double e) { return {e, e}; }
};

OutcomeDistribution readout_flip(const OutcomeDistribution& dist, double e_meas);
OutcomeDistribution readout_flip(const OutcomeDistribution& dist, const ReadoutError& err);

struct QubitNoise {
  double t1_us = 220.0;
  double t2_us = 440.0;

  /// From 1/T2 = 1/(2 T1) + 1/Tphi; infinite when T2 = 2 T1.
  double tphi_us() const;
  void validate() const;
};

/// Gate durations in microseconds.
struct GateDurations {
  double single_qubit = 0.032;
  double rz = 0.0;  // virtual-Z
  double two_qubit = 0.084;
  double measure = 1.56;
  double reset = 2.72;
};

struct NoiseParams {
  /// Either one entry (applies to every qubit) or one per qubit.
  std::vector<QubitNoise> qubits{QubitNoise{}};
  GateDurations durations{};
  double e_meas = 0.0;
  /// Asymmetric override; when unset the symmetric e_meas is used.
  std::optional<ReadoutError> readout{};
  double depolarizing_1q = 0.0;
  double depolarizing_2q = 0.0;

  const QubitNoise& qubit(int i) const;
  ReadoutError readout_error() const { return readout.value_or(ReadoutError::symmetric(e_meas)); }
  void validate() const;
};

/// Free evolution of one qubit for `dt_us`: AD(gamma(dt)) then dephasing(p(dt)).
DensityMatrix apply_idle(const DensityMatrix& rho, int qubit, double dt_us, const QubitNoise& q);

}  // namespace nadqec
