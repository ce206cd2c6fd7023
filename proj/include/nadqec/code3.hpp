#pragma once

// The 3-qubit amplitude-damping code.
//
//   |0_L> = (|100> + |010> + |001>)/sqrt(3)     |1_L> = |111>
//
// Syndrome convention: three CNOTs copy the excitation parity of the data
// onto a fresh ancilla. Ancilla = 1 (odd parity) flags the no-damping
// branch and selects R0; ancilla = 0 flags a single damping and selects R1.
//
// Recovery operators are non-unitary. Each is block-encoded with one fresh
// recovery ancilla; the success branch is recovery-ancilla outcome 0.

#include <optional>

#include "nadqec/circuit.hpp"
#include "nadqec/noise.hpp"
#include "nadqec/qcore.hpp"

namespace nadqec {

struct LogicalStateSpec {
  double theta = 0.0;
  double phi = 0.0;

  void validate() const;
};

/// |0_L> (which = 0) or |1_L> (which = 1).
PureState codeword(int which);

/// cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L>.
PureState encode_ideal(const LogicalStateSpec& spec);

/// Single-qubit G with G|0> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
Matrix logical_prep(const LogicalStateSpec& spec);

/// 8x8 unitary taking |000> -> |0_L> and |100> -> |1_L>; the remaining
/// columns are a fixed orthonormal completion.
Matrix encoder_unitary();

/// (1-g)|0_L><0_L| + |1_L><1_L|
Matrix recovery_r0(double gamma);
/// (1-g)|0_L><000| + |1_L><W2|, W2 = (|011>+|101>+|110>)/sqrt(3)
Matrix recovery_r1(double gamma);

/// Unitary dilation [[R, sqrt(I-RR†)], [sqrt(I-R†R), -R†]] with the
/// ancilla as the least significant qubit. Requires ||R|| <= 1.
Matrix block_dilation(const Matrix& r);

enum class RecoveryVariant { ideal, approximate, synthesized };

struct RecoveryMap {
  RecoveryVariant variant = RecoveryVariant::ideal;
  /// Damping strength the operators were built for (0 for approximate).
  double gamma = 0.0;
  Matrix r0;
  Matrix r1;
  /// Synthesized variant only: a circuit on [d0, d1, d2, syn, rec].
  std::optional<Circuit> circuit;

  static RecoveryMap ideal(double gamma);
  static RecoveryMap approximate();
  /// `design_gamma` names the analytic operators the circuit implements.
  static RecoveryMap synthesized(Circuit circuit, double design_gamma = 0.0);
};

const char* variant_name(RecoveryVariant v);

/// Syndrome-extraction circuit on [d0, d1, d2, syn] in native gates.
Circuit syndrome_circuit();

/// Copies data parity onto the ancilla; `rho` is [d0, d1, d2, syn].
DensityMatrix syndrome_extract(const DensityMatrix& rho);

struct RecoveryBranch {
  DensityMatrix success;  // sub-normalized
  double failure_weight;
};

/// Applies R0 (syndrome 1) or R1 (syndrome 0) to the 3-qubit branch `rho`
/// through its block encoding and keeps the success outcome.
RecoveryBranch recover(const DensityMatrix& rho, int syndrome, const RecoveryMap& map);

struct GateNoise {
  double depolarizing_1q = 0.0;
  double depolarizing_2q = 0.0;
};

/// Syndrome extraction plus recovery on a register whose first three qubits
/// are the data; any further qubits ride along untouched. Two ancillas are
/// attached, used and traced out. The result is the sub-normalized success
/// branch, its trace being the success probability.
DensityMatrix correct(const DensityMatrix& rho, const RecoveryMap& map, const GateNoise& gate_noise = {});

struct NoiseStrength {
  double gamma = 0.0;
  double p = 0.0;
};

struct QecOutcome {
  DensityMatrix conditional_state;
  double success_probability;
  double fidelity;  // NaN when no target was given
};

/// AD(gamma) then dephasing(p) on each data qubit, followed by `correct`.
QecOutcome qec_cycle(const DensityMatrix& rho, NoiseStrength noise, const RecoveryMap& map,
                     const std::optional<PureState>& target = std::nullopt, const GateNoise& gate_noise = {});

// ---- closed forms -------------------------------------------------------

/// (1 + g^2 s^2 c^2) / (1 + g^2 s^2), s = sin(theta/2), c = cos(theta/2).
double oracle_fidelity_ad(double theta, double gamma);

enum class SeriesVariant { ideal, approximate };
/// `printed` evaluates the published truncations verbatim. `consistent`
/// uses coefficients re-derived from exact simulation; the two differ for
/// the ideal map in the p*gamma and gamma^2 terms.
enum class SeriesForm { printed, consistent };

struct SeriesCoefficients {
  double p;
  double pp;
  double pg;
  double gg;
};

SeriesCoefficients series_coefficients(double theta, SeriesVariant variant, SeriesForm form);
double oracle_fidelity_series(double theta, double gamma, double p, SeriesVariant variant,
                              SeriesForm form = SeriesForm::printed);
/// Same expansion in the free-evolution time t with T1, T2 (second order in t).
double oracle_fidelity_series_time(double theta, double t_us, double t1_us, double t2_us, SeriesVariant variant,
                                   SeriesForm form = SeriesForm::printed);

/// Published |+_L> special cases: 1 - (4+g)p/3 - 4p^2/9 - 5g^2/16 (ideal)
/// and 1 - 4p/3 - 4p^2/9 - g^2/2 (approximate).
double oracle_fidelity_plus_printed(double gamma, double p, SeriesVariant variant);

enum class SuccessForm { printed_short, printed_full, consistent };

/// printed_short: (1-g)^2 (1 - g^2 s^2), ignores p.
/// printed_full:  (1-g)^2 (1 + g^2 s^2 + (8/3) p (p-1)(1-g) c^2).
/// consistent: the form exact simulation reproduces (equal to printed_full).
double oracle_success_probability(double theta, double gamma, double p, SuccessForm form = SuccessForm::consistent);

/// |0_L> success probability, the minimum over theta.
double oracle_success_lower_bound(double gamma, double p);

}  // namespace nadqec
