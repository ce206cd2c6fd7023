#pragma once

// Multi-round QEC with realistic timing, CHaDD pulse sequences and the
// ZZ-crosstalk Lindblad model.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nadqec/circuit.hpp"
#include "nadqec/code3.hpp"
#include "nadqec/noise.hpp"

namespace nadqec {

// ---- timing -------------------------------------------------------------

struct ProtocolTiming {
  double t_encode_us = 0.548;
  double t_recovery_us = 3.072;
  double t_reset_us = 2.72;

  void validate() const;
};

/// Per-round delays held in integer picoseconds so sums are exact.
struct Schedule {
  std::vector<std::int64_t> delays_ps;

  std::size_t rounds() const { return delays_ps.size(); }
  std::vector<double> delays_us() const;
  double total_free_us() const;
};

std::int64_t to_ps(double us);
double to_us(std::int64_t ps);

/// Greedy fill: as many `max_delay` rounds as fit, then one remainder round.
Schedule schedule_rounds(double total_free_us, double max_delay_us);

/// Encode + sum(delay + recovery) + decode, decode mirroring the encoder.
/// The ancilla reset runs during the following delay; a delay shorter than
/// the reset adds the shortfall.
double total_evolution_time(const Schedule& schedule, const ProtocolTiming& timing = {});

// ---- multi-round QEC ----------------------------------------------------

struct ChaddOptions {
  /// Free interval per pulse slot. Unset: one cycle per delay.
  std::optional<double> tau_us;
  bool robust = true;
  /// Number of spectator qubits appended after the data.
  int spectators = 0;
  /// ZZ couplings (i, j, g in rad/us) over [d0, d1, d2, spectators...].
  std::vector<std::pair<std::pair<int, int>, double>> couplings;
  /// Qubit frequencies in the rotating frame, rad/us; empty means zero.
  std::vector<double> omegas;
  /// Register cap counting the two QEC ancillas.
  int max_qubits = 7;
  /// Integration step as a fraction of tau.
  double steps_per_tau = 200.0;
  bool convergence_check = true;
};

struct ProtocolConfig {
  LogicalStateSpec logical{};
  double max_delay_us = 30.0;
  std::vector<double> total_free_us{};
  RecoveryVariant variant = RecoveryVariant::ideal;
  /// Required for the synthesized variant: circuit on [d0, d1, d2, syn, rec].
  std::optional<Circuit> recovery_circuit{};
  ProtocolTiming timing{};
  /// Depolarizing gate noise inside the QEC block (synthesized path only).
  bool gate_noise = false;
  /// Decoherence of the data during encode and recovery windows.
  bool decohere_during_gates = false;
  bool chadd = false;
  ChaddOptions chadd_options{};

  void validate() const;
};

struct MultiQecPoint {
  double total_free_us = 0.0;
  double total_evolution_us = 0.0;
  double fidelity = 1.0;
  double success_probability = 1.0;
  int rounds = 0;
  RecoveryVariant variant = RecoveryVariant::ideal;
  bool chadd = false;
};

/// One point per requested total free-evolution time. Points are computed
/// concurrently and returned in request order. Runs with CHaDD, spectators
/// or couplings go through run_multiqec_with_chadd.
std::vector<MultiQecPoint> run_multiqec(const ProtocolConfig& config, const NoiseParams& noise);

/// Same with the delays replaced by CHaDD-interleaved Lindblad evolution on
/// the data plus spectators. Honors `config.chadd` (off gives the matched
/// free-evolution reference on the same register).
std::vector<MultiQecPoint> run_multiqec_with_chadd(const ProtocolConfig& config, const NoiseParams& noise);

/// Probability of reading all zeros after decoding with En† and G†.
double decoded_all_zero_probability(const DensityMatrix& data, const LogicalStateSpec& logical);

void write_multiqec_csv(std::ostream& out, std::span<const MultiQecPoint> points);

struct LifetimeFit {
  double lifetime_us = 0.0;
  double amplitude = 1.0;
};

/// Least-squares fit of ln F = ln A - t / T.
LifetimeFit fit_exponential_lifetime(std::span<const double> t_us, std::span<const double> fidelity);

// ---- CHaDD --------------------------------------------------------------

enum class PulseKind { x, x_tilde };

struct ChaddPulse {
  PulseKind kind;
  int color;
};

/// A free interval of tau precedes every pulse; the final pulse closes the
/// cycle. Interval k therefore follows the first k pulses.
struct ChaddSequence {
  int chromaticity = 2;
  Eigen::MatrixXi sign_matrix;
  std::vector<int> row_assignment;
  std::vector<ChaddPulse> pulses;
  double tau_us = 0.0;
  bool robust = true;

  int interval_count() const { return static_cast<int>(pulses.size()); }
  double cycle_us() const { return tau_us * interval_count(); }
  /// Toggling-frame sign of Z on a qubit of `color` during each interval.
  std::vector<int> toggling_signs(int color) const;
};

ChaddSequence chadd_sequence(int chi, double tau_us, bool robust = true);

/// 2x2 pulse unitary: X or RX(-pi).
Matrix pulse_matrix(PulseKind kind);

/// Proper 2-coloring by breadth-first search; throws if the graph has an odd cycle.
std::vector<int> two_color(int n_qubits, std::span<const std::pair<int, int>> edges);

// ---- Lindblad -----------------------------------------------------------

/// H = sum_i omega_i/2 Z_i + sum_(i,j) g_ij Z_i Z_j with relaxation at 1/T1
/// and pure dephasing at 1/Tphi per qubit. H is diagonal, so the generator
/// acts entrywise on rho.
struct ZzLindbladModel {
  int qubits = 0;
  std::vector<double> omegas;
  std::vector<std::pair<std::pair<int, int>, double>> couplings;
  std::vector<double> t1_us;    // inf disables relaxation
  std::vector<double> tphi_us;  // inf disables dephasing

  void validate() const;
  Eigen::VectorXd energies() const;
};

namespace kernels {
void lindblad_rhs_serial(const ZzLindbladModel& m, const Eigen::VectorXd& energies, const Matrix& rho, Matrix& out);
void lindblad_rhs_parallel(const ZzLindbladModel& m, const Eigen::VectorXd& energies, const Matrix& rho, Matrix& out);
}  // namespace kernels

/// Fixed-step RK4 using the largest step <= dt_us that divides t_us evenly.
Matrix rk4_evolve(const ZzLindbladModel& m, Matrix rho, double t_us, double dt_us, bool parallel = true);

struct EvolveCheck {
  double dt_us;
  double tolerance = 1e-8;
};

/// RK4 at dt and dt/2; throws NumericalError with both results' deviation
/// when they differ by more than the tolerance. Returns the finer result.
Matrix rk4_evolve_checked(const ZzLindbladModel& m, const Matrix& rho, double t_us, const EvolveCheck& check);

/// Free evolution interleaved with one or more CHaDD cycles filling `t_us`.
/// `colors` gives each qubit's color, -1 for qubits that receive no pulses.
Matrix evolve_with_chadd(const ZzLindbladModel& m, Matrix rho, const ChaddSequence& seq, int cycles,
                         std::span<const int> colors, double dt_us, bool check);

/// Closed-system full-cycle propagator with instantaneous pulses.
Matrix chadd_cycle_propagator(const ZzLindbladModel& m, const ChaddSequence& seq, std::span<const int> colors);

// ---- crosstalk toy ------------------------------------------------------

struct CrosstalkModel {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double g = 0.2;
  double t1_us = 100.0;
  double tphi_us = 150.0;
  double tau_us = 1.0;
  double steps_per_tau = 200.0;

  ZzLindbladModel lindblad() const;
  void validate() const;
};

enum class ProbeState { zero, one, plus };

struct CrosstalkSample {
  double t_us;
  double population_one;  // probe in |1>
  double fidelity;        // probe vs its initial state
};

/// Probe on qubit 0, second qubit in |0>. Samples at every cycle boundary.
std::vector<CrosstalkSample> run_crosstalk_toy(const CrosstalkModel& model, ProbeState probe, bool chadd,
                                               double t_final_us = 80.0, bool robust = true);

}  // namespace nadqec
