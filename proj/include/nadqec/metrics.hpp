#pragma once

// Shot sampling, SNR and gain figures of merit.
//
// SNR of an all-zero estimate is F / sigma with sigma the standard error of
// that estimate. For QEC runs the estimate is formed from the post-selected
// shots but N counts every shot, which is where the sqrt(p_success)
// discount comes from.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nadqec/code3.hpp"
#include "nadqec/qcore.hpp"

namespace nadqec {

struct ShotRecord {
  long shots = 0;
  long successes = 0;
  long all_zero_hits = 0;
  double fidelity = 0.0;  // all_zero_hits / successes
  double sigma = 0.0;     // binomial standard error of `fidelity`
  std::uint64_t seed = 0;
};

/// Draws `shots` outcomes. Each shot first passes post-selection with
/// probability `p_success`, then reads an outcome of `dist` with every bit
/// flipped independently with probability `e_meas`. Generator: mt19937_64
/// with 53-bit uniforms.
ShotRecord sample_shots(const OutcomeDistribution& dist, long shots, double e_meas, std::uint64_t seed,
                        double p_success = 1.0);

/// {F, 1 - F} on one bit: the all-zero proxy used by the gain model.
OutcomeDistribution single_bit_distribution(double f);

enum class GainStatus { ok, limit, undefined };
const char* gain_status_name(GainStatus s);

struct GainResult {
  double value = 0.0;
  GainStatus status = GainStatus::ok;
};

/// F_QEC sqrt(N_bare) sigma_bare / (F_bare sqrt(N_QEC) sigma_QEC), N being
/// total shots. Undefined when either sigma is zero.
GainResult gain_expt(const ShotRecord& qec, const ShotRecord& bare);

/// F (1 - E) + (1 - F) E
double f_star(double f, double e_meas);

/// sqrt(F* (1 - F*)), the per-shot binomial standard deviation.
double sigma_binomial(double f_star_value);

enum class GainModel { closed_form, simulation };

struct GainBreakdown {
  GainResult gain;
  double f_qec = 0.0;
  double f_bare = 0.0;
  double p_success = 0.0;
  double sigma_qec = 0.0;      // from F* of the post-selected estimate
  double sigma_qec_raw = 0.0;  // from F* of p_success * F, the unconditioned all-zero rate
  double sigma_bare = 0.0;
};

/// F*_QEC sigma_bare / (F*_bare sigma_QEC) sqrt(p_success). The bare qubit
/// is |1> after AD(gamma), F_bare = 1 - gamma. `closed_form` uses the ideal
/// map's closed forms and requires p = 0; `simulation` runs one exact cycle.
GainBreakdown gain_theoretical(double theta, double gamma, double p, double e_meas,
                               RecoveryVariant variant = RecoveryVariant::ideal,
                               GainModel model = GainModel::simulation);

struct GainCell {
  double t1_us;
  double e_meas;
  double delay_us;
  GainBreakdown result;
};

struct GainSurface {
  std::vector<double> t1_us;
  std::vector<double> e_meas;
  std::vector<double> delay_us;
  /// Row-major over (t1, e_meas, delay).
  std::vector<GainCell> cells;

  const GainCell& at(std::size_t i_t1, std::size_t i_e, std::size_t i_delay) const;
  /// Adjacent E_meas pairs where the gain increases, at fixed (T1, delay).
  std::vector<std::string> monotonicity_violations() const;
  /// Cells whose gain exceeds the E_meas = 0 gain at matched (T1, delay).
  std::vector<std::string> zero_error_dominance_violations() const;
};

struct GainSurfaceOptions {
  std::vector<double> t1_us{50, 100, 150, 220, 300, 400};
  std::vector<double> e_meas{0.0, 0.001, 0.0025, 0.005, 0.01, 0.02, 0.03, 0.05};
  std::vector<double> delay_us{5, 10, 20, 30, 50};
  double theta = 3.141592653589793;
  RecoveryVariant variant = RecoveryVariant::ideal;
  GainModel model = GainModel::closed_form;
};

/// T2 = 2 T1 throughout, so pure dephasing vanishes. Cells are evaluated
/// concurrently and stored in grid order.
GainSurface gain_surface(const GainSurfaceOptions& options = {});

void write_gain_surface_csv(std::ostream& out, const GainSurface& s);

}  // namespace nadqec
