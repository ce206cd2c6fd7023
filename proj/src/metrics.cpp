#include "nadqec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "nadqec/noise.hpp"

namespace nadqec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerate = 1e-15;  // F*(1 - F*) below this counts as sigma = 0

double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

OutcomeDistribution single_bit_distribution(double f) {
  check_probability(f, "fidelity");
  return OutcomeDistribution{{0}, {f, 1.0 - f}};
}

ShotRecord sample_shots(const OutcomeDistribution& dist, long shots, double e_meas, std::uint64_t seed,
                        double p_success) {
  if (shots <= 0) throw InvalidArgument("sample_shots: shot count must be positive");
  check_probability(p_success, "p_success");
  const OutcomeDistribution noisy = readout_flip(dist, e_meas);
  std::vector<double> cdf(noisy.probabilities.size());
  std::partial_sum(noisy.probabilities.begin(), noisy.probabilities.end(), cdf.begin());
  const double total = cdf.back();

  std::mt19937_64 rng(seed);
  ShotRecord r;
  r.shots = shots;
  r.seed = seed;
  for (long i = 0; i < shots; ++i) {
    if (uniform53(rng) >= p_success) continue;
    ++r.successes;
    const double u = uniform53(rng) * total;
    const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (k == 0) ++r.all_zero_hits;
  }
  if (r.successes > 0) {
    r.fidelity = static_cast<double>(r.all_zero_hits) / static_cast<double>(r.successes);
    r.sigma = std::sqrt(r.fidelity * (1.0 - r.fidelity) / static_cast<double>(r.successes));
  } else {
    r.fidelity = 0.0;
    r.sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

const char* gain_status_name(GainStatus s) {
  switch (s) {
    case GainStatus::ok: return "ok";
    case GainStatus::limit: return "limit";
    case GainStatus::undefined: return "undefined";
  }
  return "?";
}

GainResult gain_expt(const ShotRecord& qec, const ShotRecord& bare) {
  if (!(qec.sigma > 0.0) || !(bare.sigma > 0.0) || bare.fidelity == 0.0)
    return {std::numeric_limits<double>::quiet_NaN(), GainStatus::undefined};
  const double v = qec.fidelity * std::sqrt(static_cast<double>(bare.shots)) * bare.sigma /
                   (bare.fidelity * std::sqrt(static_cast<double>(qec.shots)) * qec.sigma);
  return {v, GainStatus::ok};
}

double f_star(double f, double e) {
  check_probability(f, "fidelity");
  check_probability(e, "E_meas");
  return f * (1.0 - e) + (1.0 - f) * e;
}

double sigma_binomial(double fs) {
  check_probability(fs, "F*");
  return std::sqrt(fs * (1.0 - fs));
}

GainBreakdown gain_theoretical(double theta, double gamma, double p, double e_meas, RecoveryVariant variant,
                               GainModel model) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1)");
  if (!(p >= 0.0 && p <= 0.5)) throw InvalidArgument("p must lie in [0, 0.5]");
  if (!(e_meas >= 0.0 && e_meas <= 0.5)) throw InvalidArgument("E_meas must lie in [0, 0.5]");
  if (variant == RecoveryVariant::synthesized) throw InvalidArgument("gain_theoretical: use the approximate variant");

  GainBreakdown b;
  if (model == GainModel::closed_form) {
    if (variant != RecoveryVariant::ideal || p != 0.0)
      throw InvalidArgument("closed-form gain needs the ideal map and p = 0");
    b.f_qec = oracle_fidelity_ad(theta, gamma);
    b.p_success = oracle_success_probability(theta, gamma, 0.0);
  } else {
    const LogicalStateSpec spec{theta, 0.0};
    const PureState psi = encode_ideal(spec);
    const RecoveryMap map = variant == RecoveryVariant::ideal ? RecoveryMap::ideal(gamma) : RecoveryMap::approximate();
    const QecOutcome o = qec_cycle(DensityMatrix::from_pure(psi), {gamma, p}, map, psi);
    b.f_qec = std::clamp(o.fidelity, 0.0, 1.0);
    b.p_success = o.success_probability;
  }
  b.f_bare = 1.0 - gamma;

  const double fq = f_star(b.f_qec, e_meas), fb = f_star(b.f_bare, e_meas);
  b.sigma_qec = sigma_binomial(fq);
  b.sigma_bare = sigma_binomial(fb);
  b.sigma_qec_raw = sigma_binomial(f_star(b.p_success * b.f_qec, e_meas));

  const bool q0 = fq * (1.0 - fq) <= kDegenerate, b0 = fb * (1.0 - fb) <= kDegenerate;
  if (q0) {
    // sigma_bare / sigma_qec diverges as gamma -> 0 for every theta.
    b.gain = {kInf, GainStatus::limit};
  } else if (b0) {
    b.gain = {0.0, GainStatus::limit};
  } else {
    b.gain = {fq * b.sigma_bare / (fb * b.sigma_qec) * std::sqrt(b.p_success), GainStatus::ok};
  }
  return b;
}

// ---- surface ------------------------------------------------------------

const GainCell& GainSurface::at(std::size_t i, std::size_t j, std::size_t k) const {
  return cells.at((i * e_meas.size() + j) * delay_us.size() + k);
}

std::vector<std::string> GainSurface::monotonicity_violations() const {
  std::vector<std::string> out;
  char buf[200];
  for (std::size_t i = 0; i < t1_us.size(); ++i)
    for (std::size_t k = 0; k < delay_us.size(); ++k)
      for (std::size_t j = 0; j + 1 < e_meas.size(); ++j) {
        const double a = at(i, j, k).result.gain.value, b = at(i, j + 1, k).result.gain.value;
        if (b > a) {
          std::snprintf(buf, sizeof buf, "T1=%g delay=%g: gain %.10g at E=%g rises to %.10g at E=%g", t1_us[i],
                        delay_us[k], a, e_meas[j], b, e_meas[j + 1]);
          out.emplace_back(buf);
        }
      }
  return out;
}

std::vector<std::string> GainSurface::zero_error_dominance_violations() const {
  std::vector<std::string> out;
  const auto z = std::find(e_meas.begin(), e_meas.end(), 0.0);
  if (z == e_meas.end()) return out;
  const auto j0 = static_cast<std::size_t>(z - e_meas.begin());
  char buf[200];
  for (std::size_t i = 0; i < t1_us.size(); ++i)
    for (std::size_t k = 0; k < delay_us.size(); ++k)
      for (std::size_t j = 0; j < e_meas.size(); ++j) {
        const double g0 = at(i, j0, k).result.gain.value, g = at(i, j, k).result.gain.value;
        if (g > g0) {
          std::snprintf(buf, sizeof buf, "T1=%g delay=%g E=%g: gain %.10g exceeds E=0 gain %.10g", t1_us[i],
                        delay_us[k], e_meas[j], g, g0);
          out.emplace_back(buf);
        }
      }
  return out;
}

GainSurface gain_surface(const GainSurfaceOptions& o) {
  if (o.t1_us.empty() || o.e_meas.empty() || o.delay_us.empty()) throw InvalidArgument("gain_surface: empty range");
  for (double t : o.t1_us)
    if (!(t > 0.0)) throw InvalidArgument("gain_surface: T1 values must be positive");
  for (double d : o.delay_us)
    if (!(d >= 0.0)) throw InvalidArgument("gain_surface: delays must be non-negative");

  GainSurface s{o.t1_us, o.e_meas, o.delay_us, {}};
  const std::size_t ne = o.e_meas.size(), nd = o.delay_us.size();
  const std::size_t n = o.t1_us.size() * ne * nd;
  s.cells.resize(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n); ++c) {
    const auto idx = static_cast<std::size_t>(c);
    const std::size_t i = idx / (ne * nd), j = (idx / nd) % ne, k = idx % nd;
    try {
      const QubitNoise q{o.t1_us[i], 2.0 * o.t1_us[i]};
      const double gamma = gamma_of_t(o.delay_us[k], q.t1_us);
      const double p = p_of_t(o.delay_us[k], q.tphi_us());
      s.cells[idx] = {o.t1_us[i], o.e_meas[j], o.delay_us[k], gain_theoretical(o.theta, gamma, p, o.e_meas[j], o.variant, o.model)};
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return s;
}

void write_gain_surface_csv(std::ostream& out, const GainSurface& s) {
  out << "T1_us,E_meas,delay_us,gain,F_qec,F_bare,p_success,sigma_qec,sigma_qec_raw,sigma_bare,status\n";
  char buf[400];
  for (const auto& c : s.cells) {
    const auto& r = c.result;
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%s\n", c.t1_us, c.e_meas,
                  c.delay_us, r.gain.value, r.f_qec, r.f_bare, r.p_success, r.sigma_qec, r.sigma_qec_raw, r.sigma_bare,
                  gain_status_name(r.gain.status));
    out << buf;
  }
}

}  // namespace nadqec
