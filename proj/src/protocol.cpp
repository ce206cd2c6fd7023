#include "nadqec/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "nadqec/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nadqec {
namespace {

bool in_parallel() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

// Runs body(i) for i in [0, n) across threads and rethrows the first
// exception (lowest index) on the calling thread.
template <class F>
void parallel_points(std::size_t n, F&& body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double mean_data_t1(const NoiseParams& noise) {
  double s = 0.0;
  for (int q = 0; q < 3; ++q) s += noise.qubit(q).t1_us;
  return s / 3.0;
}

RecoveryMap map_for_round(const ProtocolConfig& c, double delay_us, double t1_us) {
  switch (c.variant) {
    case RecoveryVariant::ideal:
      return RecoveryMap::ideal(gamma_of_t(delay_us, t1_us));
    case RecoveryVariant::approximate:
      return RecoveryMap::approximate();
    case RecoveryVariant::synthesized:
      return RecoveryMap::synthesized(*c.recovery_circuit);
  }
  throw InvalidArgument("unknown recovery variant");
}

DensityMatrix idle_data(DensityMatrix rho, double dt_us, const NoiseParams& noise) {
  if (dt_us <= 0.0) return rho;
  for (int q = 0; q < 3; ++q) rho = apply_idle(rho, q, dt_us, noise.qubit(q));
  return rho;
}

GateNoise gate_noise_of(const ProtocolConfig& c, const NoiseParams& noise) {
  if (!c.gate_noise) return {};
  return {noise.depolarizing_1q, noise.depolarizing_2q};
}

double reset_shortfall_us(const Schedule& s, std::size_t round, const ProtocolTiming& t) {
  if (round == 0) return 0.0;
  return std::max(0.0, t.t_reset_us - to_us(s.delays_ps[round]));
}

}  // namespace

// ---- timing -------------------------------------------------------------

void ProtocolTiming::validate() const {
  if (!(t_encode_us > 0.0) || !(t_recovery_us > 0.0) || !(t_reset_us > 0.0))
    throw InvalidArgument("timing entries must be positive");
}

std::int64_t to_ps(double us) {
  if (!std::isfinite(us)) throw InvalidArgument("time must be finite");
  return std::llround(us * 1e6);
}

double to_us(std::int64_t ps) { return static_cast<double>(ps) / 1e6; }

std::vector<double> Schedule::delays_us() const {
  std::vector<double> out;
  out.reserve(delays_ps.size());
  for (auto d : delays_ps) out.push_back(to_us(d));
  return out;
}

double Schedule::total_free_us() const {
  std::int64_t s = 0;
  for (auto d : delays_ps) s += d;
  return to_us(s);
}

Schedule schedule_rounds(double total_free_us, double max_delay_us) {
  if (!(total_free_us >= 0.0)) throw InvalidArgument("schedule_rounds: total free time must be non-negative");
  if (!(max_delay_us > 0.0)) throw InvalidArgument("schedule_rounds: max delay must be positive");
  const std::int64_t total = to_ps(total_free_us), step = to_ps(max_delay_us);
  if (step <= 0) throw InvalidArgument("schedule_rounds: max delay below one picosecond");
  Schedule s;
  s.delays_ps.assign(static_cast<std::size_t>(total / step), step);
  if (total % step != 0) s.delays_ps.push_back(total % step);
  return s;
}

double total_evolution_time(const Schedule& schedule, const ProtocolTiming& timing) {
  timing.validate();
  const std::int64_t enc = to_ps(timing.t_encode_us), rec = to_ps(timing.t_recovery_us), reset = to_ps(timing.t_reset_us);
  std::int64_t t = 2 * enc;
  for (std::size_t i = 0; i < schedule.delays_ps.size(); ++i) {
    const std::int64_t d = schedule.delays_ps[i];
    t += d + rec;
    if (i > 0 && d < reset) t += reset - d;
  }
  return to_us(t);
}

// ---- multi-round QEC ----------------------------------------------------

void ProtocolConfig::validate() const {
  logical.validate();
  timing.validate();
  if (!(max_delay_us > 0.0)) throw InvalidArgument("max_delay_us must be positive");
  for (double t : total_free_us)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("total_free_us entries must be finite and non-negative");
  if (variant == RecoveryVariant::synthesized) {
    if (!recovery_circuit) throw InvalidArgument("synthesized variant requires recovery_circuit");
    if (recovery_circuit->qubit_count() != 5) throw InvalidArgument("recovery_circuit must act on 5 qubits");
  }
  if (chadd_options.spectators < 0) throw InvalidArgument("spectators must be non-negative");
  if (chadd_options.tau_us && !(*chadd_options.tau_us > 0.0)) throw InvalidArgument("chadd tau must be positive");
  if (!(chadd_options.steps_per_tau >= 1.0)) throw InvalidArgument("steps_per_tau must be at least 1");
}

double decoded_all_zero_probability(const DensityMatrix& data, const LogicalStateSpec& logical) {
  if (data.qubit_count() != 3) throw InvalidArgument("decoded_all_zero_probability: expects the 3 data qubits");
  const Matrix g = logical_prep(logical);
  const Matrix inv = kron(g.adjoint(), Matrix::Identity(4, 4)) * encoder_unitary().adjoint();
  const std::array<int, 3> all{0, 1, 2};
  const DensityMatrix decoded = apply_unitary(data, inv, all);
  return measure_computational(decoded, all).probability(0);
}

std::vector<MultiQecPoint> run_multiqec(const ProtocolConfig& config, const NoiseParams& noise) {
  config.validate();
  noise.validate();
  const ChaddOptions& co = config.chadd_options;
  if (config.chadd || co.spectators > 0 || !co.couplings.empty()) return run_multiqec_with_chadd(config, noise);

  const PureState target = encode_ideal(config.logical);
  const double t1 = mean_data_t1(noise);
  const GateNoise gn = gate_noise_of(config, noise);
  const auto& tm = config.timing;
  std::vector<MultiQecPoint> out(config.total_free_us.size());

  parallel_points(out.size(), [&](std::size_t i) {
    const Schedule s = schedule_rounds(config.total_free_us[i], config.max_delay_us);
    DensityMatrix rho = DensityMatrix::from_pure(target);
    if (config.decohere_during_gates) rho = idle_data(rho, tm.t_encode_us, noise);
    double ps = 1.0;
    for (std::size_t r = 0; r < s.rounds(); ++r) {
      const double delay = to_us(s.delays_ps[r]);
      if (config.decohere_during_gates) rho = idle_data(rho, reset_shortfall_us(s, r, tm), noise);
      rho = idle_data(rho, delay, noise);
      const DensityMatrix branch = correct(rho, map_for_round(config, delay, t1), gn);
      ps *= branch.trace();
      rho = branch.normalized();
      if (config.decohere_during_gates) rho = idle_data(rho, tm.t_recovery_us, noise);
    }
    if (config.decohere_during_gates) rho = idle_data(rho, tm.t_encode_us, noise);

    MultiQecPoint& p = out[i];
    p.total_free_us = config.total_free_us[i];
    p.total_evolution_us = total_evolution_time(s, tm);
    p.fidelity = fidelity(rho, target);
    p.success_probability = ps;
    p.rounds = static_cast<int>(s.rounds());
    p.variant = config.variant;
    p.chadd = false;
  });
  return out;
}

std::vector<MultiQecPoint> run_multiqec_with_chadd(const ProtocolConfig& config, const NoiseParams& noise) {
  config.validate();
  noise.validate();
  const ChaddOptions& co = config.chadd_options;
  const int n = 3 + co.spectators;
  if (n + 2 > co.max_qubits) {
    throw InvalidArgument("register of " + std::to_string(n + 2) + " qubits exceeds the cap of " +
                          std::to_string(co.max_qubits));
  }

  ZzLindbladModel model;
  model.qubits = n;
  model.omegas = co.omegas.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0) : co.omegas;
  model.couplings = co.couplings;
  for (int q = 0; q < n; ++q) {
    model.t1_us.push_back(noise.qubit(q).t1_us);
    model.tphi_us.push_back(noise.qubit(q).tphi_us());
  }
  model.validate();

  std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}};
  for (const auto& c : co.couplings) edges.push_back(c.first);
  const std::vector<int> colors = two_color(n, edges);

  DensityMatrix init = DensityMatrix::from_pure(encode_ideal(config.logical));
  const Matrix plus = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  for (int s = 0; s < co.spectators; ++s) init = tensor(init, DensityMatrix(plus));

  const PureState target = encode_ideal(config.logical);
  const double t1 = mean_data_t1(noise);
  const GateNoise gn = gate_noise_of(config, noise);
  const std::array<int, 3> data{0, 1, 2};
  std::vector<MultiQecPoint> out(config.total_free_us.size());

  parallel_points(out.size(), [&](std::size_t i) {
    const Schedule s = schedule_rounds(config.total_free_us[i], config.max_delay_us);
    DensityMatrix rho = init;
    double ps = 1.0;
    for (std::size_t r = 0; r < s.rounds(); ++r) {
      const double delay = to_us(s.delays_ps[r]);
      const int cycle_len = co.robust ? 8 : 4;
      int cycles = 1;
      if (co.tau_us) cycles = std::max<int>(1, static_cast<int>(std::llround(delay / (cycle_len * *co.tau_us))));
      const double tau = delay / (cycle_len * cycles);
      const double dt = tau / co.steps_per_tau;
      Matrix m;
      if (config.chadd) {
        m = evolve_with_chadd(model, rho.matrix(), chadd_sequence(2, tau, co.robust), cycles, colors, dt,
                              co.convergence_check);
      } else if (co.convergence_check) {
        m = rk4_evolve_checked(model, rho.matrix(), delay, {dt});
      } else {
        m = rk4_evolve(model, rho.matrix(), delay, dt);
      }
      rho = DensityMatrix(std::move(m));
      const DensityMatrix branch = correct(rho, map_for_round(config, delay, t1), gn);
      ps *= branch.trace();
      rho = branch.normalized();
    }
    MultiQecPoint& p = out[i];
    p.total_free_us = config.total_free_us[i];
    p.total_evolution_us = total_evolution_time(s, config.timing);
    p.fidelity = fidelity(partial_trace(rho, data), target);
    p.success_probability = ps;
    p.rounds = static_cast<int>(s.rounds());
    p.variant = config.variant;
    p.chadd = config.chadd;
  });
  return out;
}

void write_multiqec_csv(std::ostream& out, std::span<const MultiQecPoint> points) {
  out << "total_evolution_us,fidelity,success_probability,rounds,variant,chadd\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%d,%s,%d\n", p.total_evolution_us, p.fidelity,
                  p.success_probability, p.rounds, variant_name(p.variant), p.chadd ? 1 : 0);
    out << buf;
  }
}

LifetimeFit fit_exponential_lifetime(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size() || t.size() < 2) throw InvalidArgument("lifetime fit needs at least two matched points");
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(f[i] > 0.0)) throw InvalidArgument("lifetime fit needs positive fidelities");
    const double y = std::log(f[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double n = static_cast<double>(t.size());
  const double den = n * stt - st * st;
  if (den <= 0.0) throw InvalidArgument("lifetime fit needs distinct times");
  const double slope = (n * sty - st * sy) / den;
  const double icpt = (sy - slope * st) / n;
  LifetimeFit r;
  r.lifetime_us = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  r.amplitude = std::exp(icpt);
  return r;
}

// ---- CHaDD --------------------------------------------------------------

std::vector<int> ChaddSequence::toggling_signs(int color) const {
  std::vector<int> out;
  int sign = 1;
  for (const auto& p : pulses) {
    out.push_back(sign);
    if (p.color == color) sign = -sign;
  }
  return out;
}

ChaddSequence chadd_sequence(int chi, double tau_us, bool robust) {
  if (chi != 2) throw InvalidArgument("chadd_sequence: only chromaticity 2 is supported");
  if (!(tau_us >= 0.0)) throw InvalidArgument("chadd_sequence: tau must be non-negative");
  ChaddSequence s;
  s.chromaticity = chi;
  s.sign_matrix.resize(4, 4);
  s.sign_matrix << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  s.row_assignment = {3, 2};
  s.tau_us = tau_us;
  s.robust = robust;
  const PulseKind x = PulseKind::x, xt = PulseKind::x_tilde;
  if (robust) {
    s.pulses = {{x, 0}, {x, 1}, {xt, 0}, {xt, 1}, {xt, 0}, {xt, 1}, {x, 0}, {x, 1}};
  } else {
    s.pulses = {{x, 0}, {x, 1}, {x, 0}, {x, 1}};
  }
  return s;
}

Matrix pulse_matrix(PulseKind kind) {
  Matrix m = Matrix::Zero(2, 2);
  if (kind == PulseKind::x) {
    m(0, 1) = m(1, 0) = 1.0;
  } else {  // RX(-pi) = i X
    m(0, 1) = m(1, 0) = Complex(0.0, 1.0);
  }
  return m;
}

std::vector<int> two_color(int n, std::span<const std::pair<int, int>> edges) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw InvalidArgument("two_color: bad edge");
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<int> color(static_cast<std::size_t>(n), -1);
  for (int s = 0; s < n; ++s) {
    if (color[static_cast<std::size_t>(s)] != -1) continue;
    color[static_cast<std::size_t>(s)] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        int& cv = color[static_cast<std::size_t>(v)];
        if (cv == -1) {
          cv = 1 - color[static_cast<std::size_t>(u)];
          q.push(v);
        } else if (cv == color[static_cast<std::size_t>(u)]) {
          throw InvalidArgument("two_color: coupling graph is not bipartite");
        }
      }
    }
  }
  return color;
}

// ---- Lindblad -----------------------------------------------------------

void ZzLindbladModel::validate() const {
  if (qubits < 1 || qubits > 12) throw InvalidArgument("ZzLindbladModel: qubit count out of range");
  const auto n = static_cast<std::size_t>(qubits);
  if (omegas.size() != n || t1_us.size() != n || tphi_us.size() != n)
    throw InvalidArgument("ZzLindbladModel: per-qubit vectors must match the qubit count");
  for (std::size_t q = 0; q < n; ++q)
    if (!(t1_us[q] > 0.0) || !(tphi_us[q] > 0.0)) throw InvalidArgument("ZzLindbladModel: T1 and Tphi must be positive");
  for (const auto& c : couplings) {
    const auto [a, b] = c.first;
    if (a < 0 || b < 0 || a >= qubits || b >= qubits || a == b) throw InvalidArgument("ZzLindbladModel: bad coupling");
  }
}

Eigen::VectorXd ZzLindbladModel::energies() const {
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    auto z = [&](int q) { return (static_cast<std::uint64_t>(j) & bit_of(q, qubits)) ? -1.0 : 1.0; };
    double v = 0.0;
    for (int q = 0; q < qubits; ++q) v += 0.5 * omegas[static_cast<std::size_t>(q)] * z(q);
    for (const auto& c : couplings) v += c.second * z(c.first.first) * z(c.first.second);
    e[j] = v;
  }
  return e;
}

namespace kernels {
namespace {

struct Rates {
  std::vector<double> relax;    // 1/T1
  std::vector<double> dephase;  // 1/Tphi
  std::vector<std::uint64_t> bits;
  std::vector<double> half_decay;  // per basis index: sum of relax over excited qubits / 2
};

Rates rates_of(const ZzLindbladModel& m) {
  Rates r;
  const int n = m.qubits;
  for (int q = 0; q < n; ++q) {
    r.relax.push_back(std::isinf(m.t1_us[static_cast<std::size_t>(q)]) ? 0.0 : 1.0 / m.t1_us[static_cast<std::size_t>(q)]);
    r.dephase.push_back(std::isinf(m.tphi_us[static_cast<std::size_t>(q)]) ? 0.0
                                                                           : 1.0 / m.tphi_us[static_cast<std::size_t>(q)]);
    r.bits.push_back(bit_of(q, n));
  }
  const std::size_t dim = std::size_t{1} << n;
  r.half_decay.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j)
    for (int q = 0; q < n; ++q)
      if (j & r.bits[static_cast<std::size_t>(q)]) r.half_decay[j] += 0.5 * r.relax[static_cast<std::size_t>(q)];
  return r;
}

inline void rhs_column(const Rates& r, int n, const Eigen::VectorXd& e, const Matrix& rho, Matrix& out, Eigen::Index k) {
  const Eigen::Index dim = rho.rows();
  const auto uk = static_cast<std::uint64_t>(k);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto uj = static_cast<std::uint64_t>(j);
    const Complex x = rho(j, k);
    double damp = r.half_decay[static_cast<std::size_t>(j)] + r.half_decay[static_cast<std::size_t>(k)];
    Complex acc = Complex(0.0, -(e[j] - e[k])) * x;
    for (int q = 0; q < n; ++q) {
      const std::uint64_t b = r.bits[static_cast<std::size_t>(q)];
      if (((uj ^ uk) & b) != 0) damp += r.dephase[static_cast<std::size_t>(q)];
      if (((uj | uk) & b) == 0 && r.relax[static_cast<std::size_t>(q)] != 0.0)
        acc += r.relax[static_cast<std::size_t>(q)] * rho(static_cast<Eigen::Index>(uj | b), static_cast<Eigen::Index>(uk | b));
    }
    out(j, k) = acc - damp * x;
  }
}

}  // namespace

void lindblad_rhs_serial(const ZzLindbladModel& m, const Eigen::VectorXd& e, const Matrix& rho, Matrix& out) {
  const Rates r = rates_of(m);
  out.resize(rho.rows(), rho.cols());
  for (Eigen::Index k = 0; k < rho.cols(); ++k) rhs_column(r, m.qubits, e, rho, out, k);
}

void lindblad_rhs_parallel(const ZzLindbladModel& m, const Eigen::VectorXd& e, const Matrix& rho, Matrix& out) {
  const Rates r = rates_of(m);
  out.resize(rho.rows(), rho.cols());
  const Eigen::Index cols = rho.cols();
  const bool fork = cols >= parallel_dim_threshold && !in_parallel();
#pragma omp parallel for schedule(static) if (fork)
  for (Eigen::Index k = 0; k < cols; ++k) rhs_column(r, m.qubits, e, rho, out, k);
}

}  // namespace kernels

Matrix rk4_evolve(const ZzLindbladModel& m, Matrix rho, double t_us, double dt_us, bool parallel) {
  if (!(t_us >= 0.0)) throw InvalidArgument("rk4_evolve: negative time");
  if (!(dt_us > 0.0)) throw InvalidArgument("rk4_evolve: step must be positive");
  if (t_us == 0.0) return rho;
  const auto steps = static_cast<long>(std::ceil(t_us / dt_us - 1e-9));
  const double h = t_us / static_cast<double>(std::max(1L, steps));
  const Eigen::VectorXd e = m.energies();
  auto f = [&](const Matrix& x, Matrix& y) {
    if (parallel)
      kernels::lindblad_rhs_parallel(m, e, x, y);
    else
      kernels::lindblad_rhs_serial(m, e, x, y);
  };
  Matrix k1, k2, k3, k4, tmp;
  for (long s = 0; s < std::max(1L, steps); ++s) {
    f(rho, k1);
    tmp = rho + (0.5 * h) * k1;
    f(tmp, k2);
    tmp = rho + (0.5 * h) * k2;
    f(tmp, k3);
    tmp = rho + h * k3;
    f(tmp, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

Matrix rk4_evolve_checked(const ZzLindbladModel& m, const Matrix& rho, double t_us, const EvolveCheck& check) {
  const Matrix coarse = rk4_evolve(m, rho, t_us, check.dt_us);
  Matrix fine = rk4_evolve(m, rho, t_us, 0.5 * check.dt_us);
  const double dev = max_abs(coarse - fine);
  const double drift = std::abs(fine.trace() - rho.trace());
  if (dev > check.tolerance || drift > 1e-9) {
    std::ostringstream os;
    os << "Lindblad integration did not converge: step " << check.dt_us << " us over " << t_us
       << " us, step-halving deviation " << dev << " (tolerance " << check.tolerance << "), trace drift " << drift;
    throw NumericalError(os.str());
  }
  return fine;
}

namespace {

void apply_pulse(Matrix& rho, PulseKind kind, int color, std::span<const int> colors, int n) {
  const Matrix p = pulse_matrix(kind);
  for (int q = 0; q < n; ++q) {
    if (colors[static_cast<std::size_t>(q)] != color) continue;
    const std::array<int, 1> t{q};
    rho = kernels::conjugate(rho, p, t, n);
  }
}

}  // namespace

Matrix evolve_with_chadd(const ZzLindbladModel& m, Matrix rho, const ChaddSequence& seq, int cycles,
                         std::span<const int> colors, double dt_us, bool check) {
  if (static_cast<int>(colors.size()) != m.qubits) throw InvalidArgument("evolve_with_chadd: one color per qubit");
  for (int c = 0; c < cycles; ++c) {
    for (const auto& pulse : seq.pulses) {
      rho = check ? rk4_evolve_checked(m, rho, seq.tau_us, {dt_us}) : rk4_evolve(m, rho, seq.tau_us, dt_us);
      apply_pulse(rho, pulse.kind, pulse.color, colors, m.qubits);
    }
  }
  return rho;
}

Matrix chadd_cycle_propagator(const ZzLindbladModel& m, const ChaddSequence& seq, std::span<const int> colors) {
  if (static_cast<int>(colors.size()) != m.qubits) throw InvalidArgument("chadd_cycle_propagator: one color per qubit");
  const Eigen::VectorXd e = m.energies();
  const Eigen::Index dim = e.size();
  Vector phase(dim);
  for (Eigen::Index j = 0; j < dim; ++j) phase[j] = std::exp(Complex(0.0, -e[j] * seq.tau_us));
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& pulse : seq.pulses) {
    u = phase.asDiagonal() * u;
    for (int q = 0; q < m.qubits; ++q) {
      if (colors[static_cast<std::size_t>(q)] != pulse.color) continue;
      const std::array<int, 1> t{q};
      kernels::apply_rows_parallel(u, pulse_matrix(pulse.kind), t, m.qubits);
    }
  }
  return u;
}

// ---- crosstalk toy ------------------------------------------------------

ZzLindbladModel CrosstalkModel::lindblad() const {
  validate();
  ZzLindbladModel m;
  m.qubits = 2;
  m.omegas = {omega1, omega2};
  m.couplings = {{{0, 1}, g}};
  m.t1_us = {t1_us, t1_us};
  m.tphi_us = {tphi_us, tphi_us};
  return m;
}

void CrosstalkModel::validate() const {
  if (!(t1_us > 0.0) || !(tphi_us > 0.0)) throw InvalidArgument("CrosstalkModel: T1 and Tphi must be positive");
  if (!(tau_us > 0.0)) throw InvalidArgument("CrosstalkModel: tau must be positive");
  if (!(steps_per_tau >= 1.0)) throw InvalidArgument("CrosstalkModel: steps_per_tau must be at least 1");
}

std::vector<CrosstalkSample> run_crosstalk_toy(const CrosstalkModel& model, ProbeState probe, bool chadd,
                                               double t_final_us, bool robust) {
  const ZzLindbladModel m = model.lindblad();
  const ChaddSequence seq = chadd_sequence(2, model.tau_us, robust);
  const double dt = model.tau_us / model.steps_per_tau;
  const int cycles = static_cast<int>(std::floor(t_final_us / seq.cycle_us() + 1e-9));
  if (cycles < 0) throw InvalidArgument("run_crosstalk_toy: negative final time");

  Vector psi = Vector::Zero(2);
  switch (probe) {
    case ProbeState::zero: psi[0] = 1.0; break;
    case ProbeState::one: psi[1] = 1.0; break;
    case ProbeState::plus: psi[0] = psi[1] = 1.0 / std::sqrt(2.0); break;
  }
  const PureState probe_state(psi);
  Vector full = Vector::Zero(4);
  full[0] = psi[0];
  full[2] = psi[1];
  Matrix rho = full * full.adjoint();
  const std::array<int, 2> colors{0, 1};
  const std::array<int, 1> keep{0};

  auto sample = [&](double t) {
    const DensityMatrix red = partial_trace(DensityMatrix(rho), keep);
    return CrosstalkSample{t, red.matrix()(1, 1).real(), fidelity(red, probe_state)};
  };
  std::vector<CrosstalkSample> out{sample(0.0)};
  for (int c = 0; c < cycles; ++c) {
    if (chadd)
      rho = evolve_with_chadd(m, rho, seq, 1, colors, dt, true);
    else
      rho = rk4_evolve_checked(m, rho, seq.cycle_us(), {dt});
    out.push_back(sample(seq.cycle_us() * (c + 1)));
  }
  return out;
}

}  // namespace nadqec
