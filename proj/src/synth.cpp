#include "nadqec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "nadqec/kernels.hpp"

namespace nadqec {
namespace {

constexpr double kPi = std::numbers::pi;

/// m <- (single-qubit g on q) m, for an n-qubit register.
void apply_1q(Matrix& m, const Matrix& g, int q, int n) {
  const auto b = static_cast<Eigen::Index>(bit_of(q, n));
  const Complex g00 = g(0, 0), g01 = g(0, 1), g10 = g(1, 0), g11 = g(1, 1);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i & b) continue;
    const Eigen::Index j = i | b;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex a0 = m(i, c), a1 = m(j, c);
      m(i, c) = g00 * a0 + g01 * a1;
      m(j, c) = g10 * a0 + g11 * a1;
    }
  }
}

void apply_cz(Matrix& m, int a, int b, int n) {
  const auto mask = static_cast<Eigen::Index>(bit_of(a, n) | bit_of(b, n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((i & mask) == mask) m.row(i) *= -1.0;
  }
}

Vector canonical_phase(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-10) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return v;
    }
  }
  return v;
}

/// Orthonormal basis of range(proj) built by Gram-Schmidt over proj * e_j.
std::vector<Vector> canonical_basis(const Matrix& proj, int rank) {
  std::vector<Vector> out;
  for (Eigen::Index j = 0; j < proj.cols() && static_cast<int>(out.size()) < rank; ++j) {
    Vector v = proj.col(j);
    for (const Vector& b : out) v -= b.dot(v) * b;
    if (v.norm() > 1e-8) out.push_back(canonical_phase(v.normalized()));
  }
  if (static_cast<int>(out.size()) != rank) throw NumericalError("svd_split: could not rebuild a singular subspace");
  return out;
}

}  // namespace

// ------------------------------------------------------------- connectivity

bool Connectivity::connected(int a, int b) const {
  return std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
    return (e.first == a && e.second == b) || (e.first == b && e.second == a);
  });
}

Connectivity Connectivity::line(int n) {
  Connectivity c{n, {}};
  for (int q = 0; q + 1 < n; ++q) c.edges.emplace_back(q, q + 1);
  return c;
}

Connectivity Connectivity::recovery_register() {
  return Connectivity{5, {{0, 1}, {1, 2}, {3, 0}, {3, 1}, {3, 2}, {4, 0}, {4, 1}}};
}

bool NativeGateSet::allows(const Gate& g) const {
  switch (g.kind) {
    case GateKind::rx:
    case GateKind::rz:
    case GateKind::sx:
    case GateKind::x:
    case GateKind::id:
    case GateKind::delay:
      return true;
    case GateKind::cz:
    case GateKind::rzz:
      return connectivity.connected(g.qubits[0], g.qubits[1]);
    default:
      return false;
  }
}

bool NativeGateSet::allows(const Circuit& c) const {
  return std::all_of(c.gates().begin(), c.gates().end(), [&](const Gate& g) { return allows(g); });
}

// ------------------------------------------------------------------- ansatz

Ansatz::Ansatz(int n_qubits, std::string name) : n_(n_qubits), name_(std::move(name)) {
  if (n_qubits < 1) throw InvalidArgument("ansatz needs at least one qubit");
}

void Ansatz::add_fixed(GateKind kind, std::vector<int> qubits, double angle) {
  slots_.push_back(Slot{kind, std::move(qubits), -1, angle});
}

void Ansatz::add_param(GateKind kind, std::vector<int> qubits) {
  slots_.push_back(Slot{kind, std::move(qubits), n_params_++, 0.0});
}

Ansatz Ansatz::hardware_efficient(const Connectivity& conn, int layers) {
  if (layers < 0) throw InvalidArgument("layer count must be non-negative");
  Ansatz a(conn.qubits, "hardware_efficient_" + std::to_string(layers));
  auto rotations = [&] {
    for (int q = 0; q < conn.qubits; ++q) {
      a.add_param(GateKind::rz, {q});
      a.add_param(GateKind::rx, {q});
      a.add_param(GateKind::rz, {q});
    }
  };
  for (int l = 0; l < layers; ++l) {
    rotations();
    for (const auto& [x, y] : conn.edges) a.add_fixed(GateKind::cz, {x, y});
  }
  rotations();
  return a;
}

Ansatz Ansatz::margolus() {
  Ansatz a(3, "margolus_5cz");
  auto euler = [&](int q) {
    a.add_param(GateKind::rz, {q});
    a.add_param(GateKind::rx, {q});
    a.add_param(GateKind::rz, {q});
  };
  euler(0);
  euler(1);
  euler(2);
  for (int k = 0; k < 5; ++k) {
    a.add_fixed(GateKind::cz, {k % 2 == 0 ? 1 : 0, 2});
    euler(2);
  }
  euler(0);
  euler(1);
  return a;
}

Circuit Ansatz::build(std::span<const double> params) const {
  if (static_cast<int>(params.size()) != n_params_) throw InvalidArgument("parameter count does not match ansatz");
  Circuit c(n_);
  for (const Slot& s : slots_) c.add(s.kind, s.qubits, s.param >= 0 ? params[static_cast<std::size_t>(s.param)] : s.fixed);
  return c;
}

Matrix Ansatz::apply_to_columns(std::span<const double> params, std::span<const int> columns) const {
  if (static_cast<int>(params.size()) != n_params_) throw InvalidArgument("parameter count does not match ansatz");
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Matrix m = Matrix::Zero(dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) m(columns[k], static_cast<Eigen::Index>(k)) = 1.0;
  for (const Slot& s : slots_) {
    const double angle = s.param >= 0 ? params[static_cast<std::size_t>(s.param)] : s.fixed;
    if (s.kind == GateKind::cz) {
      apply_cz(m, s.qubits[0], s.qubits[1], n_);
    } else if (s.qubits.size() == 1) {
      apply_1q(m, Gate{s.kind, s.qubits, angle}.matrix(), s.qubits[0], n_);
    } else {
      kernels::apply_rows_serial(m, Gate{s.kind, s.qubits, angle}.matrix(), s.qubits, n_);
    }
  }
  return m;
}

// --------------------------------------------------------------------- cost

void SynthesisProblem::validate() const {
  const Eigen::Index dim = Eigen::Index{1} << ansatz.qubit_count();
  if (target.rows() != dim || target.cols() != dim) throw InvalidArgument("synthesis target does not match ansatz size");
  for (int c : mask.columns) {
    if (c < 0 || c >= dim) throw InvalidArgument("mask column out of range");
  }
  for (const auto& [i, j] : mask.entries) {
    if (i < 0 || i >= dim || j < 0 || j >= dim) throw InvalidArgument("mask entry out of range");
  }
}

double cost(const SynthesisProblem& problem, std::span<const double> params) {
  const Eigen::Index dim = problem.target.rows();
  std::vector<int> cols;
  if (problem.mask.kind == Mask::Kind::full) {
    for (int c = 0; c < dim; ++c) cols.push_back(c);
  } else if (problem.mask.kind == Mask::Kind::columns) {
    cols = problem.mask.columns;
  } else {
    std::set<int> s;
    for (const auto& e : problem.mask.entries) s.insert(e.second);
    cols.assign(s.begin(), s.end());
  }
  const Matrix u = problem.ansatz.apply_to_columns(params, cols);

  // Masked entries as (target, actual) pairs.
  Complex overlap{0.0, 0.0};
  double norm_t = 0.0, norm_u = 0.0, direct = 0.0;
  auto accumulate = [&](Complex t, Complex a) {
    overlap += std::conj(t) * a;
    norm_t += std::norm(t);
    norm_u += std::norm(a);
    direct += std::norm(t - a);
  };
  if (problem.mask.kind == Mask::Kind::entries) {
    for (const auto& [i, j] : problem.mask.entries) {
      const auto k = static_cast<Eigen::Index>(std::lower_bound(cols.begin(), cols.end(), j) - cols.begin());
      accumulate(problem.target(i, j), u(i, k));
    }
  } else {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      for (Eigen::Index i = 0; i < dim; ++i) accumulate(problem.target(i, cols[k]), u(i, static_cast<Eigen::Index>(k)));
    }
  }
  if (problem.phase_aligned) return std::max(0.0, norm_t + norm_u - 2.0 * std::abs(overlap));
  return direct;
}

SynthesisResult optimize(const SynthesisProblem& problem, std::uint64_t seed, const OptimizeOptions& options) {
  problem.validate();
  OptimizeOptions opt = options;
  opt.target_cost = problem.tolerance;
  const Objective f = [&problem](std::span<const double> x) { return cost(problem, x); };
  const OptimizeResult r = minimize(f, problem.ansatz.parameter_count(), seed, opt);
  SynthesisResult out;
  out.params = r.x;
  out.cost = r.cost;
  out.converged = r.converged;
  out.circuit = problem.ansatz.build(r.x);
  out.restarts_run = r.restarts_run;
  out.ansatz_name = problem.ansatz.name();
  return out;
}

SynthesisResult synthesize_growing(const Matrix& target, const Mask& mask, const Connectivity& conn, std::uint64_t seed,
                                   int min_layers, int max_layers, const OptimizeOptions& options) {
  SynthesisResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int layers = min_layers; layers <= max_layers; ++layers) {
    SynthesisProblem p{target, mask, Ansatz::hardware_efficient(conn, layers)};
    SynthesisResult r = optimize(p, seed + static_cast<std::uint64_t>(layers), options);
    if (r.cost < best.cost) best = std::move(r);
    if (best.converged) break;
  }
  return best;
}

// ---------------------------------------------------------------------- SVD

Matrix SvdSplit::d_matrix() const { return d.cast<Complex>().asDiagonal(); }

SvdSplit svd_split(const Matrix& r) {
  if (r.rows() != r.cols()) throw InvalidArgument("svd_split expects a square operator");
  const Eigen::Index n = r.rows();
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Matrix& u0 = svd.matrixU();
  const Matrix& v0 = svd.matrixV();
  const double scale = std::max(1.0, sv.size() ? sv[0] : 0.0);
  const double zero = 1e-12 * scale;

  SvdSplit out{Matrix::Zero(n, n), Eigen::VectorXd::Zero(n), Matrix::Zero(n, n)};
  Eigen::Index k = 0;
  while (k < n) {
    Eigen::Index e = k + 1;
    while (e < n && std::abs(sv[e] - sv[k]) <= 1e-10 * scale) ++e;
    const Eigen::Index width = e - k;
    if (sv[k] > zero) {
      const Matrix block = u0.middleCols(k, width);
      const auto basis = canonical_basis(block * block.adjoint(), static_cast<int>(width));
      for (Eigen::Index c = 0; c < width; ++c) {
        const Vector& uc = basis[static_cast<std::size_t>(c)];
        out.u.col(k + c) = uc;
        out.v.col(k + c) = r.adjoint() * uc / sv[k + c];
        out.d[k + c] = sv[k + c];
      }
    } else {
      // Everything from here on is null space; gauge U and V independently.
      const Eigen::Index rest = n - k;
      const Matrix ub = u0.rightCols(rest), vb = v0.rightCols(rest);
      const auto bu = canonical_basis(ub * ub.adjoint(), static_cast<int>(rest));
      const auto bv = canonical_basis(vb * vb.adjoint(), static_cast<int>(rest));
      for (Eigen::Index c = 0; c < rest; ++c) {
        out.u.col(k + c) = bu[static_cast<std::size_t>(c)];
        out.v.col(k + c) = bv[static_cast<std::size_t>(c)];
      }
      break;
    }
    k = e;
  }
  return out;
}

Matrix x_all(int n_qubits) {
  Matrix m = Operator::pauli_x().matrix();
  for (int q = 1; q < n_qubits; ++q) m = kron(m, Operator::pauli_x().matrix());
  return m;
}

Matrix recovery_u_target() {
  Matrix t = Matrix::Zero(8, 8);
  t.col(0) = codeword(1).amplitudes();
  t.col(1) = codeword(0).amplitudes();
  return t;
}

Matrix encoder_target() {
  Matrix t = Matrix::Zero(8, 8);
  t.col(0) = codeword(0).amplitudes();
  t.col(4) = codeword(1).amplitudes();
  return t;
}

SynthesisProblem margolus_problem() {
  Matrix t = Matrix::Zero(8, 8);
  t(0, 0) = 1.0;
  std::vector<std::pair<int, int>> entries;
  for (int i : {0, 2, 4, 6})
    for (int j : {0, 2, 4, 6}) entries.emplace_back(i, j);
  return SynthesisProblem{t, Mask::of_entries(std::move(entries)), Ansatz::margolus()};
}

// ---------------------------------------------------------- block encoding

Circuit block_encode_diagonal(const Eigen::VectorXd& d, BlockMode mode, const Circuit* margolus, std::uint64_t seed) {
  const int n = qubit_count_for_dim(d.size());
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (!(d[k] >= -tol::structural && d[k] <= 1.0 + tol::structural)) throw InvalidArgument("diagonal entry outside [0, 1]");
  }
  const int anc = n;
  Circuit c(n + 1);

  if (mode == BlockMode::exact) {
    c.ry(anc, kPi);
    std::vector<int> qubits;
    for (int q = 0; q < n; ++q) qubits.push_back(q);
    qubits.push_back(anc);
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      const double dk = std::clamp(d[k], 0.0, 1.0);
      if (dk <= tol::structural) continue;
      std::vector<int> zeros;
      for (int q = 0; q < n; ++q) {
        if (!(static_cast<std::uint64_t>(k) & bit_of(q, n))) zeros.push_back(q);
      }
      for (int q : zeros) c.x(q);
      c.add(GateKind::mcry, qubits, 2.0 * std::acos(dk) - kPi);
      for (int q : zeros) c.x(q);
    }
    return c;
  }

  // approx: support must be {x : x_a = va, x_b = vb}.
  std::vector<std::uint64_t> support;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d[k] >= 0.5) support.push_back(static_cast<std::uint64_t>(k));
  }
  std::vector<int> fixed;
  for (int q = 0; q < n && !support.empty(); ++q) {
    const auto b = bit_of(q, n);
    const bool v = support.front() & b;
    if (std::all_of(support.begin(), support.end(), [&](std::uint64_t s) { return static_cast<bool>(s & b) == v; })) fixed.push_back(q);
  }
  if (fixed.size() != 2 || support.size() != (std::size_t{1} << (n - 2))) {
    throw InvalidArgument("approx block encoding needs a support fixed on exactly two qubits");
  }

  Circuit synthesized(3);
  if (margolus == nullptr) {
    const SynthesisResult r = optimize(margolus_problem(), seed);
    if (!r.converged) throw NumericalError("Margolus block synthesis did not converge");
    synthesized = r.circuit;
    margolus = &synthesized;
  }
  std::vector<int> flipped;
  for (int q : fixed) {
    if (support.front() & bit_of(q, n)) flipped.push_back(q);
  }
  for (int q : flipped) c.x(q);
  const std::array<int, 3> map{fixed[0], fixed[1], anc};
  c.append(*margolus, map);
  for (int q : flipped) c.x(q);
  return c;
}

Circuit assemble_recovery_circuit(const Circuit& u, const Circuit& d_block) {
  if (u.qubit_count() != 3) throw InvalidArgument("U factor must act on three data qubits");
  if (d_block.qubit_count() != 4) throw InvalidArgument("D block must act on [d0, d1, d2, rec]");
  const int syn = 3, rec = 4;
  const std::array<int, 3> data{0, 1, 2};
  const std::array<int, 4> dmap{0, 1, 2, rec};
  Circuit c(5);
  // syn = 0 selects R1 = U D X_2 U† X^3, syn = 1 selects R0 = U D U†.
  c.x(syn).cnot(syn, 0).cnot(syn, 1).cnot(syn, 2);
  c.append(u.inverse(), data);
  c.cnot(syn, 2).x(syn);
  c.append(d_block, dmap);
  c.append(u, data);
  return c;
}

RecoveryReport verify_recovery_circuit(const Circuit& circ, const RecoveryMap& map, double tolerance,
                                       const GateDurations& durations) {
  if (circ.qubit_count() != 5) throw InvalidArgument("recovery circuit must act on [d0, d1, d2, syn, rec]");
  const Matrix w = circ.unitary();
  auto block = [&](int s_out, int s_in) {
    Matrix b(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) b(i, j) = w((i << 2) | (s_out << 1), (j << 2) | (s_in << 1));
    return b;
  };
  const Matrix b11 = block(1, 1), b00 = block(0, 0);
  const Complex overlap = (map.r0.adjoint() * b11).trace() + (map.r1.adjoint() * b00).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};

  RecoveryReport rep;
  rep.syndrome_leakage = std::max(max_abs(block(0, 1)), max_abs(block(1, 0)));
  rep.max_deviation = std::max({max_abs(b11 / phase - map.r0), max_abs(b00 / phase - map.r1), rep.syndrome_leakage});
  rep.cz_count = circ.count(GateKind::cz);
  rep.duration_us = circ.duration(durations);
  rep.passed = rep.max_deviation < tolerance;
  return rep;
}

SynthesizedRecovery synthesize_approximate_recovery(std::uint64_t seed, const OptimizeOptions& options) {
  SynthesizedRecovery out;
  const Connectivity line = Connectivity::line(3);
  out.encoder = synthesize_growing(encoder_target(), Mask::of_columns({0, 4}), line, seed, 3, 8, options);
  out.u = synthesize_growing(recovery_u_target(), Mask::of_columns({0, 1}), line, seed + 101, 3, 8, options);
  out.margolus = optimize(margolus_problem(), seed + 202, options);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(8);
  d[0] = d[1] = 1.0;
  out.d_block = block_encode_diagonal(d, BlockMode::approx, &out.margolus.circuit);
  out.recovery = assemble_recovery_circuit(out.u.circuit, out.d_block);
  out.report = verify_recovery_circuit(out.recovery, RecoveryMap::approximate());
  return out;
}

std::string format_angle_pi(double radians) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6gπ", radians / kPi);
  return buf;
}

}  // namespace nadqec
