#include "nadqec/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "nadqec/kernels.hpp"

namespace nadqec {
namespace {

constexpr std::pair<GateKind, const char*> kNames[] = {
    {GateKind::rx, "RX"},  {GateKind::ry, "RY"},   {GateKind::rz, "RZ"}, {GateKind::sx, "SX"},
    {GateKind::x, "X"},    {GateKind::cz, "CZ"},   {GateKind::rzz, "RZZ"}, {GateKind::id, "ID"},
    {GateKind::delay, "DELAY"}, {GateKind::mcry, "MCRY"},
};

bool has_angle(GateKind k) {
  return k == GateKind::rx || k == GateKind::ry || k == GateKind::rz || k == GateKind::rzz ||
         k == GateKind::delay || k == GateKind::mcry;
}

int expected_arity(GateKind k) {
  switch (k) {
    case GateKind::cz:
    case GateKind::rzz:
      return 2;
    case GateKind::mcry:
      return -1;
    default:
      return 1;
  }
}

Matrix ry_matrix(double a) {
  Matrix m(2, 2);
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  m << c, -s, s, c;
  return m;
}

}  // namespace

const char* gate_name(GateKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

bool is_two_qubit(GateKind kind) { return kind == GateKind::cz || kind == GateKind::rzz; }

Matrix Gate::matrix() const {
  const Complex i{0.0, 1.0};
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Matrix m;
  switch (kind) {
    case GateKind::rx:
      m.resize(2, 2);
      m << c, -i * s, -i * s, c;
      return m;
    case GateKind::ry:
      return ry_matrix(angle);
    case GateKind::rz:
      m = Matrix::Zero(2, 2);
      m(0, 0) = std::exp(-i * (angle / 2));
      m(1, 1) = std::exp(i * (angle / 2));
      return m;
    case GateKind::sx:
      m.resize(2, 2);
      m << Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5), Complex(0.5, 0.5);
      return m;
    case GateKind::x:
      return Operator::pauli_x().matrix();
    case GateKind::id:
    case GateKind::delay:
      return Matrix::Identity(2, 2);
    case GateKind::cz:
      m = Matrix::Identity(4, 4);
      m(3, 3) = -1.0;
      return m;
    case GateKind::rzz:
      m = Matrix::Zero(4, 4);
      for (int k = 0; k < 4; ++k) {
        const double parity = (k == 0 || k == 3) ? 1.0 : -1.0;
        m(k, k) = std::exp(-i * (parity * angle / 2));
      }
      return m;
    case GateKind::mcry: {
      const Eigen::Index dim = Eigen::Index{1} << qubits.size();
      m = Matrix::Identity(dim, dim);
      m.bottomRightCorner(2, 2) = ry_matrix(angle);
      return m;
    }
  }
  throw InvalidArgument("unknown gate kind");
}

Circuit::Circuit(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1) throw InvalidArgument("circuit needs at least one qubit");
}

Circuit& Circuit::add(GateKind kind, std::vector<int> qubits, double angle) {
  const int arity = expected_arity(kind);
  if (arity > 0 && static_cast<int>(qubits.size()) != arity) throw InvalidArgument(std::string("wrong qubit count for ") + gate_name(kind));
  if (kind == GateKind::mcry && qubits.size() < 2) throw InvalidArgument("MCRY needs at least one control");
  for (std::size_t a = 0; a < qubits.size(); ++a) {
    if (qubits[a] < 0 || qubits[a] >= n_) throw InvalidArgument("gate qubit out of range");
    for (std::size_t b = 0; b < a; ++b) {
      if (qubits[a] == qubits[b]) throw InvalidArgument("gate repeats a qubit");
    }
  }
  if (kind == GateKind::delay && angle < 0.0) throw InvalidArgument("negative delay");
  gates_.push_back(Gate{kind, std::move(qubits), has_angle(kind) ? angle : 0.0});
  return *this;
}

Circuit& Circuit::hadamard(int q) {
  constexpr double h = std::numbers::pi / 2;
  return rz(q, h).sx(q).rz(q, h);
}

Circuit& Circuit::cnot(int control, int target) { return hadamard(target).cz(control, target).hadamard(target); }

Circuit& Circuit::append(const Circuit& other, std::span<const int> mapping) {
  if (static_cast<int>(mapping.size()) != other.qubit_count()) throw InvalidArgument("append: mapping size mismatch");
  for (const Gate& g : other.gates()) {
    std::vector<int> qs;
    qs.reserve(g.qubits.size());
    for (int q : g.qubits) qs.push_back(mapping[static_cast<std::size_t>(q)]);
    add(g.kind, std::move(qs), g.angle);
  }
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  std::vector<int> identity(static_cast<std::size_t>(other.qubit_count()));
  for (int q = 0; q < other.qubit_count(); ++q) identity[static_cast<std::size_t>(q)] = q;
  return append(other, identity);
}

Matrix Circuit::unitary() const {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Matrix u = Matrix::Identity(dim, dim);
  for (const Gate& g : gates_) {
    if (g.kind == GateKind::id || g.kind == GateKind::delay) continue;
    kernels::apply_rows_parallel(u, g.matrix(), g.qubits, n_);
  }
  return u;
}

Circuit Circuit::inverse() const {
  Circuit inv(n_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
    switch (it->kind) {
      case GateKind::sx:
        inv.add(GateKind::rx, it->qubits, -std::numbers::pi / 2);
        break;
      case GateKind::rx:
      case GateKind::ry:
      case GateKind::rz:
      case GateKind::rzz:
      case GateKind::mcry:
        inv.add(it->kind, it->qubits, -it->angle);
        break;
      default:
        inv.add(it->kind, it->qubits, it->angle);
    }
  }
  return inv;
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [&](const Gate& g) { return g.kind == kind; }));
}

std::size_t Circuit::two_qubit_count() const {
  return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return is_two_qubit(g.kind); }));
}

double gate_duration(const Gate& g, const GateDurations& d) {
  switch (g.kind) {
    case GateKind::rz:
    case GateKind::id:
      return d.rz;
    case GateKind::rx:
    case GateKind::ry:
    case GateKind::sx:
    case GateKind::x:
      return d.single_qubit;
    case GateKind::cz:
    case GateKind::rzz:
      return d.two_qubit;
    case GateKind::delay:
      return g.angle;
    case GateKind::mcry:
      // Rough cost of a decomposed multi-controlled rotation.
      return 2.0 * static_cast<double>(g.qubits.size() - 1) * d.two_qubit;
  }
  return 0.0;
}

double Circuit::duration(const GateDurations& d) const {
  std::vector<int> depth(static_cast<std::size_t>(n_), 0);
  std::vector<double> layer_max;
  for (const Gate& g : gates_) {
    int layer = 0;
    for (int q : g.qubits) layer = std::max(layer, depth[static_cast<std::size_t>(q)]);
    for (int q : g.qubits) depth[static_cast<std::size_t>(q)] = layer + 1;
    if (static_cast<std::size_t>(layer) >= layer_max.size()) layer_max.resize(static_cast<std::size_t>(layer) + 1, 0.0);
    layer_max[static_cast<std::size_t>(layer)] = std::max(layer_max[static_cast<std::size_t>(layer)], gate_duration(g, d));
  }
  double total = 0.0;
  for (double v : layer_max) total += v;
  return total;
}

std::string Circuit::to_text() const {
  std::string out = "# qubits " + std::to_string(n_) + "\n";
  char buf[64];
  for (const Gate& g : gates_) {
    out += gate_name(g.kind);
    out += ' ';
    for (std::size_t k = 0; k < g.qubits.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(g.qubits[k]);
    }
    if (has_angle(g.kind)) {
      std::snprintf(buf, sizeof buf, " %.17g", g.angle);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Circuit Circuit::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  std::vector<Gate> parsed;
  int lineno = 0;
  auto fail = [&](const std::string& why) { throw InvalidArgument("circuit text line " + std::to_string(lineno) + ": " + why); };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string key;
      if (h >> key && key == "qubits") {
        if (!(h >> n) || n < 1) fail("bad qubit count");
      }
      continue;
    }
    std::istringstream ls(line);
    std::string name, qs, angle_tok;
    if (!(ls >> name >> qs)) fail("expected `GATE qubits [angle]`");
    const auto found = std::find_if(std::begin(kNames), std::end(kNames), [&](const auto& p) { return name == p.second; });
    if (found == std::end(kNames)) fail("unknown gate " + name);
    Gate g{found->first, {}, 0.0};
    std::istringstream qstream(qs);
    std::string tok;
    while (std::getline(qstream, tok, ',')) {
      char* end = nullptr;
      const long v = std::strtol(tok.c_str(), &end, 10);
      if (tok.empty() || *end != '\0') fail("bad qubit index '" + tok + "'");
      g.qubits.push_back(static_cast<int>(v));
    }
    if (has_angle(g.kind)) {
      if (!(ls >> angle_tok)) fail("missing angle");
      char* end = nullptr;
      g.angle = std::strtod(angle_tok.c_str(), &end);
      if (*end != '\0') fail("bad angle '" + angle_tok + "'");
    }
    parsed.push_back(std::move(g));
  }
  if (n < 1) throw InvalidArgument("circuit text lacks a `# qubits n` header");
  Circuit c(n);
  for (Gate& g : parsed) c.add(g.kind, std::move(g.qubits), g.angle);
  return c;
}

DensityMatrix run_circuit(const DensityMatrix& rho, const Circuit& c, std::span<const int> mapping,
                          double depolarizing_1q, double depolarizing_2q) {
  if (static_cast<int>(mapping.size()) != c.qubit_count()) throw InvalidArgument("run_circuit: mapping size mismatch");
  const KrausChannel dep1 = depolarizing(depolarizing_1q, 1);
  const KrausChannel dep2 = depolarizing(depolarizing_2q, 2);
  DensityMatrix state = rho;
  std::vector<int> targets;
  for (const Gate& g : c.gates()) {
    if (g.kind == GateKind::delay || g.kind == GateKind::id) continue;
    targets.clear();
    for (int q : g.qubits) targets.push_back(mapping[static_cast<std::size_t>(q)]);
    state = apply_unitary(state, g.matrix(), targets);
    if (g.kind == GateKind::rz) continue;  // virtual
    if (targets.size() == 1) {
      if (depolarizing_1q > 0.0) state = apply_channel(state, dep1, targets.front());
    } else if (depolarizing_2q > 0.0) {
      const int t = targets.back();
      for (std::size_t k = 0; k + 1 < targets.size(); ++k) {
        const std::array<int, 2> pair{targets[k], t};
        state = apply_channel(state, dep2, pair);
      }
    }
  }
  return state;
}

}  // namespace nadqec
