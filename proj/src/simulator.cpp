#include "eqs/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eqs::sim {

namespace {

Matrix pauli(int which) {
  const cplx i{0.0, 1.0};
  switch (which) {
    case 0: return {{1, 0}, {0, 1}};
    case 1: return {{0, 1}, {1, 0}};
    case 2: return {{0, -i}, {i, 0}};
    default: return {{1, 0}, {0, -1}};
  }
}

// Inserts a zero bit at position `bit` of `x`.
inline std::size_t insert_zero(std::size_t x, int bit) {
  const std::size_t low = x & ((std::size_t{1} << bit) - 1);
  return ((x >> bit) << (bit + 1)) | low;
}

}  // namespace

const std::array<Matrix, kGeneratorCount>& pauli_generators() {
  static const std::array<Matrix, kGeneratorCount> gens = [] {
    std::array<Matrix, kGeneratorCount> g;
    for (std::size_t j = 0; j < kGeneratorCount; ++j) {
      const int code = static_cast<int>(j) + 1;
      g[j] = num::kron(pauli(code / 4), pauli(code % 4));
    }
    return g;
  }();
  return gens;
}

std::string generator_name(std::size_t j) {
  static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
  if (j >= kGeneratorCount) throw std::out_of_range("generator_name: index out of range");
  const std::size_t code = j + 1;
  return {kNames[code / 4], kNames[code % 4]};
}

Matrix unitary_from_params(const GateParams& params) {
  const auto& gens = pauli_generators();
  Matrix h(4, 4);
  for (std::size_t j = 0; j < kGeneratorCount; ++j) {
    if (!std::isfinite(params[j])) throw std::invalid_argument("unitary_from_params: non-finite parameter");
    if (params[j] != 0.0) h += gens[j] * cplx{params[j], 0.0};
  }
  return num::expi_hermitian(num::HermitianMatrix(h));
}

TwoQubitGate::TwoQubitGate(QubitPair pair, Matrix matrix) : pair_(pair), matrix_(std::move(matrix)) {
  if (pair_.first == pair_.second) throw std::invalid_argument("TwoQubitGate: qubits must differ");
  if (pair_.first < 0 || pair_.second < 0) throw std::invalid_argument("TwoQubitGate: negative qubit index");
  if (matrix_.rows() != 4 || matrix_.cols() != 4) throw std::invalid_argument("TwoQubitGate: matrix must be 4x4");
}

TwoQubitGate::TwoQubitGate(QubitPair pair, Matrix matrix, const GateParams& params)
    : TwoQubitGate(pair, std::move(matrix)) {
  if ((unitary_from_params(params) - matrix_).frobenius_norm() > 1e-10)
    throw std::invalid_argument("TwoQubitGate: matrix does not match its parameters");
  params_ = params;
}

TwoQubitGate TwoQubitGate::identity(QubitPair pair) { return TwoQubitGate(pair, Matrix::identity(4)); }

TwoQubitGate TwoQubitGate::from_params(QubitPair pair, const GateParams& params) {
  TwoQubitGate g(pair, unitary_from_params(params));
  g.params_ = params;
  return g;
}

void TwoQubitGate::reset(QubitPair pair, Matrix matrix) {
  *this = TwoQubitGate(pair, std::move(matrix));
}

void validate_pair(QubitPair pair, int n_qubits) {
  if (pair.first == pair.second) throw std::invalid_argument("gate pair must name two distinct qubits");
  if (pair.first < 0 || pair.second < 0 || pair.first >= n_qubits || pair.second >= n_qubits)
    throw std::invalid_argument("gate pair (" + std::to_string(pair.first) + ", " + std::to_string(pair.second) +
                                ") out of range for " + std::to_string(n_qubits) + " qubits");
}

void apply_matrix(StateVector& state, const Matrix& m, QubitPair pair) {
  validate_pair(pair, state.n_qubits());
  const int lo = std::min(pair.first, pair.second);
  const int hi = std::max(pair.first, pair.second);
  const std::size_t bi = std::size_t{1} << pair.first;
  const std::size_t bj = std::size_t{1} << pair.second;
  const std::size_t offsets[4] = {0, bj, bi, bi | bj};
  cplx u[4][4];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) u[r][c] = m(r, c);

  auto amps = state.amplitudes();
  const std::size_t blocks = state.dim() >> 2;
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::size_t base = insert_zero(insert_zero(k, lo), hi);
    cplx v[4];
    for (int a = 0; a < 4; ++a) v[a] = amps[base | offsets[a]];
    for (int r = 0; r < 4; ++r) amps[base | offsets[r]] = u[r][0] * v[0] + u[r][1] * v[1] + u[r][2] * v[2] + u[r][3] * v[3];
  }
}

void apply_single_qubit(StateVector& state, const Matrix& m, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) throw std::invalid_argument("qubit index out of range");
  if (m.rows() != 2 || m.cols() != 2) throw std::invalid_argument("single-qubit gate must be 2x2");
  const std::size_t bit = std::size_t{1} << qubit;
  auto amps = state.amplitudes();
  const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  for (std::size_t k = 0; k < state.dim() / 2; ++k) {
    const std::size_t i0 = insert_zero(k, qubit);
    const cplx v0 = amps[i0], v1 = amps[i0 | bit];
    amps[i0] = a * v0 + b * v1;
    amps[i0 | bit] = c * v0 + d * v1;
  }
}

StateVector apply_gate(StateVector state, const TwoQubitGate& gate) {
  apply_matrix(state, gate.matrix(), gate.pair());
  return state;
}

StateVector run_circuit(const GateCircuit& circuit, StateVector input) {
  if (circuit.n_qubits != input.n_qubits()) throw std::invalid_argument("run_circuit: qubit-count mismatch");
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) apply_matrix(input, it->matrix(), it->pair());
  return input;
}

StateVector run_circuit_adjoint(const GateCircuit& circuit, StateVector input) {
  if (circuit.n_qubits != input.n_qubits()) throw std::invalid_argument("run_circuit_adjoint: qubit-count mismatch");
  for (const auto& g : circuit.gates) apply_matrix(input, g.matrix().adjoint(), g.pair());
  return input;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("inner_product: dimension mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

std::vector<Matrix> environment_tensor(std::span<const BraKet> targets, QubitPair pair) {
  std::vector<Matrix> out;
  out.reserve(targets.size());
  for (const auto& t : targets) {
    const int n = t.ket->n_qubits();
    if (t.bra->n_qubits() != n) throw std::invalid_argument("environment_tensor: qubit-count mismatch");
    validate_pair(pair, n);
    const int lo = std::min(pair.first, pair.second);
    const int hi = std::max(pair.first, pair.second);
    const std::size_t bi = std::size_t{1} << pair.first;
    const std::size_t bj = std::size_t{1} << pair.second;
    const std::size_t offsets[4] = {0, bj, bi, bi | bj};
    const auto ket = t.ket->amplitudes();
    const auto bra = t.bra->amplitudes();

    cplx f[4][4] = {};
    const std::size_t blocks = t.ket->dim() >> 2;
    for (std::size_t k = 0; k < blocks; ++k) {
      const std::size_t base = insert_zero(insert_zero(k, lo), hi);
      cplx kv[4], bv[4];
      for (int a = 0; a < 4; ++a) {
        kv[a] = ket[base | offsets[a]];
        bv[a] = std::conj(bra[base | offsets[a]]);
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) f[a][b] += kv[a] * bv[b];
    }
    Matrix m(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) m(a, b) = f[a][b];
    out.push_back(std::move(m));
  }
  return out;
}

Matrix embed_gate(const Matrix& m, QubitPair pair, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  Matrix full(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    StateVector e = StateVector::basis(n_qubits, col);
    apply_matrix(e, m, pair);
    for (std::size_t row = 0; row < dim; ++row) full(row, col) = e[row];
  }
  return full;
}

Matrix circuit_unitary(const GateCircuit& circuit) {
  const std::size_t dim = std::size_t{1} << circuit.n_qubits;
  Matrix u = Matrix::identity(dim);
  for (const auto& g : circuit.gates) u = u * embed_gate(g.matrix(), g.pair(), circuit.n_qubits);
  return u;
}

Matrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {{s, s}, {s, -s}};
}

Matrix cnot() { return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}; }

}  // namespace eqs::sim
