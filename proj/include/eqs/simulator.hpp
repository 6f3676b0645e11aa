#pragma once

// Dense statevector simulation over two-qubit gates.
//
// Local gate convention: a gate on pair (i, j) sees the 4-dim local index
// 2 * bit_i + bit_j, so a Kronecker product A (x) B places A on qubit i and B
// on qubit j. A circuit stores gates U_1 ... U_J and represents the product
// C = U_1 U_2 ... U_J; acting on a state applies U_J first.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqs/numerics.hpp"
#include "eqs/state_vector.hpp"

namespace eqs::sim {

using num::Matrix;

struct QubitPair {
  int first = 0;
  int second = 1;

  friend bool operator==(const QubitPair&, const QubitPair&) = default;
  friend auto operator<=>(const QubitPair&, const QubitPair&) = default;
};

inline constexpr std::size_t kGeneratorCount = 15;
using GateParams = std::array<double, kGeneratorCount>;

/// The 15 non-identity two-qubit Pauli strings P_a (x) P_b, (a, b) != (I, I),
/// in lexicographic order over {I, X, Y, Z}. Index j maps to (a, b) with
/// 4a + b = j + 1.
const std::array<Matrix, kGeneratorCount>& pauli_generators();

/// Label such as "XY" for generator index j.
std::string generator_name(std::size_t j);

/// exp(i sum_j params_j G_j).
Matrix unitary_from_params(const GateParams& params);

class TwoQubitGate {
 public:
  TwoQubitGate(QubitPair pair, Matrix matrix);
  /// Stores both; throws if matrix differs from exp(i sum params G) by more
  /// than 1e-10 in Frobenius norm.
  TwoQubitGate(QubitPair pair, Matrix matrix, const GateParams& params);
  static TwoQubitGate identity(QubitPair pair);
  static TwoQubitGate from_params(QubitPair pair, const GateParams& params);

  QubitPair pair() const { return pair_; }
  const Matrix& matrix() const { return matrix_; }
  const std::optional<GateParams>& params() const { return params_; }

  /// Replaces placement and matrix; any parameters are dropped.
  void reset(QubitPair pair, Matrix matrix);

 private:
  QubitPair pair_;
  Matrix matrix_;
  std::optional<GateParams> params_;
};

struct GateCircuit {
  int n_qubits = 0;
  std::vector<TwoQubitGate> gates;  // gates[0] is U_1
};

/// Throws std::invalid_argument on an invalid pair for n qubits.
void validate_pair(QubitPair pair, int n_qubits);

/// In-place application of a 4x4 matrix to the pair's amplitude blocks.
void apply_matrix(StateVector& state, const Matrix& m, QubitPair pair);

/// In-place application of a 2x2 matrix to one qubit.
void apply_single_qubit(StateVector& state, const Matrix& m, int qubit);

StateVector apply_gate(StateVector state, const TwoQubitGate& gate);

/// C|input> with C = U_1 ... U_J.
StateVector run_circuit(const GateCircuit& circuit, StateVector input);

/// C^dagger|input> = U_J^dagger ... U_1^dagger |input>.
StateVector run_circuit_adjoint(const GateCircuit& circuit, StateVector input);

/// <a|b>
cplx inner_product(const StateVector& a, const StateVector& b);

struct BraKet {
  const StateVector* bra;
  const StateVector* ket;
};

/// For each entry, the 4x4 partial trace Tr_rest[|ket><bra|] on the pair:
/// F(a, b) = sum_r ket(a, r) * conj(bra(b, r)). Cost O(2^n) per entry.
std::vector<Matrix> environment_tensor(std::span<const BraKet> targets, QubitPair pair);

/// Dense 2^n x 2^n matrix of a gate placed in the full register. Test and
/// diagnostic use only.
Matrix embed_gate(const Matrix& m, QubitPair pair, int n_qubits);

/// Dense matrix of C = U_1 ... U_J. Diagnostic use only.
Matrix circuit_unitary(const GateCircuit& circuit);

// Common gates in the local convention.
Matrix hadamard();
Matrix cnot();

}  // namespace eqs::sim
