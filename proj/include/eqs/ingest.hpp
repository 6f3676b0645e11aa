#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eqs/state_vector.hpp"

namespace eqs::ingest {

/// One gate statement. Qubit operands are register indices.
struct QasmStatement {
  std::string name;
  std::vector<int> qubits;
  std::vector<double> params;

  friend bool operator==(const QasmStatement&, const QasmStatement&) = default;
};

struct QasmProgram {
  int n_qubits = 0;
  std::string qreg_name = "q";
  std::vector<QasmStatement> statements;

  friend bool operator==(const QasmProgram&, const QasmProgram&) = default;
};

/// Parse failure with a 1-based source position.
class QasmError : public std::runtime_error {
 public:
  QasmError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// OpenQASM 2.0 subset: header, optional qelib1.inc include, exactly one
/// qreg, and gates h x y z s sdg t tdg rx ry rz u u3 cx cz. Angle expressions
/// take decimal literals, pi, unary minus, + - * / and parentheses.
QasmProgram parse_qasm(std::string_view source);

/// Canonical text; parse_qasm(to_qasm(p)) == p.
std::string to_qasm(const QasmProgram& program);

/// U(x)|0...0> for the program's circuit.
StateVector to_feature_state(const QasmProgram& program);

/// Appends exp(i theta P_a (x) P_b) with P_a on qubit `qa` and P_b on `qb`
/// (Pauli codes 0..3 = I, X, Y, Z), exact up to global phase.
void append_pauli_rotation(QasmProgram& program, int pauli_a, int pauli_b, int qa, int qb, double theta);

struct GeneratorSpec {
  int n_qubits = 6;
  int labels = 4;
  int per_label = 50;
  int anchor_depth = 20;
  int noise_depth = 1;
  double noise_scale = 0.07;
  std::uint64_t seed = 7;
};

struct DatasetItem {
  std::string id;
  QasmProgram program;
  int label = 0;
};

struct LabeledCircuitDataset {
  int n_qubits = 0;
  int label_count = 0;
  std::vector<DatasetItem> items;
};

/// Per label, one random anchor of `anchor_depth` two-qubit gates; each item
/// appends `noise_depth` gates with coefficients ~ N(0, noise_scale^2). Each
/// two-qubit gate is the ordered product of the 15 Pauli rotations
/// exp(i theta_j G_j), emitted as QASM. Bit-identical for equal specs.
LabeledCircuitDataset generate_clustered_dataset(const GeneratorSpec& spec);

/// Writes dir/{meta.json, circuits/<id>.qasm, labels.csv}.
void write_dataset(const LabeledCircuitDataset& dataset, const std::filesystem::path& dir);

/// Loads a dataset directory; throws std::runtime_error naming the offending
/// file (and QasmError position) on failure.
LabeledCircuitDataset load_dataset(const std::filesystem::path& dir);

/// FNV-1a over ids, labels and canonical QASM text.
std::uint64_t dataset_hash(const LabeledCircuitDataset& dataset);

/// Throws std::invalid_argument unless at least two distinct labels occur.
void require_classification(const LabeledCircuitDataset& dataset);

}  // namespace eqs::ingest
