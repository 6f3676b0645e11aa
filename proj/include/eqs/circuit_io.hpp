#pragma once

// JSON form of a circuit:
//   {"n_qubits": n,
//    "gates": [{"pair": [i, j], "matrix": [[[re, im] x4] x4], "params": [15 floats] | null}]}

#include <json.hpp>

#include "eqs/simulator.hpp"

namespace eqs::sim {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json circuit_to_json(const GateCircuit& circuit);

/// Throws std::invalid_argument on schema violations.
GateCircuit circuit_from_json(const nlohmann::json& j);

}  // namespace eqs::sim
