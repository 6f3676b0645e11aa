#include "eqs/circuit_io.hpp"

#include <stdexcept>

namespace eqs::sim {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw std::invalid_argument("matrix: entries must be [re, im]");
      m(r, c) = cplx{e[0].get<double>(), e[1].get<double>()};
    }
  }
  return m;
}

json circuit_to_json(const GateCircuit& circuit) {
  json gates = json::array();
  for (const auto& g : circuit.gates) {
    json item;
    item["pair"] = {g.pair().first, g.pair().second};
    item["matrix"] = matrix_to_json(g.matrix());
    if (g.params())
      item["params"] = *g.params();
    else
      item["params"] = nullptr;
    gates.push_back(std::move(item));
  }
  return {{"n_qubits", circuit.n_qubits}, {"gates", std::move(gates)}};
}

GateCircuit circuit_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n_qubits") || !j.contains("gates"))
    throw std::invalid_argument("circuit: expected an object with n_qubits and gates");
  GateCircuit c;
  c.n_qubits = j.at("n_qubits").get<int>();
  if (c.n_qubits < 2) throw std::invalid_argument("circuit: n_qubits must be >= 2");
  for (const auto& g : j.at("gates")) {
    const auto& p = g.at("pair");
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("circuit: pair must have two entries");
    const QubitPair pair{p[0].get<int>(), p[1].get<int>()};
    validate_pair(pair, c.n_qubits);
    Matrix m = matrix_from_json(g.at("matrix"));
    if (m.rows() != 4 || m.cols() != 4) throw std::invalid_argument("circuit: gate matrix must be 4x4");
    if (g.contains("params") && !g.at("params").is_null()) {
      const auto params = g.at("params").get<std::vector<double>>();
      if (params.size() != kGeneratorCount) throw std::invalid_argument("circuit: params must have 15 entries");
      GateParams arr{};
      std::copy(params.begin(), params.end(), arr.begin());
      c.gates.emplace_back(pair, std::move(m), arr);
    } else {
      c.gates.emplace_back(pair, std::move(m));
    }
  }
  return c;
}

}  // namespace eqs::sim
