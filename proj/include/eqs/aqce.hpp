#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqs/simulator.hpp"

namespace eqs::aqce {

using num::Matrix;
using sim::GateCircuit;
using sim::QubitPair;

struct AqceConfig {
  int j0 = 12;
  int delta_j = 6;
  int sweeps = 4;                // sweeps per growth step
  std::optional<int> j_max;      // unset: only the hard cap applies
  int hard_cap = 1000;
  std::vector<double> f_target;  // per k; empty means default_target for all
  double default_target = 0.6;
  std::vector<QubitPair> pairs;  // empty means all i < j
  std::uint64_t seed = 0;        // recorded only; the algorithm is deterministic
};

struct UpdateRecord {
  int sweep = 0;  // global sweep counter, 1-based
  int m = 0;      // 0-based gate position (gates[0] = U_1)
  QubitPair pair;
  std::vector<double> fidelities;
  double total = 0.0;
};

struct AqceTrace {
  std::vector<UpdateRecord> updates;
};

struct AqceResult {
  GateCircuit circuit;
  AqceTrace trace;
  std::vector<double> fidelities;
  bool converged = false;
  int sweeps_run = 0;
};

/// Finds C = U_1...U_J with |<k|C^dagger|target_k>| >= f_target_k for all k.
/// Runs `sweeps` sweeps on the current gates, then appends delta_j identity
/// gates (applied first to |k>), until every target is met or the budget
/// would be exceeded. Running out of budget is reported by converged = false.
/// Throws std::invalid_argument for non-orthonormal targets, K > 2^n, or an
/// invalid config.
AqceResult synthesize_isometry(std::span<const StateVector> targets, const AqceConfig& config = {});

/// -arg Tr[F U^dagger], or 0 when the trace vanishes.
double phase_align(const Matrix& f, const Matrix& u);

/// U = X Y from F = X D Y; maximizes |Tr[F U^dagger]| over unitaries.
Matrix optimal_gate(const Matrix& f);

struct Fidelities {
  std::vector<double> per_k;
  double total = 0.0;
};

Fidelities circuit_fidelities(const GateCircuit& circuit, std::span<const StateVector> targets);

/// update_index,sweep,m,pair,F_total,F_0..F_{K-1}
std::string trace_csv(const AqceTrace& trace);

/// position,qubit_a,qubit_b,frobenius_distance (||U - I||_F per gate)
std::string heatmap_csv(const GateCircuit& circuit);

}  // namespace eqs::aqce
