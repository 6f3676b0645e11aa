#pragma once

// Explicit surrogate f(x) = sum_{k<K} lambda_k |<k|C^dagger|psi(x)>|^2 + b,
// its 15-parameter-per-gate form, the weighted cross-entropy loss with an
// analytic gradient, and the gradient / Adam experiments built on it.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "eqs/kernel.hpp"
#include "eqs/simulator.hpp"

namespace eqs::surrogate {

using sim::GateCircuit;
using sim::GateParams;

struct LabelSurrogate {
  GateCircuit circuit;
  std::vector<double> eigenvalues;  // lambda_k attached to |k>
  double bias = 0.0;
  bool converged = true;
  std::vector<double> fidelities;
};

struct EQSModel {
  int n_qubits = 0;
  std::vector<LabelSurrogate> labels;
};

double decision(const GateCircuit& circuit, std::span<const double> eigenvalues, double bias, const StateVector& x);

kernel::Prediction predict_eqs(const EQSModel& model, const StateVector& x);

/// Generator coefficients of the Hermitian log of u with the trace part
/// dropped, so exp(i sum theta_j G_j) equals u up to a global phase.
GateParams recover_gate_params(const num::Matrix& u);

struct ParameterizedEQS {
  int n_qubits = 0;
  std::vector<sim::QubitPair> pairs;  // one per gate, gates[0] = U_1
  std::vector<double> theta;          // 15 per gate, gate-major
  std::vector<double> eigenvalues;    // frozen
  double bias = 0.0;                  // frozen

  std::size_t gate_count() const { return pairs.size(); }
};

ParameterizedEQS recover_params(const LabelSurrogate& s);
GateCircuit build_circuit(const ParameterizedEQS& p);
double decision(const ParameterizedEQS& p, const StateVector& x);

/// Weighted cross-entropy for one label over a batch: weights are the class
/// counts of the opposite class divided by the batch size; p = sigmoid(f)
/// clamped to [1e-12, 1 - 1e-12]. Throws std::invalid_argument on an empty
/// batch.
double loss(const ParameterizedEQS& p, std::span<const StateVector> states, std::span<const int> labels, int label);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as theta
};

LossAndGradient loss_gradient(const ParameterizedEQS& p, std::span<const StateVector> states,
                              std::span<const int> labels, int label);

struct GradientExperimentConfig {
  int random_seeds = 10;
  std::uint64_t seed = 0;
  bool control = false;  // random arm reuses the surrogate parameters
};

struct GradientReport {
  int label = 0;
  double sum_sq_eqs = 0.0;
  std::vector<double> sum_sq_random;  // per seed
  double random_mean = 0.0;
  double random_std = 0.0;
  double ratio = 0.0;  // sum_sq_eqs / random_mean
};

/// Sum of squared loss gradients at the surrogate parameters versus
/// theta ~ U[0, 2pi) on the same topology, evaluated on `states`.
GradientReport gradient_experiment(const ParameterizedEQS& p, int label, std::span<const StateVector> states,
                                   std::span<const int> labels, const GradientExperimentConfig& cfg = {});

struct AdamConfig {
  double alpha = 0.009;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 1000;  // capped at the dataset size
  int steps = 200;
  std::uint64_t seed = 0;
};

struct AdamResult {
  ParameterizedEQS params;
  std::vector<double> loss_trace;  // batch loss before each step
  double initial_loss = 0.0;       // full-set loss
  double final_loss = 0.0;
};

/// Adam with bias correction; only theta is trained. Batches walk a
/// permutation reshuffled each epoch from `seed`.
AdamResult adam_train(const ParameterizedEQS& init, std::span<const StateVector> states, std::span<const int> labels,
                      int label, const AdamConfig& cfg = {});

nlohmann::json eqs_model_to_json(const EQSModel& model);
EQSModel eqs_model_from_json(const nlohmann::json& j);

}  // namespace eqs::surrogate
