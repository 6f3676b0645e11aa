#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqs/numerics.hpp"
#include "eqs/state_vector.hpp"

namespace eqs::kernel {

/// |<a|b>|^2
double quantum_kernel(const StateVector& a, const StateVector& b);

struct GramMatrix {
  std::size_t dim = 0;
  std::vector<double> k;  // row-major dim x dim
  num::Matrix overlaps;   // overlaps(r, c) = <psi_r|psi_c>

  double operator()(std::size_t r, std::size_t c) const { return k[r * dim + c]; }
};

GramMatrix gram(std::span<const StateVector> states);

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-3;  // KKT violation tolerance
  std::size_t max_iter = 10'000'000;
  double psd_tol = 1e-8;
};

struct BinarySvm {
  std::vector<double> lambda;  // dual variables in [0, C]
  std::vector<double> alpha;   // lambda * y
  double bias = 0.0;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;  // dual objective after each step
};

/// Soft-margin SVM dual by SMO with maximal-violating-pair selection.
/// Throws std::invalid_argument for single-class labels, C <= 0, or a Gram
/// matrix whose smallest eigenvalue is below -psd_tol.
BinarySvm train_svm_binary(const GramMatrix& gram, std::span<const int> y, const SvmOptions& opt = {});

struct KernelModel {
  int n_qubits = 0;
  int label_count = 0;
  double c = 1.0;
  double tol = 1e-3;
  std::vector<std::vector<double>> alpha;  // [label][m]
  std::vector<double> bias;                // [label]
  std::vector<StateVector> train_states;
  std::vector<std::string> train_ids;
  std::uint64_t dataset_hash = 0;
};

/// One binary SVM per label (label l vs the rest) on a shared Gram matrix.
KernelModel train_one_vs_rest(std::span<const StateVector> states, std::span<const int> labels, int label_count,
                              const SvmOptions& opt = {});
KernelModel train_one_vs_rest(const GramMatrix& gram, std::span<const StateVector> states,
                              std::span<const int> labels, int label_count, const SvmOptions& opt = {});

struct Prediction {
  int label = 0;
  std::vector<double> decisions;
};

/// argmax over decision values; ties go to the smallest label.
int argmax_label(std::span<const double> decisions);

Prediction predict_implicit(const KernelModel& model, const StateVector& x);

nlohmann::json kernel_model_to_json(const KernelModel& model);
/// train_states must be the states of model.train_ids, in order.
KernelModel kernel_model_from_json(const nlohmann::json& j, std::vector<StateVector> train_states);

}  // namespace eqs::kernel
