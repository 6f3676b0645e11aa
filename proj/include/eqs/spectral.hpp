#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqs/kernel.hpp"
#include "eqs/numerics.hpp"

namespace eqs::spectral {

/// [O]_ij = sum_m alpha_m <e_i|psi_m><psi_m|e_j> from the Gram-Schmidt
/// coefficients alone. Throws std::invalid_argument on size mismatch or if
/// the coefficients do not reproduce gram.overlaps to 1e-6.
num::HermitianMatrix build_observable_matrix(const kernel::GramMatrix& gram, const num::GramSchmidtResult& gs,
                                             std::span<const double> alpha);

struct SpectralObservable {
  int label = 0;
  std::size_t subspace_dim = 0;
  std::vector<double> values;       // sorted by value^2 descending
  num::Matrix coeffs;               // subspace_dim x values.size(); column k over the GS basis
  std::vector<StateVector> vectors;  // sum_i coeffs(i, k) e_i, normalized
};

SpectralObservable diagonalize_observable(const num::HermitianMatrix& o, std::span<const StateVector> basis,
                                          int label = 0);

/// Keeps the first k entries (largest value^2). 1 <= k <= values.size().
SpectralObservable truncate(const SpectralObservable& obs, std::size_t k);

/// sum_{i<k} value_i^2 / sum_i value_i^2 over the observable's entries; 1 if
/// the spectrum is identically zero.
double cumulative_contribution(const SpectralObservable& obs, std::size_t k);

struct LowRankModel {
  int n_qubits = 0;
  double gs_tol = 1e-8;
  std::vector<std::size_t> kept_indices;    // GS basis provenance
  std::vector<SpectralObservable> observables;  // per label, truncated
  std::vector<double> bias;
};

/// Full-rank spectral decomposition per label of a trained kernel model.
std::vector<SpectralObservable> decompose(const kernel::KernelModel& model, const kernel::GramMatrix& gram,
                                          const num::GramSchmidtResult& gs);

/// Truncates every label to min(k, subspace_dim).
LowRankModel make_low_rank(const kernel::KernelModel& model, const num::GramSchmidtResult& gs,
                           std::span<const SpectralObservable> full, std::size_t k, double gs_tol);

kernel::Prediction predict_low_rank(const LowRankModel& model, const StateVector& x);

/// label,k,lambda,cumulative_ratio for every entry of each full spectrum.
std::string spectrum_csv(std::span<const SpectralObservable> full);

/// Bundle with eigenvector coefficients over the GS basis. Loading reruns the
/// deterministic Gram-Schmidt on the training states to rebuild the vectors.
nlohmann::json low_rank_to_json(const LowRankModel& model);
LowRankModel low_rank_from_json(const nlohmann::json& j, std::span<const StateVector> train_states);

}  // namespace eqs::spectral
