#include "eqs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "eqs/circuit_io.hpp"
#include "eqs/simulator.hpp"

namespace eqs::spectral {

num::HermitianMatrix build_observable_matrix(const kernel::GramMatrix& gram, const num::GramSchmidtResult& gs,
                                             std::span<const double> alpha) {
  const std::size_t m = gram.dim, r = gs.rank;
  if (alpha.size() != m || gs.coeffs.cols() != m || gs.coeffs.rows() != r)
    throw std::invalid_argument("build_observable_matrix: dimension mismatch");
  const auto& c = gs.coeffs;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      cplx s{};
      for (std::size_t i = 0; i < r; ++i) s += std::conj(c(i, a)) * c(i, b);
      if (std::abs(s - gram.overlaps(a, b)) > 1e-6)
        throw std::invalid_argument("build_observable_matrix: Gram-Schmidt coefficients disagree with overlaps");
    }
  num::Matrix o(r, r);
  for (std::size_t mm = 0; mm < m; ++mm) {
    if (alpha[mm] == 0.0) continue;
    for (std::size_t i = 0; i < r; ++i) {
      const cplx ci = alpha[mm] * c(i, mm);
      if (ci == cplx{}) continue;
      for (std::size_t j = 0; j < r; ++j) o(i, j) += ci * std::conj(c(j, mm));
    }
  }
  return num::HermitianMatrix(o);
}

SpectralObservable diagonalize_observable(const num::HermitianMatrix& o, std::span<const StateVector> basis, int label) {
  const std::size_t d = o.dim();
  if (basis.size() != d) throw std::invalid_argument("diagonalize_observable: basis size differs from matrix");
  const auto e = num::eigh(o);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return e.values[a] * e.values[a] > e.values[b] * e.values[b]; });

  SpectralObservable obs;
  obs.label = label;
  obs.subspace_dim = d;
  obs.coeffs = num::Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    obs.values.push_back(e.values[src]);
    std::vector<cplx> v(basis[0].dim(), cplx{});
    for (std::size_t i = 0; i < d; ++i) {
      const cplx ci = e.vectors(i, src);
      obs.coeffs(i, k) = ci;
      const auto amps = basis[i].amplitudes();
      for (std::size_t a = 0; a < v.size(); ++a) v[a] += ci * amps[a];
    }
    auto sv = StateVector::from_amplitudes(std::move(v));
    sv.normalize();
    obs.vectors.push_back(std::move(sv));
  }
  return obs;
}

SpectralObservable truncate(const SpectralObservable& obs, std::size_t k) {
  if (k < 1 || k > obs.values.size()) throw std::invalid_argument("truncate: K out of range");
  SpectralObservable t;
  t.label = obs.label;
  t.subspace_dim = obs.subspace_dim;
  t.values.assign(obs.values.begin(), obs.values.begin() + static_cast<std::ptrdiff_t>(k));
  t.vectors.assign(obs.vectors.begin(), obs.vectors.begin() + static_cast<std::ptrdiff_t>(k));
  t.coeffs = num::Matrix(obs.coeffs.rows(), k);
  for (std::size_t i = 0; i < obs.coeffs.rows(); ++i)
    for (std::size_t c = 0; c < k; ++c) t.coeffs(i, c) = obs.coeffs(i, c);
  return t;
}

double cumulative_contribution(const SpectralObservable& obs, std::size_t k) {
  if (k < 1 || k > obs.values.size()) throw std::invalid_argument("cumulative_contribution: K out of range");
  double head = 0.0, total = 0.0;
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    const double sq = obs.values[i] * obs.values[i];
    total += sq;
    if (i < k) head += sq;
  }
  return total == 0.0 ? 1.0 : std::min(1.0, head / total);
}

std::vector<SpectralObservable> decompose(const kernel::KernelModel& model, const kernel::GramMatrix& gram,
                                          const num::GramSchmidtResult& gs) {
  std::vector<SpectralObservable> out;
  for (int l = 0; l < model.label_count; ++l)
    out.push_back(diagonalize_observable(build_observable_matrix(gram, gs, model.alpha[l]), gs.basis, l));
  return out;
}

LowRankModel make_low_rank(const kernel::KernelModel& model, const num::GramSchmidtResult& gs,
                           std::span<const SpectralObservable> full, std::size_t k, double gs_tol) {
  if (k < 1) throw std::invalid_argument("make_low_rank: K must be >= 1");
  if (full.size() != static_cast<std::size_t>(model.label_count))
    throw std::invalid_argument("make_low_rank: one observable per label required");
  LowRankModel lr;
  lr.n_qubits = model.n_qubits;
  lr.gs_tol = gs_tol;
  lr.kept_indices = gs.kept_indices;
  lr.bias = model.bias;
  for (const auto& obs : full) lr.observables.push_back(truncate(obs, std::min(k, obs.values.size())));
  return lr;
}

kernel::Prediction predict_low_rank(const LowRankModel& model, const StateVector& x) {
  if (x.n_qubits() != model.n_qubits) throw std::invalid_argument("predict_low_rank: qubit count mismatch");
  kernel::Prediction p;
  for (std::size_t l = 0; l < model.observables.size(); ++l) {
    const auto& obs = model.observables[l];
    double f = model.bias[l];
    for (std::size_t k = 0; k < obs.values.size(); ++k) f += obs.values[k] * std::norm(sim::inner_product(obs.vectors[k], x));
    p.decisions.push_back(f);
  }
  p.label = kernel::argmax_label(p.decisions);
  return p;
}

std::string spectrum_csv(std::span<const SpectralObservable> full) {
  std::ostringstream os;
  os << "label,k,lambda,cumulative_ratio\n";
  char buf[96];
  for (const auto& obs : full)
    for (std::size_t k = 0; k < obs.values.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g\n", obs.label, k, obs.values[k],
                    cumulative_contribution(obs, k + 1));
      os << buf;
    }
  return os.str();
}

nlohmann::json low_rank_to_json(const LowRankModel& model) {
  nlohmann::json labels = nlohmann::json::array();
  for (std::size_t l = 0; l < model.observables.size(); ++l) {
    const auto& obs = model.observables[l];
    labels.push_back({{"label", obs.label},
                      {"subspace_dim", obs.subspace_dim},
                      {"rank", obs.values.size()},
                      {"bias", model.bias[l]},
                      {"eigenvalues", obs.values},
                      {"coefficients", sim::matrix_to_json(obs.coeffs)}});
  }
  return {{"n_qubits", model.n_qubits}, {"gs_tol", model.gs_tol}, {"kept_indices", model.kept_indices},
          {"labels", labels}};
}

LowRankModel low_rank_from_json(const nlohmann::json& j, std::span<const StateVector> train_states) {
  LowRankModel lr;
  try {
    lr.n_qubits = j.at("n_qubits").get<int>();
    lr.gs_tol = j.at("gs_tol").get<double>();
    lr.kept_indices = j.at("kept_indices").get<std::vector<std::size_t>>();
    const auto gs = num::gram_schmidt(train_states, lr.gs_tol);
    if (gs.kept_indices != lr.kept_indices)
      throw std::invalid_argument("low-rank bundle: Gram-Schmidt basis differs from the recorded one");
    for (const auto& e : j.at("labels")) {
      SpectralObservable obs;
      obs.label = e.at("label").get<int>();
      obs.subspace_dim = e.at("subspace_dim").get<std::size_t>();
      obs.values = e.at("eigenvalues").get<std::vector<double>>();
      obs.coeffs = sim::matrix_from_json(e.at("coefficients"));
      if (obs.subspace_dim != gs.rank || obs.coeffs.rows() != gs.rank || obs.coeffs.cols() != obs.values.size())
        throw std::invalid_argument("low-rank bundle: coefficient shape mismatch");
      for (std::size_t k = 0; k < obs.values.size(); ++k) {
        std::vector<cplx> v(gs.basis[0].dim(), cplx{});
        for (std::size_t i = 0; i < gs.rank; ++i) {
          const auto amps = gs.basis[i].amplitudes();
          for (std::size_t a = 0; a < v.size(); ++a) v[a] += obs.coeffs(i, k) * amps[a];
        }
        auto sv = StateVector::from_amplitudes(std::move(v));
        sv.normalize();
        obs.vectors.push_back(std::move(sv));
      }
      lr.bias.push_back(e.at("bias").get<double>());
      lr.observables.push_back(std::move(obs));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("low-rank bundle: ") + e.what());
  }
  return lr;
}

}  // namespace eqs::spectral
