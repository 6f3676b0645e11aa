#include "eqs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "eqs/parallel.hpp"
#include "eqs/simulator.hpp"

namespace eqs::kernel {

double quantum_kernel(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("quantum_kernel: qubit count mismatch");
  return std::norm(sim::inner_product(a, b));
}

GramMatrix gram(std::span<const StateVector> states) {
  if (states.empty()) throw std::invalid_argument("gram: no states");
  const std::size_t m = states.size();
  for (const auto& s : states)
    if (s.n_qubits() != states[0].n_qubits()) throw std::invalid_argument("gram: qubit count mismatch");
  GramMatrix g;
  g.dim = m;
  g.k.assign(m * m, 0.0);
  g.overlaps = num::Matrix(m, m);
  parallel_for(m, [&](std::size_t r) {
    for (std::size_t c = r; c < m; ++c) {
      const cplx o = r == c ? cplx{states[r].norm() * states[r].norm(), 0.0} : sim::inner_product(states[r], states[c]);
      g.overlaps(r, c) = o;
      g.overlaps(c, r) = std::conj(o);
      g.k[r * m + c] = g.k[c * m + r] = std::norm(o);
    }
  });
  return g;
}

namespace {

void check_psd(const GramMatrix& g, double tol) {
  num::Matrix a(g.dim, g.dim);
  for (std::size_t r = 0; r < g.dim; ++r)
    for (std::size_t c = 0; c < g.dim; ++c) a(r, c) = g(r, c);
  const auto e = num::eigh(num::HermitianMatrix(a));
  if (e.values.back() < -tol)
    throw std::invalid_argument("svm: Gram matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(e.values.back()) + ")");
}

}  // namespace

BinarySvm train_svm_binary(const GramMatrix& gram, std::span<const int> y, const SvmOptions& opt) {
  const std::size_t m = gram.dim;
  if (y.size() != m) throw std::invalid_argument("svm: label count differs from Gram dimension");
  if (!(opt.c > 0.0)) throw std::invalid_argument("svm: C must be positive");
  bool pos = false, neg = false;
  for (const int v : y) {
    if (v != 1 && v != -1) throw std::invalid_argument("svm: labels must be +1 or -1");
    (v == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) throw std::invalid_argument("svm: both classes must be present");
  check_psd(gram, opt.psd_tol);

  const double c = opt.c;
  const double tau = 1e-12;
  auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * gram(i, j); };

  BinarySvm out;
  std::vector<double>& a = out.lambda;
  a.assign(m, 0.0);
  std::vector<double> grad(m, -1.0);  // Q a - e
  auto objective = [&] {
    double d = 0.0;
    for (std::size_t t = 0; t < m; ++t) d += a[t] * (1.0 - grad[t]);
    return 0.5 * d;
  };

  for (; out.iterations < opt.max_iter; ++out.iterations) {
    double gmax = -std::numeric_limits<double>::infinity(), gmax2 = gmax;
    std::size_t i = m, j = m;
    for (std::size_t t = 0; t < m; ++t) {
      const bool up = y[t] == 1 ? a[t] < c : a[t] > 0.0;
      const bool low = y[t] == 1 ? a[t] > 0.0 : a[t] < c;
      if (up && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
      if (low && y[t] * grad[t] > gmax2) {
        gmax2 = y[t] * grad[t];
        j = t;
      }
    }
    if (i == m || j == m || gmax + gmax2 < opt.tol) break;

    const double old_i = a[i], old_j = a[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = sum;
        }
        if (a[i] < 0.0) {
          a[i] = 0.0;
          a[j] = sum;
        }
      }
    }
    const double di = a[i] - old_i, dj = a[j] - old_j;
    for (std::size_t t = 0; t < m; ++t) grad[t] += q(i, t) * di + q(j, t) * dj;
    out.objective_trace.push_back(objective());
  }

  // b = -rho; rho averages y G over free vectors, else the feasible midpoint.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = y[t] * grad[t];
    if (a[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (a[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  out.bias = -rho;
  out.alpha.resize(m);
  for (std::size_t t = 0; t < m; ++t) out.alpha[t] = a[t] * y[t];
  return out;
}

KernelModel train_one_vs_rest(const GramMatrix& g, std::span<const StateVector> states, std::span<const int> labels,
                              int label_count, const SvmOptions& opt) {
  if (states.size() != g.dim || labels.size() != g.dim)
    throw std::invalid_argument("train_one_vs_rest: states, labels and Gram sizes differ");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw std::invalid_argument("train_one_vs_rest: need at least two distinct labels");
  for (const int l : distinct)
    if (l < 0 || l >= label_count) throw std::invalid_argument("train_one_vs_rest: label out of range");

  KernelModel model;
  model.n_qubits = states[0].n_qubits();
  model.label_count = label_count;
  model.c = opt.c;
  model.tol = opt.tol;
  model.train_states.assign(states.begin(), states.end());
  for (int l = 0; l < label_count; ++l) {
    std::vector<int> y(labels.size());
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = labels[t] == l ? 1 : -1;
    auto svm = train_svm_binary(g, y, opt);
    model.alpha.push_back(std::move(svm.alpha));
    model.bias.push_back(svm.bias);
  }
  return model;
}

KernelModel train_one_vs_rest(std::span<const StateVector> states, std::span<const int> labels, int label_count,
                              const SvmOptions& opt) {
  return train_one_vs_rest(gram(states), states, labels, label_count, opt);
}

int argmax_label(std::span<const double> decisions) {
  if (decisions.empty()) throw std::invalid_argument("argmax_label: no decisions");
  return static_cast<int>(std::max_element(decisions.begin(), decisions.end()) - decisions.begin());
}

Prediction predict_implicit(const KernelModel& model, const StateVector& x) {
  if (x.n_qubits() != model.n_qubits) throw std::invalid_argument("predict_implicit: qubit count mismatch");
  std::vector<double> k(model.train_states.size());
  for (std::size_t m = 0; m < k.size(); ++m) k[m] = quantum_kernel(model.train_states[m], x);
  Prediction p;
  for (int l = 0; l < model.label_count; ++l) {
    double f = model.bias[l];
    for (std::size_t m = 0; m < k.size(); ++m) f += model.alpha[l][m] * k[m];
    p.decisions.push_back(f);
  }
  p.label = argmax_label(p.decisions);
  return p;
}

nlohmann::json kernel_model_to_json(const KernelModel& model) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(model.dataset_hash));
  return {{"n_qubits", model.n_qubits}, {"label_count", model.label_count}, {"c", model.c},
          {"tol", model.tol},           {"dataset_hash", hash},             {"train_ids", model.train_ids},
          {"alpha", model.alpha},       {"bias", model.bias}};
}

KernelModel kernel_model_from_json(const nlohmann::json& j, std::vector<StateVector> train_states) {
  KernelModel m;
  try {
    m.n_qubits = j.at("n_qubits").get<int>();
    m.label_count = j.at("label_count").get<int>();
    m.c = j.at("c").get<double>();
    m.tol = j.at("tol").get<double>();
    m.dataset_hash = std::stoull(j.at("dataset_hash").get<std::string>(), nullptr, 16);
    m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    m.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
    m.bias = j.at("bias").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("kernel model: ") + e.what());
  }
  if (m.alpha.size() != static_cast<std::size_t>(m.label_count) || m.bias.size() != m.alpha.size())
    throw std::invalid_argument("kernel model: alpha/bias count differs from label_count");
  for (const auto& a : m.alpha)
    if (a.size() != train_states.size()) throw std::invalid_argument("kernel model: alpha length differs from training set");
  for (const auto& s : train_states)
    if (s.n_qubits() != m.n_qubits) throw std::invalid_argument("kernel model: training state qubit count mismatch");
  m.train_states = std::move(train_states);
  return m;
}

}  // namespace eqs::kernel
