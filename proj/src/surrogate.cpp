#include "eqs/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "eqs/circuit_io.hpp"
#include "eqs/parallel.hpp"

namespace eqs::surrogate {

using num::Matrix;

namespace {

constexpr double kClamp = 1e-12;
constexpr std::size_t kChunks = 32;  // fixed so sums do not depend on thread count

double expectation(std::span<const double> eigenvalues, const StateVector& phi) {
  double f = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) f += eigenvalues[k] * std::norm(phi[k]);
  return f;
}

GateParams gate_theta(const ParameterizedEQS& p, std::size_t m) {
  GateParams g;
  std::copy_n(p.theta.begin() + static_cast<std::ptrdiff_t>(m * sim::kGeneratorCount), sim::kGeneratorCount, g.begin());
  return g;
}

// Directional derivatives dU/dtheta_j of U = exp(iH), H = sum theta_j G_j.
std::array<Matrix, sim::kGeneratorCount> exp_derivatives(const GateParams& theta) {
  Matrix h(4, 4);
  const auto& gens = sim::pauli_generators();
  for (std::size_t j = 0; j < sim::kGeneratorCount; ++j) h += gens[j] * cplx{theta[j], 0.0};
  const auto e = num::eigh(num::HermitianMatrix(h));
  const Matrix& v = e.vectors;
  Matrix l(4, 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      // (e^{i h_a} - e^{i h_b}) / (i (h_a - h_b)), written to stay stable as h_a -> h_b
      const double d = e.values[a] - e.values[b];
      const double sinc = std::abs(d) < 1e-8 ? 1.0 - d * d / 24.0 : std::sin(d / 2) / (d / 2);
      l(a, b) = std::polar(sinc, (e.values[a] + e.values[b]) / 2);
    }
  std::array<Matrix, sim::kGeneratorCount> out;
  const Matrix vd = v.adjoint();
  for (std::size_t j = 0; j < sim::kGeneratorCount; ++j) {
    Matrix inner = vd * gens[j] * v;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) inner(a, b) *= cplx{0.0, 1.0} * l(a, b);
    out[j] = v * inner * vd;
  }
  return out;
}

struct Weights {
  double pos = 0.0;  // weight on y = 1 terms: M_{!=l} / M
  double neg = 0.0;  // weight on y = 0 terms: M_l / M
  double m = 0.0;
};

Weights class_weights(std::span<const int> labels, int label) {
  if (labels.empty()) throw std::invalid_argument("loss: empty batch");
  const double m = static_cast<double>(labels.size());
  const double ml = static_cast<double>(std::count(labels.begin(), labels.end(), label));
  return {(m - ml) / m, ml / m, m};
}

// Per-item loss term and dL/df.
std::pair<double, double> item_terms(double f, bool positive, const Weights& w) {
  const double raw = 1.0 / (1.0 + std::exp(-f));
  const double p = std::clamp(raw, kClamp, 1.0 - kClamp);
  const bool clamped = p != raw;
  if (positive) return {-w.pos * std::log(p) / w.m, clamped ? 0.0 : -w.pos * (1.0 - p) / w.m};
  return {-w.neg * std::log(1.0 - p) / w.m, clamped ? 0.0 : w.neg * p / w.m};
}

void check_inputs(const ParameterizedEQS& p, std::span<const StateVector> states, std::span<const int> labels) {
  if (states.size() != labels.size()) throw std::invalid_argument("loss: states and labels differ in length");
  if (states.empty()) throw std::invalid_argument("loss: empty batch");
  if (p.theta.size() != p.pairs.size() * sim::kGeneratorCount) throw std::invalid_argument("loss: theta size mismatch");
  for (const auto& s : states)
    if (s.n_qubits() != p.n_qubits) throw std::invalid_argument("loss: qubit count mismatch");
}

}  // namespace

double decision(const GateCircuit& circuit, std::span<const double> eigenvalues, double bias, const StateVector& x) {
  if (x.n_qubits() != circuit.n_qubits) throw std::invalid_argument("decision: qubit count mismatch");
  return expectation(eigenvalues, sim::run_circuit_adjoint(circuit, x)) + bias;
}

kernel::Prediction predict_eqs(const EQSModel& model, const StateVector& x) {
  if (x.n_qubits() != model.n_qubits) throw std::invalid_argument("predict_eqs: qubit count mismatch");
  kernel::Prediction p;
  for (const auto& l : model.labels) p.decisions.push_back(decision(l.circuit, l.eigenvalues, l.bias, x));
  p.label = kernel::argmax_label(p.decisions);
  return p;
}

GateParams recover_gate_params(const Matrix& u) {
  const Matrix h = num::log_unitary(u);
  const auto& gens = sim::pauli_generators();
  GateParams theta{};
  for (std::size_t j = 0; j < sim::kGeneratorCount; ++j) theta[j] = (gens[j] * h).trace().real() / 4.0;
  return theta;
}

ParameterizedEQS recover_params(const LabelSurrogate& s) {
  ParameterizedEQS p;
  p.n_qubits = s.circuit.n_qubits;
  p.eigenvalues = s.eigenvalues;
  p.bias = s.bias;
  for (const auto& g : s.circuit.gates) {
    p.pairs.push_back(g.pair());
    const auto t = recover_gate_params(g.matrix());
    p.theta.insert(p.theta.end(), t.begin(), t.end());
  }
  return p;
}

GateCircuit build_circuit(const ParameterizedEQS& p) {
  GateCircuit c{p.n_qubits, {}};
  for (std::size_t m = 0; m < p.gate_count(); ++m) c.gates.push_back(sim::TwoQubitGate::from_params(p.pairs[m], gate_theta(p, m)));
  return c;
}

double decision(const ParameterizedEQS& p, const StateVector& x) {
  return decision(build_circuit(p), p.eigenvalues, p.bias, x);
}

double loss(const ParameterizedEQS& p, std::span<const StateVector> states, std::span<const int> labels, int label) {
  check_inputs(p, states, labels);
  const Weights w = class_weights(labels, label);
  const GateCircuit c = build_circuit(p);
  std::vector<double> terms(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    terms[i] = item_terms(decision(c, p.eigenvalues, p.bias, states[i]), labels[i] == label, w).first;
  });
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

LossAndGradient loss_gradient(const ParameterizedEQS& p, std::span<const StateVector> states,
                              std::span<const int> labels, int label) {
  check_inputs(p, states, labels);
  const Weights w = class_weights(labels, label);
  const GateCircuit c = build_circuit(p);
  const std::size_t j = c.gates.size(), n = states.size();

  // Per chunk: loss and sum over items of (dL/df) * E_m, E_m the environment
  // of gate m between bra w_m and ket a_m.
  struct Acc {
    double loss = 0.0;
    std::vector<Matrix> env;
  };
  const std::size_t chunks = std::min(kChunks, n);
  std::vector<Acc> acc(chunks);
  parallel_for(chunks, [&](std::size_t ch) {
    Acc& a = acc[ch];
    a.env.assign(j, Matrix(4, 4));
    std::vector<StateVector> fwd(j + 1);
    for (std::size_t i = ch * n / chunks; i < (ch + 1) * n / chunks; ++i) {
      fwd[0] = states[i];
      for (std::size_t m = 0; m < j; ++m) {
        fwd[m + 1] = fwd[m];
        sim::apply_matrix(fwd[m + 1], c.gates[m].matrix().adjoint(), c.gates[m].pair());
      }
      const StateVector& phi = fwd[j];
      const auto [term, dldf] = item_terms(expectation(p.eigenvalues, phi) + p.bias, labels[i] == label, w);
      a.loss += term;
      if (dldf == 0.0) continue;
      // w = O phi, pulled back through the gates after m
      StateVector back(p.n_qubits);
      for (std::size_t k = 0; k < back.dim(); ++k)
        back[k] = k < p.eigenvalues.size() ? p.eigenvalues[k] * phi[k] : cplx{};
      for (std::size_t m = j; m-- > 0;) {
        const sim::BraKet bk{&back, &fwd[m]};
        a.env[m] += sim::environment_tensor(std::span(&bk, 1), c.gates[m].pair())[0] * cplx{dldf, 0.0};
        if (m > 0) sim::apply_matrix(back, c.gates[m].matrix(), c.gates[m].pair());
      }
    }
  });

  LossAndGradient out;
  out.grad.assign(p.theta.size(), 0.0);
  std::vector<Matrix> env(j, Matrix(4, 4));
  for (const auto& a : acc) {
    out.loss += a.loss;
    for (std::size_t m = 0; m < j; ++m) env[m] += a.env[m];
  }
  parallel_for(j, [&](std::size_t m) {
    const auto du = exp_derivatives(gate_theta(p, m));
    for (std::size_t g = 0; g < sim::kGeneratorCount; ++g)
      out.grad[m * sim::kGeneratorCount + g] = 2.0 * (env[m] * du[g].adjoint()).trace().real();
  });
  return out;
}

GradientReport gradient_experiment(const ParameterizedEQS& p, int label, std::span<const StateVector> states,
                                   std::span<const int> labels, const GradientExperimentConfig& cfg) {
  if (states.empty()) throw std::invalid_argument("gradient_experiment: empty evaluation set");
  if (cfg.random_seeds < 1) throw std::invalid_argument("gradient_experiment: need at least one random seed");
  auto sum_sq = [&](const ParameterizedEQS& q) {
    const auto g = loss_gradient(q, states, labels, label).grad;
    return std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
  };
  GradientReport r;
  r.label = label;
  r.sum_sq_eqs = sum_sq(p);
  for (int s = 0; s < cfg.random_seeds; ++s) {
    ParameterizedEQS q = p;
    if (!cfg.control) {
      std::mt19937_64 rng(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(label) + static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      for (auto& t : q.theta) t = angle(rng);
    }
    r.sum_sq_random.push_back(sum_sq(q));
  }
  const double n = static_cast<double>(r.sum_sq_random.size());
  r.random_mean = std::accumulate(r.sum_sq_random.begin(), r.sum_sq_random.end(), 0.0) / n;
  double var = 0.0;
  for (double v : r.sum_sq_random) var += (v - r.random_mean) * (v - r.random_mean);
  r.random_std = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  r.ratio = r.random_mean > 0.0 ? r.sum_sq_eqs / r.random_mean : std::numeric_limits<double>::infinity();
  return r;
}

AdamResult adam_train(const ParameterizedEQS& init, std::span<const StateVector> states, std::span<const int> labels,
                      int label, const AdamConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("adam: steps must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("adam: batch size must be >= 1");
  check_inputs(init, states, labels);
  AdamResult r;
  r.params = init;
  r.initial_loss = loss(init, states, labels, label);
  const std::size_t n = states.size(), batch = std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::size_t cursor = n;  // forces a shuffle before the first batch
  std::vector<double> m1(init.theta.size(), 0.0), m2(init.theta.size(), 0.0);
  std::vector<StateVector> bs;
  std::vector<int> bl;
  for (int t = 1; t <= cfg.steps; ++t) {
    bs.clear();
    bl.clear();
    while (bs.size() < batch) {
      if (cursor == n) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      bs.push_back(states[order[cursor]]);
      bl.push_back(labels[order[cursor]]);
      ++cursor;
    }
    const auto lg = loss_gradient(r.params, bs, bl, label);
    r.loss_trace.push_back(lg.loss);
    const double c1 = 1.0 - std::pow(cfg.beta1, t), c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < m1.size(); ++i) {
      const double g = lg.grad[i];
      m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * g;
      m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * g * g;
      r.params.theta[i] -= cfg.alpha * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + cfg.eps);
    }
  }
  r.final_loss = loss(r.params, states, labels, label);
  return r;
}

nlohmann::json eqs_model_to_json(const EQSModel& model) {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : model.labels)
    labels.push_back({{"eigenvalues", l.eigenvalues},
                      {"bias", l.bias},
                      {"converged", l.converged},
                      {"fidelities", l.fidelities},
                      {"circuit", sim::circuit_to_json(l.circuit)}});
  return {{"n_qubits", model.n_qubits}, {"labels", labels}};
}

EQSModel eqs_model_from_json(const nlohmann::json& j) {
  EQSModel m;
  try {
    m.n_qubits = j.at("n_qubits").get<int>();
    for (const auto& e : j.at("labels")) {
      LabelSurrogate s;
      s.eigenvalues = e.at("eigenvalues").get<std::vector<double>>();
      s.bias = e.at("bias").get<double>();
      s.converged = e.at("converged").get<bool>();
      s.fidelities = e.at("fidelities").get<std::vector<double>>();
      s.circuit = sim::circuit_from_json(e.at("circuit"));
      if (s.circuit.n_qubits != m.n_qubits) throw std::invalid_argument("eqs model: circuit qubit count mismatch");
      if (s.eigenvalues.size() > (std::size_t{1} << m.n_qubits))
        throw std::invalid_argument("eqs model: more eigenvalues than basis states");
      m.labels.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("eqs model: ") + e.what());
  }
  return m;
}

}  // namespace eqs::surrogate
