#include "eqs/aqce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "eqs/parallel.hpp"

namespace eqs::aqce {

double phase_align(const Matrix& f, const Matrix& u) {
  const cplx t = (f * u.adjoint()).trace();
  if (t == cplx{}) return 0.0;
  return -std::arg(t);
}

Matrix optimal_gate(const Matrix& f) {
  const auto s = num::svd(f);
  return s.x * s.y;
}

Fidelities circuit_fidelities(const GateCircuit& circuit, std::span<const StateVector> targets) {
  if (targets.empty() || targets.size() > (std::size_t{1} << circuit.n_qubits))
    throw std::invalid_argument("circuit_fidelities: target count must be in [1, 2^n]");
  Fidelities out;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (targets[k].n_qubits() != circuit.n_qubits) throw std::invalid_argument("circuit_fidelities: qubit count mismatch");
    const auto back = sim::run_circuit_adjoint(circuit, targets[k]);
    out.per_k.push_back(std::abs(back[k]));
    out.total += out.per_k.back();
  }
  return out;
}

namespace {

struct Candidate {
  double score = -1.0;
  Matrix gate;
};

std::vector<QubitPair> resolve_pairs(const AqceConfig& cfg, int n) {
  std::vector<QubitPair> pairs = cfg.pairs;
  if (pairs.empty())
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  for (const auto& p : pairs) sim::validate_pair(p, n);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

QubitPair schedule_pair(std::size_t index, int n) {
  const int i = static_cast<int>(index % static_cast<std::size_t>(n - 1));
  return {i, i + 1};
}

void validate(std::span<const StateVector> targets, const AqceConfig& cfg) {
  if (cfg.j0 < 1 || cfg.delta_j < 1 || cfg.sweeps < 1 || cfg.hard_cap < 1)
    throw std::invalid_argument("aqce: J0, dJ, N and the hard cap must be >= 1");
  if (cfg.j_max && *cfg.j_max < cfg.j0) throw std::invalid_argument("aqce: J_max must be >= J0");
  if (targets.empty()) throw std::invalid_argument("aqce: no targets");
  const int n = targets[0].n_qubits();
  if (n < 2) throw std::invalid_argument("aqce: need at least two qubits");
  if (targets.size() > (std::size_t{1} << n)) throw std::invalid_argument("aqce: more targets than basis states");
  if (!cfg.f_target.empty() && cfg.f_target.size() != targets.size())
    throw std::invalid_argument("aqce: f_target must have one entry per target");
  auto check_target = [](double f) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("aqce: targets fidelities must be in (0, 1]");
  };
  check_target(cfg.default_target);
  for (double f : cfg.f_target) check_target(f);
  for (std::size_t a = 0; a < targets.size(); ++a) {
    if (targets[a].n_qubits() != n) throw std::invalid_argument("aqce: qubit count mismatch among targets");
    for (std::size_t b = a; b < targets.size(); ++b) {
      const double expect = a == b ? 1.0 : 0.0;
      if (std::abs(sim::inner_product(targets[a], targets[b]) - expect) > 1e-6)
        throw std::invalid_argument("aqce: targets are not orthonormal");
    }
  }
}

class Synthesizer {
 public:
  Synthesizer(std::span<const StateVector> targets, const AqceConfig& cfg)
      : targets_(targets), n_(targets[0].n_qubits()), pairs_(resolve_pairs(cfg, n_)) {
    for (std::size_t k = 0; k < targets.size(); ++k)
      goal_.push_back(cfg.f_target.empty() ? cfg.default_target : cfg.f_target[k]);
  }

  bool reached(const std::vector<double>& f) const {
    for (std::size_t k = 0; k < f.size(); ++k)
      if (f[k] < goal_[k]) return false;
    return true;
  }

  // One pass m = 0..J-1; returns fidelities after the last update.
  std::vector<double> sweep(GateCircuit& c, int sweep_index, AqceTrace& trace) const {
    const std::size_t kk = targets_.size(), j = c.gates.size();
    // bras[m][k] = U_{m+1} ... U_{J-1} |k>
    std::vector<std::vector<StateVector>> bras(j);
    for (std::size_t k = 0; k < kk; ++k) {
      StateVector b = StateVector::basis(n_, k);
      for (std::size_t m = j; m-- > 0;) {
        bras[m].push_back(b);
        if (m > 0) b = sim::apply_gate(std::move(b), c.gates[m]);
      }
    }
    std::vector<StateVector> kets(targets_.begin(), targets_.end());
    std::vector<double> fid(kk, 0.0);

    for (std::size_t m = 0; m < j; ++m) {
      const Matrix u_old_dag = c.gates[m].matrix().adjoint();
      std::vector<sim::BraKet> bk;
      for (std::size_t k = 0; k < kk; ++k) bk.push_back({&bras[m][k], &kets[k]});

      std::vector<Candidate> cand(pairs_.size());
      parallel_for(pairs_.size(), [&](std::size_t p) {
        const auto env = sim::environment_tensor(bk, pairs_[p]);
        Matrix combined(4, 4);
        for (std::size_t k = 0; k < kk; ++k) {
          const cplx t = (env[k] * u_old_dag).trace();
          const double theta = t == cplx{} ? 0.0 : -std::arg(t);
          combined += env[k] * std::polar(1.0, theta);
        }
        const auto s = num::svd(combined);
        double score = 0.0;
        for (double d : s.d) score += d;
        cand[p] = {score, s.x * s.y};
      });
      std::size_t best = 0;
      for (std::size_t p = 1; p < cand.size(); ++p)
        if (cand[p].score > cand[best].score) best = p;

      c.gates[m].reset(pairs_[best], cand[best].gate);
      const Matrix u_new_dag = cand[best].gate.adjoint();
      UpdateRecord rec{sweep_index, static_cast<int>(m), pairs_[best], {}, 0.0};
      for (std::size_t k = 0; k < kk; ++k) {
        sim::apply_matrix(kets[k], u_new_dag, pairs_[best]);
        fid[k] = std::abs(sim::inner_product(bras[m][k], kets[k]));
        rec.total += fid[k];
      }
      rec.fidelities = fid;
      trace.updates.push_back(std::move(rec));
    }
    return fid;
  }

  int n() const { return n_; }

 private:
  std::span<const StateVector> targets_;
  int n_;
  std::vector<QubitPair> pairs_;
  std::vector<double> goal_;
};

}  // namespace

AqceResult synthesize_isometry(std::span<const StateVector> targets, const AqceConfig& cfg) {
  validate(targets, cfg);
  Synthesizer syn(targets, cfg);
  const int n = syn.n();
  const int budget = std::min(cfg.j_max.value_or(std::numeric_limits<int>::max()), cfg.hard_cap);

  AqceResult res;
  res.circuit.n_qubits = n;
  std::size_t placed = 0;
  auto grow = [&](int count) {
    for (int g = 0; g < count; ++g) res.circuit.gates.push_back(sim::TwoQubitGate::identity(schedule_pair(placed++, n)));
  };
  grow(std::min(cfg.j0, budget));

  res.fidelities = circuit_fidelities(res.circuit, targets).per_k;
  if (syn.reached(res.fidelities)) {
    res.converged = true;
    return res;
  }
  for (;;) {
    for (int s = 0; s < cfg.sweeps; ++s) {
      res.fidelities = syn.sweep(res.circuit, ++res.sweeps_run, res.trace);
      if (syn.reached(res.fidelities)) {
        res.converged = true;
        return res;
      }
    }
    if (static_cast<int>(res.circuit.gates.size()) + cfg.delta_j > budget) return res;
    grow(cfg.delta_j);
  }
}

std::string trace_csv(const AqceTrace& trace) {
  std::ostringstream os;
  os << "update_index,sweep,m,pair,F_total";
  const std::size_t kk = trace.updates.empty() ? 0 : trace.updates[0].fidelities.size();
  for (std::size_t k = 0; k < kk; ++k) os << ",F_" << k;
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.updates.size(); ++i) {
    const auto& u = trace.updates[i];
    std::snprintf(buf, sizeof buf, "%.17g", u.total);
    os << i << "," << u.sweep << "," << u.m << "," << u.pair.first << "-" << u.pair.second << "," << buf;
    for (double f : u.fidelities) {
      std::snprintf(buf, sizeof buf, ",%.17g", f);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::string heatmap_csv(const GateCircuit& circuit) {
  std::ostringstream os;
  os << "position,qubit_a,qubit_b,frobenius_distance\n";
  char buf[64];
  for (std::size_t m = 0; m < circuit.gates.size(); ++m) {
    const auto& g = circuit.gates[m];
    std::snprintf(buf, sizeof buf, "%.17g", (g.matrix() - Matrix::identity(4)).frobenius_norm());
    os << m << "," << g.pair().first << "," << g.pair().second << "," << buf << "\n";
  }
  return os.str();
}

}  // namespace eqs::aqce
