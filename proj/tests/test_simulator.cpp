#include <doctest.h>

#include <cmath>
#include <random>

#include "eqs/circuit_io.hpp"
#include "eqs/simulator.hpp"
#include "test_support.hpp"

using namespace eqs;
using namespace eqs::sim;
using testing::random_state;
using testing::random_unitary;

namespace {

// Dense embedding computed straight from the index definition.
Matrix dense_embed(const Matrix& m, QubitPair p, int n) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = (std::size_t{1} << p.first) | (std::size_t{1} << p.second);
  auto local = [&](std::size_t idx) { return 2 * ((idx >> p.first) & 1) + ((idx >> p.second) & 1); };
  Matrix full(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r & ~mask) == (c & ~mask)) full(r, c) = m(local(r), local(c));
  return full;
}

QubitPair random_pair(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> q(0, n - 1);
  const int a = q(rng);
  int b = q(rng);
  while (b == a) b = q(rng);
  return {a, b};
}

GateCircuit random_circuit(int n, int j, std::mt19937_64& rng) {
  GateCircuit c{n, {}};
  for (int i = 0; i < j; ++i) c.gates.emplace_back(random_pair(n, rng), random_unitary(4, rng));
  return c;
}

}  // namespace

TEST_CASE("apply_gate: CNOT on |01>") {
  // |q1 q0> = |01> is basis index 1
  const auto out = apply_gate(StateVector::basis(2, 1), TwoQubitGate({0, 1}, cnot()));
  CHECK(std::abs(out[3] - 1.0) < 1e-15);
  CHECK(std::abs(out[1]) < 1e-15);
}

TEST_CASE("apply_gate: identity is bit-exact") {
  std::mt19937_64 rng(2);
  const auto s = random_state(4, rng);
  const auto out = apply_gate(s, TwoQubitGate::identity({3, 1}));
  for (std::size_t i = 0; i < s.dim(); ++i) CHECK(out[i] == s[i]);
}

TEST_CASE("apply_gate: matches dense embedding") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_state(3, rng);
    const QubitPair p = random_pair(3, rng);
    const Matrix u = random_unitary(4, rng);
    const auto out = apply_gate(s, TwoQubitGate(p, u));
    const auto ref = num::matvec(dense_embed(u, p, 3), s.amplitudes());
    CHECK(testing::max_abs_diff(testing::to_vec(out), ref) < 1e-13);
  }
}

TEST_CASE("apply_gate: errors") {
  CHECK_THROWS_AS(apply_gate(StateVector(2), TwoQubitGate::identity({0, 2})), std::invalid_argument);
  CHECK_THROWS_AS(TwoQubitGate::identity({1, 1}), std::invalid_argument);
}

TEST_CASE("run_circuit: empty circuit and single Hadamard gate") {
  std::mt19937_64 rng(6);
  const auto s = random_state(3, rng);
  const auto same = run_circuit(GateCircuit{3, {}}, s);
  for (std::size_t i = 0; i < s.dim(); ++i) CHECK(same[i] == s[i]);

  GateCircuit c{2, {}};
  c.gates.emplace_back(QubitPair{0, 1}, num::kron(hadamard(), Matrix::identity(2)));
  const auto out = run_circuit(c, StateVector(2));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(out[0] - r) < 1e-15);
  CHECK(std::abs(out[1] - r) < 1e-15);
  CHECK(std::abs(out[2]) < 1e-15);
  CHECK(std::abs(out[3]) < 1e-15);
}

TEST_CASE("run_circuit: J=3 matches dense product U1 U2 U3") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_circuit(4, 3, rng);
    const auto s = random_state(4, rng);
    Matrix dense = Matrix::identity(16);
    for (const auto& g : c.gates) dense = dense * dense_embed(g.matrix(), g.pair(), 4);
    const auto ref = num::matvec(dense, s.amplitudes());
    CHECK(testing::max_abs_diff(testing::to_vec(run_circuit(c, s)), ref) < 1e-12);
    // adjoint inverts
    const auto back = run_circuit_adjoint(c, run_circuit(c, s));
    CHECK(testing::max_abs_diff(testing::to_vec(back), testing::to_vec(s)) < 1e-12);
  }
  CHECK_THROWS_AS(run_circuit(GateCircuit{3, {}}, StateVector(2)), std::invalid_argument);
}

TEST_CASE("composition follows the product convention") {
  std::mt19937_64 rng(9);
  const TwoQubitGate g1({0, 2}, random_unitary(4, rng));
  const TwoQubitGate g2({1, 2}, random_unitary(4, rng));
  const auto s = random_state(3, rng);
  GateCircuit c{3, {g1, g2}};
  const auto lhs = run_circuit(c, s);
  const auto rhs = apply_gate(apply_gate(s, g2), g1);
  CHECK(testing::max_abs_diff(testing::to_vec(lhs), testing::to_vec(rhs)) < 1e-14);
}

TEST_CASE("norm preservation over 1000 random gates") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 4;
    const auto out = apply_gate(random_state(n, rng), TwoQubitGate(random_pair(n, rng), random_unitary(4, rng)));
    CHECK(std::abs(out.norm() - 1.0) <= 1e-10);
  }
}

TEST_CASE("inner_product") {
  std::mt19937_64 rng(12);
  const auto psi = random_state(5, rng);
  CHECK(std::abs(inner_product(psi, psi) - 1.0) < 1e-14);

  const auto h0 = apply_gate(StateVector(2), TwoQubitGate({0, 1}, num::kron(hadamard(), Matrix::identity(2))));
  CHECK(std::abs(inner_product(StateVector(2), h0) - 1.0 / std::sqrt(2.0)) < 1e-15);

  for (int t = 0; t < 20; ++t) {
    const auto a = random_state(6, rng);
    const auto b = random_state(6, rng);
    long double re = 0.0L, im = 0.0L;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const long double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
      re += ar * br + ai * bi;
      im += ar * bi - ai * br;
    }
    const cplx got = inner_product(a, b);
    CHECK(std::abs(got.real() - static_cast<double>(re)) <= 1e-12);
    CHECK(std::abs(got.imag() - static_cast<double>(im)) <= 1e-12);
  }
  CHECK_THROWS_AS(inner_product(StateVector(2), StateVector(3)), std::invalid_argument);
}

TEST_CASE("environment_tensor: product state") {
  const StateVector z(2);
  const std::vector<BraKet> t = {{&z, &z}};
  const auto f = environment_tensor(t, {0, 1});
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(std::abs(f[0](a, b) - ((a == 0 && b == 0) ? 1.0 : 0.0)) < 1e-15);
}

TEST_CASE("environment_tensor: matches dense partial trace; trace identity") {
  std::mt19937_64 rng(14);
  const int n = 4;
  for (int t = 0; t < 10; ++t) {
    const auto bra = random_state(n, rng);
    const auto ket = random_state(n, rng);
    const QubitPair p = random_pair(n, rng);
    const std::vector<BraKet> tk = {{&bra, &ket}};
    const Matrix f = environment_tensor(tk, p)[0];

    // dense |ket><bra| then trace out everything except p
    Matrix ref(4, 4);
    const std::size_t mask = (std::size_t{1} << p.first) | (std::size_t{1} << p.second);
    auto local = [&](std::size_t idx) { return 2 * ((idx >> p.first) & 1) + ((idx >> p.second) & 1); };
    for (std::size_t r = 0; r < 16; ++r)
      for (std::size_t c = 0; c < 16; ++c)
        if ((r & ~mask) == (c & ~mask)) ref(local(r), local(c)) += ket[r] * std::conj(bra[c]);
    CHECK((f - ref).frobenius_norm() < 1e-13);
    CHECK(std::abs(f.trace() - inner_product(bra, ket)) < 1e-13);
  }
  const StateVector z(2);
  const std::vector<BraKet> tk = {{&z, &z}};
  CHECK_THROWS_AS(environment_tensor(tk, {0, 0}), std::invalid_argument);
}

TEST_CASE("environment/trace duality: |Tr[F_m U_m^dagger]| == |<0|C^dagger|Psi>|") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 3;
    const auto c = random_circuit(n, 4, rng);
    const auto target = random_state(n, rng);
    const cplx direct = inner_product(StateVector(n), run_circuit_adjoint(c, target));
    for (std::size_t m = 0; m < c.gates.size(); ++m) {
      // With C = U_1 ... U_J the gate m sits between U_{m-1}^dagger ... U_1^dagger |Psi>
      // on the ket side and U_{m+1} ... U_J |0> on the bra side.
      StateVector psi = target;
      for (std::size_t j = 0; j < m; ++j) apply_matrix(psi, c.gates[j].matrix().adjoint(), c.gates[j].pair());
      StateVector phi(n);
      for (std::size_t j = c.gates.size(); j-- > m + 1;) apply_matrix(phi, c.gates[j].matrix(), c.gates[j].pair());
      const std::vector<BraKet> tk = {{&phi, &psi}};
      const Matrix f = environment_tensor(tk, c.gates[m].pair())[0];
      CHECK(std::abs(std::abs((f * c.gates[m].matrix().adjoint()).trace()) - std::abs(direct)) <= 1e-10);
    }
  }
}

TEST_CASE("Pauli generator basis") {
  const auto& g = pauli_generators();
  CHECK(generator_name(0) == "IX");
  CHECK(generator_name(4) == "XX");
  CHECK(generator_name(14) == "ZZ");
  for (std::size_t i = 0; i < kGeneratorCount; ++i) {
    CHECK(std::abs(g[i].trace()) < 1e-15);
    for (std::size_t j = 0; j < kGeneratorCount; ++j)
      CHECK(std::abs((g[i] * g[j]).trace() - (i == j ? 4.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("parameterized gates are unitary and match their parameters") {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    GateParams p{};
    for (auto& v : p) v = d(rng);
    const auto gate = TwoQubitGate::from_params({0, 1}, p);
    CHECK(num::unitarity_error(gate.matrix()) <= 1e-10);
    CHECK_NOTHROW(TwoQubitGate({0, 1}, gate.matrix(), p));
  }
  GateParams p{};
  p[4] = 0.3;  // XX
  const Matrix xx = pauli_generators()[4];
  const Matrix expected = Matrix::identity(4) * cplx{std::cos(0.3), 0.0} + xx * cplx{0.0, std::sin(0.3)};
  CHECK((unitary_from_params(p) - expected).frobenius_norm() < 1e-12);
  CHECK_THROWS_AS(TwoQubitGate({0, 1}, Matrix::identity(4), p), std::invalid_argument);
}

TEST_CASE("circuit JSON round trip is lossless") {
  std::mt19937_64 rng(18);
  std::normal_distribution<double> d(0.0, 1.0);
  GateCircuit c = random_circuit(4, 5, rng);
  GateParams p{};
  for (auto& v : p) v = d(rng);
  c.gates.push_back(TwoQubitGate::from_params({2, 3}, p));
  const auto text = circuit_to_json(c).dump();
  const auto back = circuit_from_json(nlohmann::json::parse(text));
  REQUIRE(back.gates.size() == c.gates.size());
  CHECK(back.n_qubits == 4);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    CHECK(back.gates[i].pair() == c.gates[i].pair());
    CHECK((back.gates[i].matrix() - c.gates[i].matrix()).frobenius_norm() <= 1e-15);
    CHECK(back.gates[i].params().has_value() == c.gates[i].params().has_value());
  }
  CHECK(*back.gates.back().params() == p);

  auto bad = circuit_to_json(c);
  bad["gates"][0]["pair"] = {0, 7};
  CHECK_THROWS_AS(circuit_from_json(bad), std::invalid_argument);
}
