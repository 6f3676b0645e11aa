#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "eqs/ingest.hpp"
#include "eqs/simulator.hpp"
#include "test_support.hpp"

using namespace eqs;
using namespace eqs::ingest;
using num::Matrix;

namespace {

// Reference gate matrices written out independently of the parser's table.
Matrix ref_single(const std::string& name, const std::vector<double>& p) {
  const cplx i{0.0, 1.0};
  if (name == "h") return Matrix{{1, 1}, {1, -1}} * cplx{1.0 / std::sqrt(2.0), 0.0};
  if (name == "x") return {{0, 1}, {1, 0}};
  if (name == "y") return {{0, -i}, {i, 0}};
  if (name == "z") return {{1, 0}, {0, -1}};
  if (name == "s") return {{1, 0}, {0, i}};
  if (name == "sdg") return {{1, 0}, {0, -i}};
  if (name == "t") return {{1, 0}, {0, std::exp(i * std::numbers::pi / 4.0)}};
  if (name == "tdg") return {{1, 0}, {0, std::exp(-i * std::numbers::pi / 4.0)}};
  if (name == "rx") return {{std::cos(p[0] / 2), -i * std::sin(p[0] / 2)}, {-i * std::sin(p[0] / 2), std::cos(p[0] / 2)}};
  if (name == "ry") return {{std::cos(p[0] / 2), -std::sin(p[0] / 2)}, {std::sin(p[0] / 2), std::cos(p[0] / 2)}};
  if (name == "rz") return {{std::exp(-i * p[0] / 2.0), 0}, {0, std::exp(i * p[0] / 2.0)}};
  // u3
  return {{std::cos(p[0] / 2), -std::exp(i * p[2]) * std::sin(p[0] / 2)},
          {std::exp(i * p[1]) * std::sin(p[0] / 2), std::exp(i * (p[1] + p[2])) * std::cos(p[0] / 2)}};
}

// Full 2^n operator for one statement, from bit definitions.
Matrix ref_operator(const QasmStatement& st, int n) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix full(dim, dim);
  if (st.name == "cx" || st.name == "cz") {
    const int c = st.qubits[0], t = st.qubits[1];
    for (std::size_t col = 0; col < dim; ++col) {
      const bool cb = (col >> c) & 1, tb = (col >> t) & 1;
      if (st.name == "cx")
        full(cb ? col ^ (std::size_t{1} << t) : col, col) = 1.0;
      else
        full(col, col) = (cb && tb) ? -1.0 : 1.0;
    }
    return full;
  }
  const Matrix g = ref_single(st.name, st.params);
  const int q = st.qubits[0];
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r & ~(std::size_t{1} << q)) == (c & ~(std::size_t{1} << q))) full(r, c) = g((r >> q) & 1, (c >> q) & 1);
  return full;
}

QasmProgram random_program(int n, int len, std::mt19937_64& rng) {
  static const std::vector<std::pair<std::string, int>> one = {
      {"h", 0}, {"x", 0}, {"y", 0}, {"z", 0}, {"s", 0}, {"sdg", 0}, {"t", 0},
      {"tdg", 0}, {"rx", 1}, {"ry", 1}, {"rz", 1}, {"u", 3}, {"u3", 3}};
  std::uniform_int_distribution<int> kind(0, 14), qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-7.0, 7.0);
  QasmProgram p;
  p.n_qubits = n;
  for (int k = 0; k < len; ++k) {
    const int g = kind(rng);
    if (g >= 13 && n >= 2) {
      const int a = qubit(rng);
      int b = qubit(rng);
      while (b == a) b = qubit(rng);
      p.statements.push_back({g == 13 ? "cx" : "cz", {a, b}, {}});
    } else {
      const auto& [name, np] = one[g % 13];
      std::vector<double> params;
      for (int i = 0; i < np; ++i) params.push_back(angle(rng));
      p.statements.push_back({name, {qubit(rng)}, params});
    }
  }
  return p;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(sim::inner_product(a, b)); }

}  // namespace

TEST_CASE("parse_qasm: Bell pair") {
  const auto p = parse_qasm("OPENQASM 2.0; qreg q[2]; h q[0]; cx q[0],q[1];");
  CHECK(p.n_qubits == 2);
  REQUIRE(p.statements.size() == 2);
  CHECK(p.statements[1] == QasmStatement{"cx", {0, 1}, {}});
  const auto s = to_feature_state(p);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s[0] - r) < 1e-15);
  CHECK(std::abs(s[3] - r) < 1e-15);
  CHECK(std::abs(s[1]) < 1e-15);
  CHECK(std::abs(s[2]) < 1e-15);
}

TEST_CASE("parse_qasm: angle arithmetic, comments and whitespace") {
  const auto p = parse_qasm(
      "OPENQASM 2.0;\n// header comment\ninclude \"qelib1.inc\";\nqreg r[3];\n"
      "rz(pi/2) r[0];   // trailing\n  u3( -pi*0.5 , 2*pi/4, -(1.5e-1) ) r[2] ;\nrx(-.25+1) r[1];");
  REQUIRE(p.statements.size() == 3);
  CHECK(p.qreg_name == "r");
  CHECK(p.statements[0].params[0] == doctest::Approx(std::numbers::pi / 2));
  CHECK(p.statements[1].params[0] == doctest::Approx(-std::numbers::pi / 2));
  CHECK(p.statements[1].params[1] == doctest::Approx(std::numbers::pi / 2));
  CHECK(p.statements[1].params[2] == doctest::Approx(-0.15));
  CHECK(p.statements[2].params[0] == doctest::Approx(0.75));
}

TEST_CASE("parse_qasm: positioned errors") {
  auto error_at = [](const std::string& src, int line, int col) {
    try {
      parse_qasm(src);
      FAIL("expected QasmError for: " << src);
    } catch (const QasmError& e) {
      CHECK_MESSAGE(e.line() == line, src << " -> " << e.what());
      CHECK_MESSAGE(e.column() == col, src << " -> " << e.what());
    }
  };
  error_at("OPENQASM 2.0;\nqreg q[2];\nh q[0]\ncx q[0],q[1];", 4, 1);  // missing ';'
  error_at("OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1];", 3, 1);        // unsupported gate
  error_at("OPENQASM 2.0;\nqreg q[2];\nh q[5];", 3, 3);               // operand out of range
  error_at("OPENQASM 2.0;\nqreg q[2];\nqreg r[2];", 3, 1);            // multiple qregs
  error_at("OPENQASM 2.0;\nqreg q[2];\ncreg c[2];", 3, 1);
  error_at("OPENQASM 2.0;\nqreg q[2];\nmeasure q[0] -> c[0];", 3, 1);
  error_at("OPENQASM 3.0;", 1, 10);
  error_at("OPENQASM 2.0;\nqreg q[2];\nrz(1/0) q[0];", 3, 5);
  error_at("OPENQASM 2.0;\nqreg q[2];\ncx q[1],q[1];", 3, 9);
  error_at("OPENQASM 2.0;\nqreg q[2];\nrz q[0];", 3, 1);
  error_at("OPENQASM 2.0;\nqreg q[2];\nh q[0]; @", 3, 9);
}

TEST_CASE("parse_qasm: print / re-parse round trip on 100 random programs") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_program(1 + t % 5, 1 + t % 40, rng);
    const auto back = parse_qasm(to_qasm(p));
    CHECK(back == p);
  }
}

TEST_CASE("parse_qasm: totality under 10^4 mutations") {
  std::mt19937_64 rng(37);
  const std::string alphabet = "OPENQASMqregcxhrzpiu3()[];,.-+*/0123456789 \n\"/e";
  std::size_t parsed = 0, rejected = 0;
  for (int t = 0; t < 10000; ++t) {
    std::string src = to_qasm(random_program(1 + t % 4, 1 + t % 8, rng));
    std::uniform_int_distribution<int> edits(1, 6);
    const int k = edits(rng);
    for (int e = 0; e < k && !src.empty(); ++e) {
      std::uniform_int_distribution<std::size_t> pos(0, src.size() - 1);
      std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
      std::uniform_int_distribution<int> op(0, 3);
      switch (op(rng)) {
        case 0: src.erase(pos(rng), 1); break;
        case 1: src.insert(pos(rng), 1, alphabet[ch(rng)]); break;
        case 2: src[pos(rng)] = alphabet[ch(rng)]; break;
        default: src[pos(rng)] = static_cast<char>(rng() & 0xff); break;
      }
    }
    try {
      parse_qasm(src);
      ++parsed;
    } catch (const QasmError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
      ++rejected;
    }
  }
  CHECK(parsed + rejected == 10000);
}

TEST_CASE("to_feature_state: trivial programs") {
  const auto empty = to_feature_state(parse_qasm("OPENQASM 2.0; qreg q[3];"));
  CHECK(empty[0] == cplx{1.0, 0.0});
  for (std::size_t i = 1; i < empty.dim(); ++i) CHECK(empty[i] == cplx{});

  const auto h = to_feature_state(parse_qasm("OPENQASM 2.0; qreg q[1]; h q[0];"));
  CHECK(std::abs(h[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(h[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("to_feature_state: matches dense unitary product") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 4;
    const auto p = random_program(n, 25, rng);
    std::vector<cplx> ref(std::size_t{1} << n, cplx{});
    ref[0] = 1.0;
    for (const auto& st : p.statements) ref = num::matvec(ref_operator(st, n), ref);
    CHECK(testing::max_abs_diff(testing::to_vec(to_feature_state(p)), ref) < 1e-12);
  }
}

TEST_CASE("append_pauli_rotation realizes exp(i theta G_j) up to phase") {
  std::mt19937_64 rng(43);
  for (std::size_t j = 0; j < sim::kGeneratorCount; ++j) {
    const auto prefix = random_program(3, 12, rng);
    QasmProgram p = prefix;
    const double theta = 0.37 + 0.1 * static_cast<double>(j);
    const int code = static_cast<int>(j) + 1;
    append_pauli_rotation(p, code / 4, code % 4, 2, 0, theta);
    sim::GateParams params{};
    params[j] = theta;
    const auto expected = sim::apply_gate(to_feature_state(prefix), sim::TwoQubitGate::from_params({2, 0}, params));
    CHECK(fidelity(to_feature_state(p), expected) == doctest::Approx(1.0).epsilon(1e-12));
  }
  QasmProgram p;
  p.n_qubits = 2;
  CHECK_THROWS_AS(append_pauli_rotation(p, 0, 0, 0, 1, 0.1), std::invalid_argument);
}

TEST_CASE("generate_clustered_dataset: zero noise gives identical states per label") {
  GeneratorSpec spec{4, 3, 5, 8, 2, 0.0, 3};
  const auto ds = generate_clustered_dataset(spec);
  REQUIRE(ds.items.size() == 15);
  for (const auto& a : ds.items)
    for (const auto& b : ds.items)
      if (a.label == b.label) CHECK(fidelity(to_feature_state(a.program), to_feature_state(b.program)) == doctest::Approx(1.0));
}

TEST_CASE("generate_clustered_dataset: determinism, degenerate label count, errors") {
  GeneratorSpec spec{4, 2, 3, 4, 1, 0.1, 99};
  const auto a = generate_clustered_dataset(spec);
  const auto b = generate_clustered_dataset(spec);
  REQUIRE(a.items.size() == b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) CHECK(to_qasm(a.items[i].program) == to_qasm(b.items[i].program));
  CHECK(dataset_hash(a) == dataset_hash(b));
  spec.seed = 100;
  CHECK(dataset_hash(generate_clustered_dataset(spec)) != dataset_hash(a));

  GeneratorSpec single{4, 1, 3, 4, 1, 0.1, 1};
  const auto one = generate_clustered_dataset(single);
  CHECK(one.items.size() == 3);
  CHECK_THROWS_AS(require_classification(one), std::invalid_argument);
  CHECK_NOTHROW(require_classification(a));

  CHECK_THROWS_AS(generate_clustered_dataset({4, 0, 3, 4, 1, 0.1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate_clustered_dataset({4, 2, 3, 4, 1, -0.1, 1}), std::invalid_argument);
}

TEST_CASE("generate_clustered_dataset: cluster geometry at n=6, L=4, M_l=50") {
  GeneratorSpec spec;  // defaults: n=6, L=4, M_l=50, anchor 20, noise_scale 0.07
  const auto ds = generate_clustered_dataset(spec);
  std::vector<StateVector> states;
  for (const auto& item : ds.items) states.push_back(to_feature_state(item.program));
  double within = 0.0, cross = 0.0;
  std::size_t nw = 0, nc = 0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const double f = fidelity(states[i], states[j]);
      if (ds.items[i].label == ds.items[j].label) {
        within += f;
        ++nw;
      } else {
        cross += f;
        ++nc;
      }
    }
  within /= static_cast<double>(nw);
  cross /= static_cast<double>(nc);
  MESSAGE("within-label mean fidelity " << within << ", cross-label " << cross);
  CHECK(within >= 0.8);
  CHECK(cross <= 0.2);
}

TEST_CASE("anchor separation: zero-noise cross-label overlap near 2^-n") {
  GeneratorSpec spec{6, 12, 1, 20, 1, 0.0, 5};
  const auto ds = generate_clustered_dataset(spec);
  double cross = 0.0;
  std::size_t nc = 0;
  for (std::size_t i = 0; i < ds.items.size(); ++i)
    for (std::size_t j = i + 1; j < ds.items.size(); ++j) {
      cross += fidelity(to_feature_state(ds.items[i].program), to_feature_state(ds.items[j].program));
      ++nc;
    }
  cross /= static_cast<double>(nc);
  MESSAGE("mean cross-label fidelity " << cross << " vs 2^-6 = " << 1.0 / 64);
  CHECK(cross < 4.0 / 64);
}

TEST_CASE("dataset directory round trip and load errors") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "eqs_test_dataset";
  fs::remove_all(dir);
  const auto ds = generate_clustered_dataset({3, 2, 4, 3, 1, 0.2, 8});
  write_dataset(ds, dir);
  const auto back = load_dataset(dir);
  CHECK(back.n_qubits == 3);
  CHECK(back.label_count == 2);
  REQUIRE(back.items.size() == ds.items.size());
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    CHECK(back.items[i].id == ds.items[i].id);
    CHECK(back.items[i].label == ds.items[i].label);
    CHECK(back.items[i].program == ds.items[i].program);
  }
  CHECK(dataset_hash(back) == dataset_hash(ds));

  std::ofstream(dir / "circuits" / (ds.items[1].id + ".qasm")) << "OPENQASM 2.0;\nqreg q[3];\nfoo q[0];\n";
  try {
    load_dataset(dir);
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3, column 1") != std::string::npos);
  }
  CHECK_THROWS_AS(load_dataset(dir / "missing"), std::runtime_error);
  fs::remove_all(dir);
}
