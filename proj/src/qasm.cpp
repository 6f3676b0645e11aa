#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>

#include "eqs/ingest.hpp"
#include "eqs/simulator.hpp"

namespace eqs::ingest {

QasmError::QasmError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct GateSpec {
  int qubits;
  int params;
};

const std::map<std::string, GateSpec, std::less<>>& gate_table() {
  static const std::map<std::string, GateSpec, std::less<>> table = {
      {"h", {1, 0}},  {"x", {1, 0}},  {"y", {1, 0}},  {"z", {1, 0}},   {"s", {1, 0}},
      {"sdg", {1, 0}}, {"t", {1, 0}}, {"tdg", {1, 0}}, {"rx", {1, 1}}, {"ry", {1, 1}},
      {"rz", {1, 1}}, {"u", {1, 3}},  {"u3", {1, 3}},  {"cx", {2, 0}}, {"cz", {2, 0}},
  };
  return table;
}

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

constexpr int kMaxQubits = 24;
constexpr int kMaxExprDepth = 64;

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    const int line = line_, col = col_;
    if (pos_ >= src_.size()) return {Tok::End, "", line, col};
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) advance();
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
      return {Tok::Number, std::string(src_.substr(start, pos_ - start)), line, col};
    }
    if (c == '"') {
      advance();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
      if (pos_ >= src_.size() || src_[pos_] != '"') throw QasmError(line, col, "unterminated string");
      std::string text(src_.substr(start, pos_ - start));
      advance();
      return {Tok::String, std::move(text), line, col};
    }
    static constexpr std::string_view kPunct = ";,()[]+-*/";
    if (kPunct.find(c) != std::string_view::npos) {
      advance();
      return {Tok::Punct, std::string(1, c), line, col};
    }
    throw QasmError(line, col, std::string("unexpected character '") + (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "?") + "'");
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  QasmProgram parse() {
    expect_ident("OPENQASM");
    if (tok_.kind != Tok::Number || tok_.text != "2.0") fail("expected version 2.0");
    consume();
    expect_punct(";");

    QasmProgram prog;
    bool have_qreg = false;
    bool have_gate = false;
    while (tok_.kind != Tok::End) {
      if (tok_.kind != Tok::Ident) fail("expected a statement");
      const Token head = tok_;
      if (head.text == "include") {
        if (have_qreg || have_gate) fail("include must precede the register declaration");
        consume();
        if (tok_.kind != Tok::String) fail("expected include file name");
        if (tok_.text != "qelib1.inc") fail("only qelib1.inc may be included");
        consume();
        expect_punct(";");
      } else if (head.text == "qreg") {
        if (have_qreg) fail("multiple qreg declarations are not supported");
        consume();
        if (tok_.kind != Tok::Ident) fail("expected register name");
        prog.qreg_name = tok_.text;
        consume();
        expect_punct("[");
        const int size = parse_int();
        if (size < 1 || size > kMaxQubits) fail_at(head, "register size must be in [1, " + std::to_string(kMaxQubits) + "]");
        prog.n_qubits = size;
        expect_punct("]");
        expect_punct(";");
        have_qreg = true;
      } else if (head.text == "creg" || head.text == "measure") {
        fail("'" + head.text + "' is not supported: models use exact expectation values");
      } else {
        const auto& table = gate_table();
        const auto it = table.find(head.text);
        if (it == table.end()) fail("unsupported gate '" + head.text + "'");
        if (!have_qreg) fail("gate before qreg declaration");
        consume();
        prog.statements.push_back(parse_gate(head, it->second, prog));
        have_gate = true;
      }
    }
    if (!have_qreg) fail("missing qreg declaration");
    return prog;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw QasmError(tok_.line, tok_.col, what); }
  [[noreturn]] void fail_at(const Token& t, const std::string& what) const { throw QasmError(t.line, t.col, what); }

  void consume() { tok_ = lex_.next(); }

  bool is_punct(std::string_view p) const { return tok_.kind == Tok::Punct && tok_.text == p; }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    consume();
  }

  void expect_ident(std::string_view name) {
    if (tok_.kind != Tok::Ident || tok_.text != name) fail("expected '" + std::string(name) + "'");
    consume();
  }

  int parse_int() {
    if (tok_.kind != Tok::Number) fail("expected an integer");
    int v = 0;
    const auto* first = tok_.text.data();
    const auto* last = first + tok_.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail("invalid integer '" + tok_.text + "'");
    consume();
    return v;
  }

  QasmStatement parse_gate(const Token& head, GateSpec spec, const QasmProgram& prog) {
    QasmStatement st;
    st.name = head.text;
    if (is_punct("(")) {
      consume();
      if (!is_punct(")")) {
        st.params.push_back(parse_expr(0));
        while (is_punct(",")) {
          consume();
          st.params.push_back(parse_expr(0));
        }
      }
      expect_punct(")");
    }
    if (static_cast<int>(st.params.size()) != spec.params)
      fail_at(head, "gate '" + st.name + "' takes " + std::to_string(spec.params) + " parameter(s)");

    std::set<int> seen;
    for (;;) {
      const Token at = tok_;
      if (tok_.kind != Tok::Ident) fail("expected qubit operand");
      if (tok_.text != prog.qreg_name) fail("unknown register '" + tok_.text + "'");
      consume();
      expect_punct("[");
      const int q = parse_int();
      expect_punct("]");
      if (q < 0 || q >= prog.n_qubits) fail_at(at, "qubit index " + std::to_string(q) + " out of range");
      if (!seen.insert(q).second) fail_at(at, "repeated qubit operand");
      st.qubits.push_back(q);
      if (!is_punct(",")) break;
      consume();
    }
    if (static_cast<int>(st.qubits.size()) != spec.qubits)
      fail_at(head, "gate '" + st.name + "' acts on " + std::to_string(spec.qubits) + " qubit(s)");
    expect_punct(";");
    return st;
  }

  double parse_expr(int depth) {
    double v = parse_term(depth);
    while (is_punct("+") || is_punct("-")) {
      const bool plus = is_punct("+");
      consume();
      const double r = parse_term(depth);
      v = plus ? v + r : v - r;
    }
    return v;
  }

  double parse_term(int depth) {
    double v = parse_unary(depth);
    while (is_punct("*") || is_punct("/")) {
      const bool mul = is_punct("*");
      const Token op = tok_;
      consume();
      const double r = parse_unary(depth);
      if (!mul && r == 0.0) fail_at(op, "division by zero");
      v = mul ? v * r : v / r;
    }
    if (!std::isfinite(v)) fail("non-finite angle");
    return v;
  }

  double parse_unary(int depth) {
    if (depth > kMaxExprDepth) fail("expression nested too deeply");
    if (is_punct("-")) {
      consume();
      return -parse_unary(depth + 1);
    }
    if (is_punct("+")) {
      consume();
      return parse_unary(depth + 1);
    }
    return parse_primary(depth);
  }

  double parse_primary(int depth) {
    if (tok_.kind == Tok::Number) {
      double v = 0.0;
      const auto* first = tok_.text.data();
      const auto* last = first + tok_.text.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last || !std::isfinite(v)) fail("invalid number '" + tok_.text + "'");
      consume();
      return v;
    }
    if (tok_.kind == Tok::Ident && tok_.text == "pi") {
      consume();
      return std::numbers::pi;
    }
    if (is_punct("(")) {
      consume();
      const double v = parse_expr(depth + 1);
      expect_punct(")");
      return v;
    }
    fail("expected an angle expression");
  }

  Lexer lex_;
  Token tok_;
};

using num::Matrix;

Matrix single_qubit_matrix(const QasmStatement& st) {
  const cplx i{0.0, 1.0};
  const double r2 = 1.0 / std::sqrt(2.0);
  const std::string& n = st.name;
  if (n == "h") return {{r2, r2}, {r2, -r2}};
  if (n == "x") return {{0, 1}, {1, 0}};
  if (n == "y") return {{0, -i}, {i, 0}};
  if (n == "z") return {{1, 0}, {0, -1}};
  if (n == "s") return {{1, 0}, {0, i}};
  if (n == "sdg") return {{1, 0}, {0, -i}};
  if (n == "t") return {{1, 0}, {0, std::polar(1.0, std::numbers::pi / 4)}};
  if (n == "tdg") return {{1, 0}, {0, std::polar(1.0, -std::numbers::pi / 4)}};
  if (n == "rx" || n == "ry" || n == "rz") {
    const double h = st.params[0] / 2.0;
    const double c = std::cos(h), s = std::sin(h);
    if (n == "rx") return {{c, -i * s}, {-i * s, c}};
    if (n == "ry") return {{c, -s}, {s, c}};
    return {{std::polar(1.0, -h), 0}, {0, std::polar(1.0, h)}};
  }
  // u / u3 (theta, phi, lambda)
  const double th = st.params[0], ph = st.params[1], la = st.params[2];
  const double c = std::cos(th / 2), s = std::sin(th / 2);
  return {{c, -std::polar(s, la)}, {std::polar(s, ph), std::polar(c, ph + la)}};
}

void append(QasmProgram& p, std::string name, std::vector<int> qubits, std::vector<double> params = {}) {
  p.statements.push_back({std::move(name), std::move(qubits), std::move(params)});
}

}  // namespace

QasmProgram parse_qasm(std::string_view source) { return Parser(source).parse(); }

std::string to_qasm(const QasmProgram& program) {
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg " + program.qreg_name + "[" + std::to_string(program.n_qubits) + "];\n";
  char buf[32];
  for (const auto& st : program.statements) {
    out += st.name;
    if (!st.params.empty()) {
      out += '(';
      for (std::size_t k = 0; k < st.params.size(); ++k) {
        if (k) out += ',';
        std::snprintf(buf, sizeof buf, "%.17g", st.params[k]);
        out += buf;
      }
      out += ')';
    }
    out += ' ';
    for (std::size_t k = 0; k < st.qubits.size(); ++k) {
      if (k) out += ',';
      out += program.qreg_name + "[" + std::to_string(st.qubits[k]) + "]";
    }
    out += ";\n";
  }
  return out;
}

StateVector to_feature_state(const QasmProgram& program) {
  StateVector s(program.n_qubits);
  static const Matrix kCz = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
  for (const auto& st : program.statements) {
    if (st.name == "cx") {
      sim::apply_matrix(s, sim::cnot(), {st.qubits[0], st.qubits[1]});
    } else if (st.name == "cz") {
      sim::apply_matrix(s, kCz, {st.qubits[0], st.qubits[1]});
    } else {
      sim::apply_single_qubit(s, single_qubit_matrix(st), st.qubits[0]);
    }
  }
  return s;
}

void append_pauli_rotation(QasmProgram& p, int pa, int pb, int qa, int qb, double theta) {
  static constexpr const char* kAxis[] = {"", "rx", "ry", "rz"};
  if (pa < 0 || pa > 3 || pb < 0 || pb > 3 || (pa == 0 && pb == 0))
    throw std::invalid_argument("append_pauli_rotation: invalid Pauli string");
  // exp(i theta P) = R_P(-2 theta) with R_P(phi) = exp(-i phi P / 2)
  if (pa == 0 || pb == 0) {
    const int axis = pa ? pa : pb;
    append(p, kAxis[axis], {pa ? qa : qb}, {-2.0 * theta});
    return;
  }
  // Rotate each Pauli onto Z: X = H Z H, Y = (S H) Z (S H)^dagger.
  auto to_z = [&](int pauli, int q) {
    if (pauli == 1) append(p, "h", {q});
    if (pauli == 2) {
      append(p, "sdg", {q});
      append(p, "h", {q});
    }
  };
  auto from_z = [&](int pauli, int q) {
    if (pauli == 1) append(p, "h", {q});
    if (pauli == 2) {
      append(p, "h", {q});
      append(p, "s", {q});
    }
  };
  to_z(pa, qa);
  to_z(pb, qb);
  append(p, "cx", {qa, qb});
  append(p, "rz", {qb}, {-2.0 * theta});
  append(p, "cx", {qa, qb});
  from_z(pa, qa);
  from_z(pb, qb);
}

}  // namespace eqs::ingest
