#include "eqs/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eqs {

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("StateVector: qubit count out of range");
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amps) {
  const std::size_t n = amps.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("StateVector: length is not a power of two");
  StateVector s;
  s.n_qubits_ = std::countr_zero(n);
  s.amps_ = std::move(amps);
  return s;
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw std::invalid_argument("StateVector: basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

void StateVector::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::runtime_error("StateVector: cannot normalize the zero vector");
  for (auto& a : amps_) a /= n;
}

}  // namespace eqs

namespace eqs::num {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

cplx Matrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& v : data_) acc += std::norm(v);
  return std::sqrt(acc);
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch in +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch in -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: shape mismatch in *");
  Matrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

std::vector<cplx> matvec(const Matrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
  std::vector<cplx> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double unitarity_error(const Matrix& u) {
  return (u * u.adjoint() - Matrix::identity(u.rows())).frobenius_norm();
}

HermitianMatrix::HermitianMatrix(const Matrix& a, double tol) : m_(a.rows(), a.cols()) {
  if (!a.is_square()) throw std::invalid_argument("HermitianMatrix: matrix is not square");
  if (!a.all_finite()) throw std::invalid_argument("HermitianMatrix: non-finite entries");
  const Matrix ah = a.adjoint();
  const double skew = (a - ah).frobenius_norm();
  if (skew > tol * std::max(1.0, a.frobenius_norm()))
    throw std::invalid_argument("HermitianMatrix: input is not Hermitian (||A - A^dagger||_F = " +
                                std::to_string(skew) + ")");
  m_ = (a + ah) * cplx{0.5, 0.0};
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += std::norm(a(i, j));
  return std::sqrt(acc);
}

// Applies A <- G^dagger A G and V <- V G for the 2x2 unitary G acting on (p, q).
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q, const cplx g[2][2]) {
  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    const cplx arp = a(r, p), arq = a(r, q);
    a(r, p) = arp * g[0][0] + arq * g[1][0];
    a(r, q) = arp * g[0][1] + arq * g[1][1];
    const cplx vrp = v(r, p), vrq = v(r, q);
    v(r, p) = vrp * g[0][0] + vrq * g[1][0];
    v(r, q) = vrp * g[0][1] + vrq * g[1][1];
  }
  for (std::size_t c = 0; c < n; ++c) {
    const cplx apc = a(p, c), aqc = a(q, c);
    a(p, c) = std::conj(g[0][0]) * apc + std::conj(g[1][0]) * aqc;
    a(q, c) = std::conj(g[0][1]) * apc + std::conj(g[1][1]) * aqc;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

EighResult eigh(const HermitianMatrix& h, double rel_tol) {
  const std::size_t n = h.dim();
  Matrix a = h.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = a.frobenius_norm();
  constexpr int kMaxSweeps = 100;

  if (scale > 0.0) {
    int sweep = 0;
    while (off_diagonal_norm(a) > rel_tol * scale) {
      if (++sweep > kMaxSweeps) throw std::runtime_error("eigh: Jacobi iteration did not converge");
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const cplx b = a(p, q);
          const double g = std::abs(b);
          if (g == 0.0) continue;
          const cplx phase = b / g;  // e^{i phi}
          const double theta = 0.5 * std::atan2(2.0 * g, a(q, q).real() - a(p, p).real());
          const double c = std::cos(theta), s = std::sin(theta);
          // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
          const cplx rot[2][2] = {{c, s}, {-s * std::conj(phase), c * std::conj(phase)}};
          rotate(a, v, p, q, rot);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EighResult out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

namespace {

// Orthonormalizes the columns of `x` in place, replacing any column flagged in
// `drop` (or numerically dependent) with a completion from the standard basis.
void orthonormalize_columns(Matrix& x, const std::vector<bool>& drop) {
  const std::size_t n = x.rows();
  std::vector<std::vector<cplx>> done;
  std::size_t next_unit = 0;

  auto project_out = [&](std::vector<cplx>& col) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : done) {
        cplx c = 0.0;
        for (std::size_t r = 0; r < n; ++r) c += std::conj(e[r]) * col[r];
        for (std::size_t r = 0; r < n; ++r) col[r] -= c * e[r];
      }
  };
  auto col_norm = [&](const std::vector<cplx>& col) {
    double acc = 0.0;
    for (const auto& v : col) acc += std::norm(v);
    return std::sqrt(acc);
  };

  for (std::size_t k = 0; k < x.cols(); ++k) {
    std::vector<cplx> col(n);
    double nrm = 0.0;
    if (!drop[k]) {
      for (std::size_t r = 0; r < n; ++r) col[r] = x(r, k);
      project_out(col);
      nrm = col_norm(col);
    }
    while (nrm < 0.5) {
      if (next_unit >= n) throw std::runtime_error("svd: failed to complete orthonormal basis");
      std::fill(col.begin(), col.end(), cplx{});
      col[next_unit++] = 1.0;
      project_out(col);
      nrm = col_norm(col);
    }
    for (auto& v : col) v /= nrm;
    for (std::size_t r = 0; r < n; ++r) x(r, k) = col[r];
    done.push_back(std::move(col));
  }
}

}  // namespace

SvdResult svd(const Matrix& f) {
  if (!f.is_square()) throw std::invalid_argument("svd: only square matrices are supported");
  if (!f.all_finite()) throw std::invalid_argument("svd: non-finite entries");
  const std::size_t n = f.rows();

  const Matrix fh = f.adjoint();
  const EighResult e = eigh(HermitianMatrix(fh * f, 1e-6));

  // Right singular vectors are the eigenvectors of F^dagger F; left ones follow
  // from F v_i / d_i, which fixes their phases against Y.
  std::vector<std::vector<cplx>> fv(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<cplx> vi(n);
    for (std::size_t r = 0; r < n; ++r) vi[r] = e.vectors(r, i);
    fv[i] = matvec(f, vi);
    double acc = 0.0;
    for (const auto& z : fv[i]) acc += std::norm(z);
    d[i] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });

  SvdResult out;
  out.d.resize(n);
  out.x = Matrix(n, n);
  out.y = Matrix(n, n);
  const double cutoff = n ? 1e-10 * d[order[0]] : 0.0;
  std::vector<bool> drop(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    out.d[k] = d[i];
    for (std::size_t c = 0; c < n; ++c) out.y(k, c) = std::conj(e.vectors(c, i));
    if (d[i] <= cutoff || d[i] == 0.0) {
      drop[k] = true;
    } else {
      for (std::size_t r = 0; r < n; ++r) out.x(r, k) = fv[i][r] / d[i];
    }
  }
  orthonormalize_columns(out.x, drop);
  return out;
}

Matrix expi_hermitian(const HermitianMatrix& h) {
  const EighResult e = eigh(h);
  const std::size_t n = h.dim();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx ph = std::polar(1.0, e.values[k]);
    for (std::size_t r = 0; r < n; ++r) {
      const cplx vr = e.vectors(r, k) * ph;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(e.vectors(c, k));
    }
  }
  return out;
}

Matrix log_unitary(const Matrix& u) {
  if (!u.is_square()) throw std::invalid_argument("log_unitary: matrix is not square");
  if (unitarity_error(u) > 1e-8) throw std::runtime_error("log_unitary: matrix is not unitary");
  const std::size_t n = u.rows();
  const Matrix uh = u.adjoint();
  const Matrix re_part = (u + uh) * cplx{0.5, 0.0};
  const Matrix im_part = (u - uh) * cplx{0.0, -0.5};

  // U is normal, so its eigenvectors diagonalize cos-part + c * sin-part for any
  // real c. Distinct eigenphases a, b collide only when tan((a + b) / 2) == c,
  // hence a few fixed, unrelated mixing constants.
  constexpr double kMix[] = {0.2718281828459045, -1.4142135623730951, 3.3166247903554, 0.5772156649015329};
  for (const double c : kMix) {
    const EighResult e = eigh(HermitianMatrix(re_part + im_part * cplx{c, 0.0}, 1e-6));
    std::vector<double> phases(n);
    for (std::size_t k = 0; k < n; ++k) {
      cplx rq = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) rq += std::conj(e.vectors(r, k)) * u(r, s) * e.vectors(s, k);
      phases[k] = std::arg(rq);
    }
    Matrix recon(n, n), h(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx ph = std::polar(1.0, phases[k]);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const cplx outer = e.vectors(r, k) * std::conj(e.vectors(s, k));
          recon(r, s) += ph * outer;
          h(r, s) += phases[k] * outer;
        }
    }
    if ((recon - u).frobenius_norm() <= 1e-9) return HermitianMatrix(h).matrix();
  }
  throw std::runtime_error("log_unitary: eigendecomposition failed");
}

GramSchmidtResult gram_schmidt(std::span<const StateVector> vectors, double tol) {
  if (vectors.empty()) throw std::invalid_argument("gram_schmidt: empty input");
  if (!(tol > 0.0)) throw std::invalid_argument("gram_schmidt: tol must be positive");
  const int nq = vectors.front().n_qubits();
  const std::size_t dim = vectors.front().dim();
  for (const auto& v : vectors)
    if (v.n_qubits() != nq) throw std::invalid_argument("gram_schmidt: qubit-count mismatch");

  GramSchmidtResult out;
  const std::size_t m_count = vectors.size();
  std::vector<std::vector<cplx>> cols(m_count);

  for (std::size_t m = 0; m < m_count; ++m) {
    std::vector<cplx> r(vectors[m].amplitudes().begin(), vectors[m].amplitudes().end());
    std::vector<cplx> c(out.basis.size() + 1, cplx{});
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < out.basis.size(); ++i) {
        const auto e = out.basis[i].amplitudes();
        cplx proj = 0.0;
        for (std::size_t k = 0; k < dim; ++k) proj += std::conj(e[k]) * r[k];
        for (std::size_t k = 0; k < dim; ++k) r[k] -= proj * e[k];
        c[i] += proj;
      }
    }
    double nrm = 0.0;
    for (const auto& z : r) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (nrm > tol) {
      for (auto& z : r) z /= nrm;
      c[out.basis.size()] = nrm;
      out.basis.push_back(StateVector::from_amplitudes(std::move(r)));
      out.kept_indices.push_back(m);
    } else {
      c.pop_back();
    }
    cols[m] = std::move(c);
  }

  out.rank = out.basis.size();
  out.coeffs = Matrix(out.rank, m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t i = 0; i < cols[m].size(); ++i) out.coeffs(i, m) = cols[m][i];
  return out;
}

}  // namespace eqs::num
